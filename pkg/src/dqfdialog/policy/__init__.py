"""System policies: rule and weak experts, greedy Q policy, random baseline."""

from .base import Policy
from .experts import LAPSE_TURNS, ExpertKind, ExpertSpec, RulePolicy, WeakExpertPolicy, make_expert, rule_act, weak_act
from .greedy import GreedyQPolicy, RandomPolicy

__all__ = [
    "Policy",
    "LAPSE_TURNS",
    "ExpertKind",
    "ExpertSpec",
    "RulePolicy",
    "WeakExpertPolicy",
    "make_expert",
    "rule_act",
    "weak_act",
    "GreedyQPolicy",
    "RandomPolicy",
]
