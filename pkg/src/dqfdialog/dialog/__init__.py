"""Dialog acts, ontology, database, state tracking and featurization."""

from .actions import ActionSpace, ActionTemplate, TemplateKind, action_count, enumerate_actions
from .database import EntityDatabase, query_database
from .featurizer import StateFeaturizer, featurize, state_length
from .models import (
    DONTCARE,
    GENERAL,
    DialogAct,
    DialogState,
    DomainSpec,
    DomainState,
    Intent,
    Ontology,
)
from .tracker import apply_system_acts, initial_state, mark_booked, track_state

__all__ = [
    "ActionSpace",
    "ActionTemplate",
    "TemplateKind",
    "action_count",
    "enumerate_actions",
    "EntityDatabase",
    "query_database",
    "StateFeaturizer",
    "featurize",
    "state_length",
    "DONTCARE",
    "GENERAL",
    "DialogAct",
    "DialogState",
    "DomainSpec",
    "DomainState",
    "Intent",
    "Ontology",
    "apply_system_acts",
    "initial_state",
    "mark_booked",
    "track_state",
]
