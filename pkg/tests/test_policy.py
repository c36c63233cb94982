"""Tests for the rule expert, the weak expert and the greedy/random policies."""

import numpy as np
import pytest

from dqfdialog.dialog import DialogAct, Intent, StateFeaturizer, TemplateKind, enumerate_actions, initial_state, track_state
from dqfdialog.evaluation import run_episodes
from dqfdialog.network import QNetParams
from dqfdialog.policy import (
    ExpertKind,
    ExpertSpec,
    GreedyQPolicy,
    RandomPolicy,
    RulePolicy,
    WeakExpertPolicy,
    make_expert,
    rule_act,
    weak_act,
)
from dqfdialog.simulator import DialogEnvironment


def tracked(ontology, db, *acts):
    return track_state(initial_state(ontology, db), acts, db)


def inform(domain, slot, value):
    return DialogAct(Intent.INFORM, domain, slot, value)


def test_rule_answers_pending_request(tiny_ontology, tiny_db):
    """Test a pending request with an offer is answered first."""
    actions = enumerate_actions(tiny_ontology)
    state = tracked(
        tiny_ontology, tiny_db,
        inform("hotel", "area", "north"),
        inform("hotel", "price", "cheap"),
        DialogAct(Intent.REQUEST, "hotel", "phone"),
    )
    assert state["hotel"].offered_entity == "alpha"
    assert rule_act(state, tiny_ontology, tiny_db) == actions.find(TemplateKind.INFORM, "hotel", "phone")


def test_rule_requests_missing_constraint(tiny_ontology, tiny_db):
    """Test several candidates lead to a request for the next open slot."""
    actions = enumerate_actions(tiny_ontology)
    state = tracked(tiny_ontology, tiny_db, inform("hotel", "area", "north"))
    assert state["hotel"].db_count == 2
    assert rule_act(state, tiny_ontology, tiny_db) == actions.find(TemplateKind.REQUEST, "hotel", "price")


def test_rule_books_when_slots_known(tiny_ontology, tiny_db):
    """Test a single candidate with every booking slot known is booked."""
    actions = enumerate_actions(tiny_ontology)
    state = tracked(
        tiny_ontology, tiny_db,
        inform("hotel", "area", "south"),
        inform("hotel", "people", "2"),
    )
    assert rule_act(state, tiny_ontology, tiny_db) == actions.find(TemplateKind.BOOK, "hotel")

    taxi = tracked(
        tiny_ontology, tiny_db,
        inform("taxi", "destination", "station"),
        inform("taxi", "leave", "morning"),
    )
    assert rule_act(taxi, tiny_ontology, tiny_db) == actions.find(TemplateKind.BOOK, "taxi")


def test_rule_no_offer_without_matches(tiny_ontology, tiny_db):
    """Test an active domain with zero matches gets NoOffer."""
    actions = enumerate_actions(tiny_ontology)
    state = tracked(
        tiny_ontology, tiny_db,
        inform("hotel", "area", "south"),
        inform("hotel", "price", "expensive"),
    )
    assert state["hotel"].db_count == 0
    assert rule_act(state, tiny_ontology, tiny_db) == actions.find(TemplateKind.NO_OFFER, "hotel")


def test_rule_closing_actions(tiny_ontology, tiny_db):
    """Test Bye after a user goodbye and ReqMore otherwise."""
    actions = enumerate_actions(tiny_ontology)
    fresh = initial_state(tiny_ontology, tiny_db)
    assert rule_act(fresh, tiny_ontology, tiny_db) == actions.find(TemplateKind.REQ_MORE)

    goodbye = tracked(tiny_ontology, tiny_db, DialogAct(Intent.BYE))
    assert rule_act(goodbye, tiny_ontology, tiny_db) == actions.find(TemplateKind.BYE)


def reference_draw(rng, action_count):
    rng.random()
    return int(rng.integers(action_count))


def env_factory(ontology, db):
    return lambda: DialogEnvironment(ontology, db)


def test_rule_expert_always_succeeds(ontology, db):
    """Test the rule expert completes every sampled goal."""
    report = run_episodes(RulePolicy(ontology, db), env_factory(ontology, db), 100, seed=0)
    assert report.episodes == 100
    assert report.success_rate == 100.0
    assert report.recall == 1.0


def test_random_policy_is_weak_baseline(ontology, db):
    """Test uniform random actions rarely finish a dialog."""
    action_count = len(enumerate_actions(ontology))
    factory = env_factory(ontology, db)
    random = run_episodes(lambda seed: RandomPolicy(action_count, seed), factory, 100, seed=0)
    rule = run_episodes(RulePolicy(ontology, db), factory, 100, seed=0)
    assert random.success_rate <= 30.0
    assert random.success_rate < rule.success_rate
    assert random.avg_return < rule.avg_return


def test_weak_expert_without_errors_matches_rule(ontology, db, rng):
    """Test error_rate 0 reproduces the rule expert."""
    env = DialogEnvironment(ontology, db, seed=5)
    rule = RulePolicy(ontology, db)
    weak = WeakExpertPolicy(ontology, db, 0.0, rng)
    for seed in range(5):
        _, state = env.reset(seed=seed)
        while True:
            action = rule.act(state)
            assert weak.act(state) == action
            if env.step(action).done:
                break
            state = env.state


def test_weak_expert_full_error_is_uniform(ontology, db, actions):
    """Test error_rate 1 draws every action with equal frequency."""
    state = initial_state(ontology, db)
    rng = np.random.default_rng(99)
    draws = 27_000
    counts = np.bincount(
        [weak_act(state, ontology, db, 1.0, rng, actions) for _ in range(draws)],
        minlength=len(actions),
    )
    np.testing.assert_allclose(counts / draws, 1.0 / len(actions), atol=0.02)


def test_weak_act_rng_stream_is_state_independent(ontology, db, actions):
    """Test two rng values are consumed whatever the outcome."""
    state = initial_state(ontology, db)
    rng = np.random.default_rng(3)
    weak_act(state, ontology, db, 0.0, rng, actions)
    reference = np.random.default_rng(3)
    reference.random()
    reference.integers(len(actions))
    assert rng.random() == reference.random()


def test_weak_expert_lapse_runs(ontology, db, actions):
    """Test one corruption keeps the weak expert random for lapse_turns calls."""
    state = initial_state(ontology, db)
    rule = rule_act(state, ontology, db, actions)
    weak = WeakExpertPolicy(ontology, db, 1.0, 11, actions, lapse_turns=4)
    reference = np.random.default_rng(11)

    assert weak.act(state) == reference_draw(reference, len(actions))
    weak.error_rate = 0.0
    for _ in range(3):
        assert weak.act(state) == reference_draw(reference, len(actions))
    assert weak.act(state) == rule


def test_weak_expert_lapse_resets_between_sessions(ontology, db, actions):
    """Test init_session ends a lapse left over from the previous episode."""
    state = initial_state(ontology, db)
    weak = WeakExpertPolicy(ontology, db, 1.0, 2, actions)
    weak.act(state)
    weak.error_rate = 0.0
    weak.init_session()
    assert weak.act(state) == rule_act(state, ontology, db, actions)


def test_weak_expert_policy_full_error_is_uniform(ontology, db, actions):
    """Test lapses leave error_rate 1 uniform over the action space."""
    state = initial_state(ontology, db)
    weak = WeakExpertPolicy(ontology, db, 1.0, 5, actions)
    draws = 27_000
    counts = np.bincount([weak.act(state) for _ in range(draws)], minlength=len(actions))
    np.testing.assert_allclose(counts / draws, 1.0 / len(actions), atol=0.02)


def test_weak_expert_rejects_empty_lapse(ontology, db):
    """Test lapse_turns must be positive."""
    with pytest.raises(ValueError, match="lapse_turns"):
        WeakExpertPolicy(ontology, db, 0.3, 0, lapse_turns=0)


def test_weak_expert_success_falls_with_error_rate(ontology, db):
    """Test more corruption never helps on a fixed episode set."""
    factory = env_factory(ontology, db)
    rates = (0.0, 0.3, 0.6)
    successes = [
        run_episodes(lambda seed, rate=rate: WeakExpertPolicy(ontology, db, rate, seed), factory, 60, seed=4).success_rate
        for rate in rates
    ]
    assert successes[0] == 100.0
    assert successes[0] > successes[1] > successes[2]


def test_make_expert():
    """Test expert specs build the right policy."""
    spec = ExpertSpec(ExpertKind.WEAK, 0.3)
    assert str(spec) == "weak(error_rate=0.3)"
    assert str(ExpertSpec()) == "rule"
    with pytest.raises(ValueError, match="error_rate"):
        ExpertSpec(ExpertKind.WEAK, 1.5)


def test_make_expert_policies(tiny_ontology, tiny_db):
    """Test make_expert returns the matching policy class."""
    assert isinstance(make_expert(ExpertSpec(), tiny_ontology, tiny_db), RulePolicy)
    weak = make_expert(ExpertSpec(ExpertKind.WEAK, 0.2), tiny_ontology, tiny_db, rng=1)
    assert isinstance(weak, WeakExpertPolicy)
    assert weak.error_rate == 0.2


def test_greedy_policy_rejects_mismatched_network(ontology):
    """Test the network input must match the featurizer."""
    params = QNetParams.init(10, 27, 8, np.random.default_rng(0))
    with pytest.raises(ValueError, match="featurizer produces 87"):
        GreedyQPolicy(params, StateFeaturizer(ontology))


def test_greedy_policy_top_actions(ontology, db):
    """Test greedy action and ranking follow the advantage bias."""
    params = QNetParams.init(87, 27, 8, np.random.default_rng(0))
    params.w_v[:] = 0.0
    params.W_a[:] = 0.0
    params.b_a[:] = np.arange(27, dtype=np.float64)
    policy = GreedyQPolicy(params, StateFeaturizer(ontology))
    state = initial_state(ontology, db)

    assert policy.act(state) == 26
    top = policy.top_actions(state, k=3)
    assert [a for a, _ in top] == [26, 25, 24]
    assert top[0][1] == pytest.approx(13.0)


def test_random_policy_range():
    """Test random actions stay inside the action space."""
    policy = RandomPolicy(5, 0)
    assert {policy.act(None) for _ in range(200)} == set(range(5))
