"""Tests for goal sampling, the agenda, the simulated user and the environment."""


import numpy as np
import pytest

from dqfdialog.dialog import DONTCARE, DialogAct, EntityDatabase, Intent, TemplateKind
from dqfdialog.errors import ContractViolation, GoalSamplingError
from dqfdialog.parser import load_ontology
from dqfdialog.simulator import (
    MAX_TURNS,
    Agenda,
    DialogEnvironment,
    DomainGoal,
    EnvConfig,
    GoalConfig,
    UserGoal,
    evaluate_goal,
    read_episode_logs,
    sample_goal,
    write_episode_logs,
)
from dqfdialog.simulator.episode import SYSTEM, USER, EpisodeLog, TurnRecord


def hotel_goal(area="north", price="cheap", requests=("phone",)):
    return UserGoal(domains={"hotel": DomainGoal(
        constraints={"area": area, "price": price},
        requests=list(requests),
    )})


def play(env, *steps):
    """Step the environment through (kind, domain, slot) templates."""
    results = []
    for kind, domain, slot in steps:
        results.append(env.step(env.actions.find(kind, domain, slot)))
    return results


def test_env_config_rewards():
    """Test rewards derive from max_turns."""
    config = EnvConfig()
    assert config.max_turns == MAX_TURNS == 40
    assert config.success_reward == 80.0
    assert config.failure_reward == -40.0


def test_env_config_validation():
    """Test EnvConfig validates input."""
    with pytest.raises(ValueError, match="max_turns must be positive"):
        EnvConfig(max_turns=0)
    with pytest.raises(ValueError, match="min_domains"):
        EnvConfig(min_domains=3, max_domains=2)
    with pytest.raises(ValueError, match="dontcare_probability"):
        GoalConfig(dontcare_probability=1.5)


def test_sample_goal_is_deterministic(ontology, db):
    """Test the same seed samples the same goal."""
    first = sample_goal(ontology, db, np.random.default_rng(0))
    second = sample_goal(ontology, db, np.random.default_rng(0))
    assert first.to_dict() == second.to_dict()


def test_sampled_goals_are_satisfiable(ontology, db):
    """Test every database-domain constraint set matches an entity."""
    rng = np.random.default_rng(7)
    for _ in range(1000):
        goal = sample_goal(ontology, db, rng)
        assert 1 <= len(goal.domains) <= 3
        for domain, target in goal.domains.items():
            spec = ontology.domain(domain)
            if spec.database:
                matches = [e for e in db.entities[domain] if target.matches(e)]
                assert matches
                assert target.requests
                assert set(target.requests) <= set(spec.requestable)
            else:
                assert target.wants_booking
                assert not target.requests
            if target.wants_booking:
                assert set(target.booking) == set(spec.booking)


def test_single_domain_ontology_goal():
    """Test a one-domain ontology forces that domain."""
    ontology = load_ontology("[spa]\ninformable.area = north, south\nrequestable = phone\n")
    db = EntityDatabase.generate(ontology, 0, entities_per_domain=4)
    rng = np.random.default_rng(3)
    for _ in range(20):
        assert list(sample_goal(ontology, db, rng).domains) == ["spa"]


def test_goal_sampling_exhaustion(tiny_ontology):
    """Test an empty database exhausts the rejection budget."""
    empty = EntityDatabase(tiny_ontology)
    config = GoalConfig(min_domains=2, max_domains=2)
    with pytest.raises(GoalSamplingError, match="No satisfiable goal"):
        sample_goal(tiny_ontology, empty, np.random.default_rng(0), config, max_tries=50)


def test_goal_dict_round_trip():
    """Test goals survive to_dict/from_dict."""
    goal = hotel_goal()
    goal.domains["taxi"] = DomainGoal({"destination": "station"}, [], True, {"leave": "morning"})
    assert UserGoal.from_dict(goal.to_dict()) == goal


def test_agenda_initial_order():
    """Test constraints pop before requests, then booking informs; dontcare is omitted."""
    goal = UserGoal(domains={"hotel": DomainGoal(
        constraints={"area": "north", "price": DONTCARE},
        requests=["phone", "name"],
        wants_booking=True,
        booking={"people": "2"},
    )})
    agenda = Agenda.from_goal(goal)
    assert list(agenda) == [
        DialogAct(Intent.INFORM, "hotel", "area", "north"),
        DialogAct(Intent.REQUEST, "hotel", "phone"),
        DialogAct(Intent.REQUEST, "hotel", "name"),
        DialogAct(Intent.INFORM, "hotel", "people", "2"),
    ]


def test_agenda_push_moves_existing_act():
    """Test pushing an act with a pending key moves it to the top."""
    agenda = Agenda()
    agenda.push(DialogAct(Intent.INFORM, "hotel", "area", "north"))
    agenda.push(DialogAct(Intent.REQUEST, "hotel", "phone"))
    agenda.push(DialogAct(Intent.INFORM, "hotel", "area", "south"))

    assert len(agenda) == 2
    assert agenda.pop() == [DialogAct(Intent.INFORM, "hotel", "area", "south")]
    assert agenda.pop(5) == [DialogAct(Intent.REQUEST, "hotel", "phone")]
    assert agenda.pop() == []


def test_reset_emits_user_acts(ontology, db):
    """Test reset opens with at least one act and is seed-deterministic."""
    env = DialogEnvironment(ontology, db)
    first, state = env.reset(seed=11)
    assert first
    assert state.turn == 0
    again, _ = DialogEnvironment(ontology, db).reset(seed=11)
    assert again == first


def test_successful_episode(tiny_ontology, tiny_db):
    """Test answering the only request ends the dialog successfully."""
    env = DialogEnvironment(tiny_ontology, tiny_db)
    user_acts, state = env.reset(goal=hotel_goal())

    assert user_acts == [
        DialogAct(Intent.INFORM, "hotel", "area", "north"),
        DialogAct(Intent.INFORM, "hotel", "price", "cheap"),
        DialogAct(Intent.REQUEST, "hotel", "phone"),
    ]
    assert state["hotel"].offered_entity == "alpha"

    (result,) = play(env, (TemplateKind.INFORM, "hotel", "phone"))
    assert result.done
    assert result.success
    assert result.user_acts == [DialogAct(Intent.BYE)]
    assert result.feedback == {"inform:hotel.phone": True}
    assert result.reward == -1 + 80
    assert env.log.total_return == 79

    report = evaluate_goal(env.log.goal, env.log)
    assert report.success
    assert report.slot_precision == report.slot_recall == report.slot_f1 == 1.0
    assert report.booked_fraction is None


def test_spurious_inform_lowers_precision(tiny_ontology, tiny_db):
    """Test an unrequested Inform counts against precision only."""
    env = DialogEnvironment(tiny_ontology, tiny_db)
    env.reset(goal=hotel_goal())
    first, second = play(
        env,
        (TemplateKind.INFORM, "hotel", "name"),
        (TemplateKind.INFORM, "hotel", "phone"),
    )
    assert not first.done
    assert first.feedback == {"inform:hotel.name": False}
    assert first.user_acts == [DialogAct(Intent.REQUEST, "hotel", "phone")]
    assert second.success

    report = evaluate_goal(env.log.goal, env.log)
    assert report.slot_precision == 0.5
    assert report.slot_recall == 1.0
    assert report.slot_f1 == pytest.approx(2 / 3)
    assert env.log.total_return == -1 + 79


def test_five_turn_success_return(tiny_ontology, tiny_db):
    """Test a 5-turn successful episode returns 2*40 - 5."""
    env = DialogEnvironment(tiny_ontology, tiny_db)
    env.reset(goal=hotel_goal())
    results = play(env, *([(TemplateKind.REQ_MORE, "general", None)] * 4), (TemplateKind.INFORM, "hotel", "phone"))
    assert [r.done for r in results] == [False] * 4 + [True]
    assert env.log.turns == 5
    assert env.log.total_return == 75


def test_timeout_is_failure(ontology, db):
    """Test an episode reaching max_turns ends as a failure."""
    env = DialogEnvironment(ontology, db)
    env.reset(seed=5)
    reqmore = env.actions.find(TemplateKind.REQ_MORE)
    results = [env.step(reqmore) for _ in range(MAX_TURNS)]

    assert [r.done for r in results] == [False] * (MAX_TURNS - 1) + [True]
    assert results[-1].success is False
    assert env.log.total_return == -40 - 40
    with pytest.raises(ContractViolation):
        env.step(reqmore)


def test_system_bye_ends_episode(tiny_ontology, tiny_db):
    """Test a premature system Bye is a failure."""
    env = DialogEnvironment(tiny_ontology, tiny_db)
    env.reset(goal=hotel_goal())
    (result,) = play(env, (TemplateKind.BYE, "general", None))
    assert result.done
    assert not result.success
    assert result.reward == -1 - 40
    assert result.user_acts == []


def test_step_contract(tiny_ontology, tiny_db):
    """Test stepping before reset or with a bad index raises."""
    env = DialogEnvironment(tiny_ontology, tiny_db)
    with pytest.raises(ContractViolation):
        env.step(0)
    env.reset(goal=hotel_goal())
    with pytest.raises(IndexError):
        env.step(len(env.actions))


def test_user_answers_system_request(tiny_ontology, tiny_db):
    """Test the user informs a requested constraint, or dontcare for unknown ones."""
    env = DialogEnvironment(tiny_ontology, tiny_db)
    env.reset(goal=hotel_goal(price=DONTCARE))
    (result,) = play(env, (TemplateKind.REQUEST, "hotel", "price"))
    assert DialogAct(Intent.INFORM, "hotel", "price", DONTCARE) in result.user_acts
    assert env.state["hotel"].constraints["price"] == DONTCARE


def test_user_relaxes_after_nooffer(tiny_ontology, tiny_db):
    """Test NoOffer on an empty result makes the user drop its latest constraint."""
    env = DialogEnvironment(tiny_ontology, tiny_db)
    _, state = env.reset(goal=hotel_goal(area="south", price="expensive"))
    assert state["hotel"].db_count == 0

    (result,) = play(env, (TemplateKind.NO_OFFER, "hotel", None))
    assert result.user_acts == [DialogAct(Intent.INFORM, "hotel", "price", DONTCARE)]
    assert env.goal["hotel"].constraints["price"] == DONTCARE
    assert env.state["hotel"].db_count == 1
    assert env.state["hotel"].offered_entity == "charlie"


def test_inconsistent_inform_leaves_request_open(tiny_ontology, tiny_db):
    """Test an Inform about an entity violating the goal is judged wrong."""
    env = DialogEnvironment(tiny_ontology, tiny_db)
    env.reset(goal=hotel_goal(price="expensive"))
    # force an offer that violates the goal's price
    env.state["hotel"].constraints = {"area": "north"}
    env.state["hotel"].offered_entity = "alpha"

    (result,) = play(env, (TemplateKind.INFORM, "hotel", "phone"))
    assert result.feedback == {"inform:hotel.phone": False}
    assert DialogAct(Intent.INFORM, "hotel", "price", "expensive") in result.user_acts
    assert not result.done


def test_taxi_booking(tiny_ontology, tiny_db):
    """Test a taxi booking is accepted once its slots are tracked."""
    goal = UserGoal(domains={"taxi": DomainGoal({"destination": "station"}, [], True, {"leave": "morning"})})
    env = DialogEnvironment(tiny_ontology, tiny_db)
    env.reset(goal=goal)

    (result,) = play(env, (TemplateKind.BOOK, "taxi", None))
    assert result.feedback == {"book:taxi": True}
    assert result.success
    assert env.state["taxi"].booked

    report = evaluate_goal(env.log.goal, env.log)
    assert report.success
    assert report.booked_fraction == 1.0


def test_booking_without_book_fails(tiny_ontology, tiny_db):
    """Test a goal wanting a booking fails when no Book is issued."""
    goal = hotel_goal()
    goal["hotel"].wants_booking = True
    goal["hotel"].booking = {"people": "2"}
    env = DialogEnvironment(tiny_ontology, tiny_db)
    env.reset(goal=goal)
    play(env, (TemplateKind.INFORM, "hotel", "phone"), (TemplateKind.BYE, "general", None))

    report = evaluate_goal(env.log.goal, env.log)
    assert report.slot_recall == 1.0
    assert report.booked_fraction == 0.0
    assert not report.success


def test_random_play_stays_bounded(ontology, db):
    """Test returns, dialog length and agenda size stay bounded under random actions."""
    env = DialogEnvironment(ontology, db, seed=0)
    rng = np.random.default_rng(8)
    for seed in range(150):
        env.reset(seed=seed)
        goal = env.goal
        # booking values count as constraints; the user never stacks control acts
        bound = 4 + sum(len(g.constraints) + len(g.booking) + len(g.requests) for g in goal.domains.values())
        assert len(env.user.agenda) <= bound
        total, turns, done = 0.0, 0, False
        while not done:
            result = env.step(int(rng.integers(len(env.actions))))
            total += result.reward
            turns += 1
            done = result.done
            assert len(env.user.agenda) <= bound
        assert turns <= MAX_TURNS
        assert -2 * MAX_TURNS <= total <= 2 * MAX_TURNS - 1


def test_evaluate_goal_arithmetic():
    """Test 4 informs, 2 correct, 4 requested gives P = R = F1 = 0.5."""
    goal = UserGoal(domains={"hotel": DomainGoal({}, ["address", "name", "phone", "postcode"])})
    log = EpisodeLog(goal=goal)
    log.append(TurnRecord(turn=1, actor=SYSTEM, acts=[]))
    log.append(TurnRecord(turn=1, actor=USER, acts=[], feedback={
        "inform:hotel.address": True,
        "inform:hotel.name": True,
        "inform:hotel.phone": False,
        "inform:hotel.postcode": False,
    }))
    report = evaluate_goal(goal, log)
    assert report.slot_precision == 0.5
    assert report.slot_recall == 0.5
    assert report.slot_f1 == 0.5
    assert not report.success


def test_request_free_goal_scores_perfect(tiny_ontology, tiny_db):
    """Test a booked goal with no requests scores P = R = F1 = 1."""
    goal = UserGoal(domains={"taxi": DomainGoal({"destination": "station"}, [], True, {"leave": "morning"})})
    env = DialogEnvironment(tiny_ontology, tiny_db)
    env.reset(goal=goal)
    play(env, (TemplateKind.BOOK, "taxi", None))

    report = evaluate_goal(env.log.goal, env.log)
    assert report.success
    assert report.slot_precision == report.slot_recall == report.slot_f1 == 1.0


def test_request_free_goal_with_spurious_inform():
    """Test informing slots nobody asked for costs precision but not recall."""
    goal = UserGoal(domains={"hotel": DomainGoal({"area": "north"}, [])})
    log = EpisodeLog(goal=goal)
    log.append(TurnRecord(turn=1, actor=USER, acts=[], feedback={"inform:hotel.phone": True}))
    report = evaluate_goal(goal, log)
    assert report.slot_precision == 0.0
    assert report.slot_recall == 1.0
    assert report.slot_f1 == 0.0
    assert report.success


def test_unanswered_requests_score_zero():
    """Test requests with nothing informed score P = R = 0."""
    goal = UserGoal(domains={"hotel": DomainGoal({}, ["phone"])})
    report = evaluate_goal(goal, EpisodeLog(goal=goal))
    assert report.slot_precision == report.slot_recall == report.slot_f1 == 0.0
    assert not report.success


def test_last_judgement_wins():
    """Test a later correct Inform overrides an earlier wrong one."""
    goal = UserGoal(domains={"hotel": DomainGoal({}, ["phone"])})
    log = EpisodeLog(goal=goal)
    log.append(TurnRecord(turn=1, actor=USER, acts=[], feedback={"inform:hotel.phone": False}))
    log.append(TurnRecord(turn=2, actor=USER, acts=[], feedback={"inform:hotel.phone": True}))
    assert evaluate_goal(goal, log).success


def test_episode_log_round_trip(tiny_ontology, tiny_db, tmp_path):
    """Test episode logs written as JSON lines read back equal."""
    env = DialogEnvironment(tiny_ontology, tiny_db)
    env.reset(goal=hotel_goal())
    play(env, (TemplateKind.INFORM, "hotel", "name"), (TemplateKind.INFORM, "hotel", "phone"))

    path = tmp_path / "episodes.jsonl"
    write_episode_logs([env.log, env.log], path)
    logs = read_episode_logs(path)
    assert len(logs) == 2
    assert logs[0].records == env.log.records
    assert logs[0].goal == env.log.goal
    assert evaluate_goal(logs[1].goal, logs[1]) == evaluate_goal(env.log.goal, env.log)


def test_episode_log_rejects_orphan_turns(tmp_path):
    """Test a turn record before any goal header is malformed."""
    path = tmp_path / "bad.jsonl"
    path.write_text('{"type": "turn", "turn": 0, "actor": "user", "acts": []}\n', encoding="utf-8")
    with pytest.raises(ValueError, match="before a goal header"):
        read_episode_logs(path)
