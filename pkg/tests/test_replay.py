"""Tests for the sum tree, prioritized replay and demonstration files."""

import numpy as np
import pytest

from dqfdialog.errors import ContractViolation, EmptyDemoSet, FormatError
from dqfdialog.replay import BufferConfig, SumTree, SumTreeBuffer, Transition, read_demo_file, write_demo_file

LENGTH = 6


def transition(tag: int, is_demo: bool = False, terminal: bool = False) -> Transition:
    s = np.zeros(LENGTH, dtype=np.uint8)
    s[tag % LENGTH] = 1
    return Transition(s, tag % 4, -1.0, np.roll(s, 1), terminal, is_demo)


def filled(priorities, alpha=1.0, **config) -> SumTreeBuffer:
    buffer = SumTreeBuffer(LENGTH, BufferConfig(alpha=alpha, **config))
    for i in range(len(priorities)):
        buffer.push(transition(i))
    buffer.set_priorities(np.arange(len(priorities)), priorities)
    return buffer


def test_sum_tree_find_boundaries():
    """Test each mass lands in the leaf owning its interval, skipping empty leaves."""
    tree = SumTree(4)
    tree.update([0, 1, 2, 3], [1.0, 0.0, 2.0, 1.0])

    assert tree.total == 4.0
    masses = [0.0, 0.999, 1.0, 2.5, 3.0, 100.0]
    assert tree.find(masses).tolist() == [0, 0, 2, 2, 3, 3]


def test_sum_tree_matches_linear_scan(rng):
    """Test find agrees with a cumulative-sum scan on random leaves."""
    leaves = rng.random(37)
    tree = SumTree(len(leaves))
    tree.update(np.arange(len(leaves)), leaves)
    masses = rng.random(500) * leaves.sum()

    expected = np.searchsorted(np.cumsum(leaves), masses, side="right")
    np.testing.assert_array_equal(tree.find(masses), expected)
    assert tree.verify()


def test_sum_tree_grow_keeps_leaves():
    """Test growing preserves leaf values and the total."""
    tree = SumTree(2)
    tree.update([0, 1], [0.5, 1.5])
    tree.grow(9)

    assert tree.size == 16
    assert tree.leaves(3).tolist() == [0.5, 1.5, 0.0]
    assert tree.total == 2.0


def test_sum_tree_update_out_of_range():
    """Test leaf indices are checked."""
    with pytest.raises(IndexError):
        SumTree(4).update(4, 1.0)


def test_push_uses_max_priority():
    """Test new transitions get the largest priority seen so far."""
    buffer = SumTreeBuffer(LENGTH)
    assert buffer.push(transition(0)) == 0
    assert buffer.priorities[0] == 1.0

    buffer.set_priorities([0], [5.0])
    index = buffer.push(transition(1))
    assert buffer.priorities[index] == 5.0


def test_sampling_probabilities_alpha_one(rng):
    """Test probabilities follow priorities and draws follow probabilities."""
    buffer = filled([1.0, 3.0])
    np.testing.assert_allclose(buffer.probabilities(), [0.25, 0.75])

    batch = buffer.sample(10_000, rng)
    frequency = np.bincount(batch.indices, minlength=2) / len(batch)
    np.testing.assert_allclose(frequency, [0.25, 0.75], atol=0.02)


def test_sampling_probabilities_alpha(rng):
    """Test alpha flattens the distribution."""
    buffer = filled([1.0, 3.0], alpha=0.6)
    np.testing.assert_allclose(buffer.probabilities(), [0.341, 0.659], atol=1e-3)


def test_sampling_frequencies_mixed_priorities(rng):
    """Test draw frequencies from a frozen buffer match p^alpha / sum p^alpha."""
    priorities = np.array([0.5, 1.0, 2.0, 4.0, 0.1, 3.0, 1.5, 8.0])
    buffer = filled(priorities, alpha=0.6)
    expected = priorities ** 0.6 / (priorities ** 0.6).sum()
    np.testing.assert_allclose(buffer.probabilities(), expected)

    draws = 100_000
    batch = buffer.sample(draws, rng)
    frequency = np.bincount(batch.indices, minlength=len(priorities)) / draws
    np.testing.assert_allclose(frequency, expected, atol=0.02)
    np.testing.assert_allclose(buffer.priorities[:len(priorities)], priorities)


def test_uniform_priorities_give_unit_weights(rng):
    """Test importance weights are all one under uniform priorities."""
    buffer = filled([2.0] * 5)
    batch = buffer.sample(16, rng)
    np.testing.assert_allclose(batch.is_weights, 1.0)


def test_importance_weights_normalized(rng):
    """Test the rarest sample gets weight one and frequent samples less."""
    buffer = filled([1.0, 9.0], beta=1.0)
    batch = buffer.sample(64, rng)
    assert batch.is_weights.max() == pytest.approx(1.0)
    rare = batch.is_weights[batch.indices == 0]
    common = batch.is_weights[batch.indices == 1]
    np.testing.assert_allclose(rare, 1.0)
    np.testing.assert_allclose(common, 1.0 / 9.0)


def test_priority_update_adds_bonuses():
    """Test agent priorities get eps_p and demos eps_p + eps_d."""
    buffer = SumTreeBuffer(LENGTH, BufferConfig(eps_p=0.001, eps_d=0.01))
    buffer.push(transition(0, is_demo=True))
    buffer.push(transition(1))

    buffer.update_priorities([0, 1], [0.0, 0.0])
    np.testing.assert_allclose(buffer.priorities[:2], [0.011, 0.001])
    buffer.update_priorities([1], [-0.5])
    assert buffer.priorities[1] == pytest.approx(0.501)


def test_priority_update_checks_indices():
    """Test updates outside the stored range raise."""
    buffer = SumTreeBuffer(LENGTH)
    buffer.push(transition(0))
    with pytest.raises(IndexError):
        buffer.update_priorities([1], [1.0])
    with pytest.raises(ValueError, match="positive"):
        buffer.set_priorities([0], [0.0])


def test_demos_survive_overwrite():
    """Test agent transitions wrap around without touching demonstrations."""
    buffer = SumTreeBuffer(LENGTH, BufferConfig(capacity=3))
    demos = [transition(i, is_demo=True) for i in range(2)]
    for t in demos:
        buffer.push(t)
    indices = [buffer.push(transition(10 + i)) for i in range(10)]

    assert len(buffer) == 5
    assert buffer.demo_count == 2
    assert set(indices) == {2, 3, 4}
    for i, demo in enumerate(buffer.demo_transitions()):
        assert demo.is_demo
        np.testing.assert_array_equal(demo.s, demos[i].s)
    assert not buffer.is_demo[2:5].any()
    assert buffer.tree.verify()


def test_full_demo_partition_with_wrapping_agent_writes(rng):
    """Test demos keep their slots and priorities while agent writes wrap several times."""
    buffer = SumTreeBuffer(LENGTH, BufferConfig(capacity=4, alpha=1.0))
    demo_indices = [buffer.push(transition(i, is_demo=True)) for i in range(5)]
    buffer.set_priorities(demo_indices, [1.0, 2.0, 3.0, 4.0, 5.0])
    demo_states = [buffer.states[i].copy() for i in demo_indices]

    written = [buffer.push(transition(20 + i)) for i in range(13)]

    assert demo_indices == [0, 1, 2, 3, 4]
    assert written[:4] == [5, 6, 7, 8]
    assert written[4:8] == written[:4]
    assert written[-1] == 5
    assert len(buffer) == 9
    assert buffer.cursor == 1
    assert buffer.is_demo[:5].all()
    assert not buffer.is_demo[5:9].any()
    np.testing.assert_allclose(buffer.priorities[:5], [1.0, 2.0, 3.0, 4.0, 5.0])
    for index, state in zip(demo_indices, demo_states):
        np.testing.assert_array_equal(buffer.states[index], state)
    assert buffer.tree.verify()

    batch = buffer.sample(2_000, rng)
    assert batch.indices.max() < 9
    assert batch.is_demo.sum() > 0
    np.testing.assert_array_equal(batch.is_demo, batch.indices < 5)


def test_demo_after_agent_transition_raises():
    """Test demonstrations must be loaded first."""
    buffer = SumTreeBuffer(LENGTH)
    buffer.push(transition(0))
    with pytest.raises(ContractViolation):
        buffer.push(transition(1, is_demo=True))


def test_push_rejects_wrong_length():
    """Test state vectors must match the buffer."""
    buffer = SumTreeBuffer(LENGTH)
    bad = Transition(np.zeros(3, dtype=np.uint8), 0, 0.0, np.zeros(3, dtype=np.uint8), True)
    with pytest.raises(ValueError, match="length 6"):
        buffer.push(bad)


@pytest.mark.parametrize("action", [-1, 4, 27])
def test_push_rejects_action_outside_space(action):
    """Test actions must index the action space."""
    buffer = SumTreeBuffer(LENGTH, action_count=4)
    s = np.zeros(LENGTH, dtype=np.uint8)
    with pytest.raises(ValueError, match=f"Action {action} is outside"):
        buffer.push(Transition(s, action, 0.0, s, True))
    assert len(buffer) == 0
    assert buffer.push(Transition(s, 3, 0.0, s, True)) == 0


def test_sample_empty_buffer(rng):
    """Test sampling requires stored transitions."""
    with pytest.raises(ContractViolation):
        SumTreeBuffer(LENGTH).sample(4, rng)


def test_buffer_config_validation():
    """Test BufferConfig validates input."""
    with pytest.raises(ValueError, match="capacity"):
        BufferConfig(capacity=0)
    with pytest.raises(ValueError, match="beta"):
        BufferConfig(beta=1.5)
    with pytest.raises(ValueError, match="eps_p"):
        BufferConfig(eps_p=0.0)


def test_batch_transitions(rng):
    """Test a batch unpacks into transitions."""
    buffer = SumTreeBuffer(LENGTH)
    buffer.push(transition(2, is_demo=True, terminal=True))
    (t,) = buffer.sample(1, rng).transitions
    assert t.a == 2
    assert t.terminal
    assert t.is_demo


def test_demo_file_round_trip(tmp_path):
    """Test demonstrations come back bit-exact and flagged as demos."""
    path = tmp_path / "demos.bin"
    original = [transition(i, terminal=(i == 4)) for i in range(5)]
    assert write_demo_file(path, original, LENGTH, 4) == 5

    demos = read_demo_file(path, LENGTH, 4)
    assert len(demos) == 5
    assert (demos.vector_length, demos.action_count) == (LENGTH, 4)
    for before, after in zip(original, demos.transitions):
        np.testing.assert_array_equal(after.s, before.s)
        np.testing.assert_array_equal(after.s_next, before.s_next)
        assert (after.a, after.r, after.terminal) == (before.a, before.r, before.terminal)
        assert after.is_demo


def test_demo_file_errors(tmp_path):
    """Test empty input, bad actions, foreign files, truncation and size mismatches."""
    path = tmp_path / "demos.bin"
    with pytest.raises(EmptyDemoSet):
        write_demo_file(path, [], LENGTH, 4)
    with pytest.raises(ValueError, match="outside"):
        write_demo_file(path, [transition(0)], LENGTH, 0)

    write_demo_file(path, [transition(0), transition(1)], LENGTH, 4)
    with pytest.raises(FormatError, match="state features"):
        read_demo_file(path, LENGTH + 1, 4)
    with pytest.raises(FormatError, match="actions"):
        read_demo_file(path, LENGTH, 27)

    truncated = tmp_path / "truncated.bin"
    truncated.write_bytes(path.read_bytes()[:-3])
    with pytest.raises(FormatError, match="file size"):
        read_demo_file(truncated)

    foreign = tmp_path / "foreign.bin"
    foreign.write_bytes(b"NOTADEMOFILE" + bytes(40))
    with pytest.raises(FormatError, match="not a demonstration file"):
        read_demo_file(foreign)
