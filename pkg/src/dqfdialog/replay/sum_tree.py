"""Array-backed binary sum tree for proportional sampling."""

import numpy as np

REL_TOLERANCE = 1e-9


class SumTree:
    """
    Complete binary tree over ``size`` leaves stored in one array.

    Node 1 is the root, node ``i`` has children ``2i`` and ``2i + 1`` and
    leaf ``j`` lives at ``size + j`` where ``size`` is a power of two.
    Parents are always recomputed from their children, never adjusted by
    deltas, so the root cannot drift from the leaf sum.

    Args:
        leaves: Minimum number of leaves; grows on demand
    """

    def __init__(self, leaves: int = 1):
        self.size = 1
        while self.size < max(1, leaves):
            self.size *= 2
        self.tree = np.zeros(2 * self.size, dtype=np.float64)

    @property
    def total(self) -> float:
        return float(self.tree[1])

    def leaf(self, index) -> np.ndarray:
        return self.tree[self.size + np.asarray(index)]

    def leaves(self, count: int) -> np.ndarray:
        return self.tree[self.size:self.size + count]

    def grow(self, leaves: int) -> None:
        """Enlarge to hold at least ``leaves`` leaves, keeping values."""
        if leaves <= self.size:
            return
        old = self.leaves(self.size).copy()
        while self.size < leaves:
            self.size *= 2
        self.tree = np.zeros(2 * self.size, dtype=np.float64)
        self.tree[self.size:self.size + len(old)] = old
        self.rebuild()

    def update(self, indices, values) -> None:
        """
        Set leaf values and refresh the affected paths.

        Raises:
            IndexError: If an index is outside the leaves
        """
        indices = np.atleast_1d(np.asarray(indices, dtype=np.int64))
        values = np.broadcast_to(np.asarray(values, dtype=np.float64), indices.shape)
        if indices.size and (indices.min() < 0 or indices.max() >= self.size):
            raise IndexError(f"Leaf index out of range [0, {self.size})")
        nodes = indices + self.size
        self.tree[nodes] = values
        nodes = np.unique(nodes // 2)
        while nodes.size and nodes[0] >= 1:
            self.tree[nodes] = self.tree[2 * nodes] + self.tree[2 * nodes + 1]
            if nodes[-1] == 1:
                break
            nodes = np.unique(nodes // 2)

    def find(self, masses) -> np.ndarray:
        """
        Leaf indices whose cumulative intervals contain the given masses.

        Leaf ``j`` owns ``[sum(leaf[:j]), sum(leaf[:j + 1]))``. Masses are
        clipped into ``[0, total)``.
        """
        masses = np.array(masses, dtype=np.float64, ndmin=1)
        masses = np.clip(masses, 0.0, np.nextafter(self.total, 0.0))
        nodes = np.ones(masses.shape, dtype=np.int64)
        while nodes[0] < self.size:
            left = 2 * nodes
            left_sum = self.tree[left]
            go_right = masses >= left_sum
            masses = np.where(go_right, masses - left_sum, masses)
            nodes = np.where(go_right, left + 1, left)
        leaves = nodes - self.size
        # Rounding can step onto an empty leaf at the right edge.
        for i in np.flatnonzero(self.tree[nodes] <= 0.0):
            nonzero = np.flatnonzero(self.leaves(leaves[i] + 1) > 0.0)
            leaves[i] = nonzero[-1] if nonzero.size else leaves[i]
        return leaves

    def rebuild(self) -> None:
        """Recompute every internal node from the leaves."""
        level = self.size // 2
        while level >= 1:
            nodes = np.arange(level, 2 * level)
            self.tree[nodes] = self.tree[2 * nodes] + self.tree[2 * nodes + 1]
            level //= 2

    def verify(self, rel_tolerance: float = REL_TOLERANCE) -> bool:
        """Whether the root equals the leaf sum within a relative tolerance."""
        expected = float(np.sum(self.leaves(self.size)))
        return abs(self.total - expected) <= rel_tolerance * max(abs(expected), 1e-300)
