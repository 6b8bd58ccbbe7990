"""Vertex-to-community assignments with incrementally maintained aggregates.

A Partition is total: every vertex belongs to exactly one community.
Community ids stay fixed for the lifetime of a run; a community emptied by
its last member's departure becomes dead (size 0) and is only compacted
away when results are written out. Per-community aggregates (internal edge
count and degree sum) are updated in O(degree) on every move and must at
all times equal their from-scratch recomputation, which `audit` verifies.

Aggregates are integers on binary graphs and stay integers on aggregate
(coarse) graphs, whose edge multiplicities are integral.
"""

from __future__ import annotations

import numpy as np

from .graphs import links_to_community

__all__ = ["Partition"]


def _strength(g) -> np.ndarray:
    # Degree for binary graphs; degree already includes self-loop weight
    # (twice) for aggregate graphs.
    return g.degree


class Partition:
    __slots__ = ("assignment", "community_edges", "community_degree", "community_size")

    def __init__(self, assignment, community_edges, community_degree, community_size):
        self.assignment = assignment
        self.community_edges = community_edges
        self.community_degree = community_degree
        self.community_size = community_size

    # -- constructors -------------------------------------------------------

    @classmethod
    def from_assignment(cls, g, labels) -> "Partition":
        """Build a partition from arbitrary integer labels.

        Labels are renumbered to dense community ids 0..k-1 in ascending
        label order; aggregates are computed from scratch.
        """
        labels = np.asarray(labels)
        if labels.shape != (g.n,):
            raise ValueError(f"expected {g.n} labels, got shape {labels.shape}")
        _, assignment = np.unique(labels, return_inverse=True)
        assignment = assignment.astype(np.int32)
        cap = int(assignment.max()) + 1 if g.n else 0
        return cls._with_aggregates(g, assignment, cap)

    @classmethod
    def singletons(cls, g) -> "Partition":
        """One community per vertex (isolated vertices included)."""
        assignment = np.arange(g.n, dtype=np.int32)
        return cls._with_aggregates(g, assignment, g.n)

    @classmethod
    def _with_aggregates(cls, g, assignment: np.ndarray, capacity: int) -> "Partition":
        size = np.bincount(assignment, minlength=capacity).astype(np.int64)
        degree = np.bincount(assignment, weights=_strength(g), minlength=capacity).astype(np.int64)
        heads_c = np.repeat(assignment, np.diff(g.indptr))
        same = heads_c == assignment[g.indices]
        if g.weights is None:
            internal = np.bincount(heads_c[same], minlength=capacity)
        else:
            internal = np.bincount(heads_c[same], weights=g.weights[same], minlength=capacity)
        edges = (internal // 2) if g.weights is None else (internal.astype(np.int64) // 2)
        edges = np.asarray(edges, dtype=np.int64)
        if g.self_loops is not None:
            edges = edges + np.bincount(assignment, weights=g.self_loops, minlength=capacity).astype(np.int64)
        return cls(assignment, edges, degree, size)

    # -- queries ------------------------------------------------------------

    @property
    def capacity(self) -> int:
        return self.community_size.shape[0]

    @property
    def live_count(self) -> int:
        return int(np.count_nonzero(self.community_size))

    def live_communities(self) -> np.ndarray:
        """Ids of non-empty communities, ascending."""
        return np.nonzero(self.community_size)[0]

    def members(self, c: int) -> np.ndarray:
        return np.nonzero(self.assignment == c)[0]

    def copy(self) -> "Partition":
        return Partition(
            self.assignment.copy(),
            self.community_edges.copy(),
            self.community_degree.copy(),
            self.community_size.copy(),
        )

    def compact_ids(self) -> dict[int, int]:
        """Output-time renumbering: live community ids -> 0..k-1, ascending."""
        return {int(c): i for i, c in enumerate(self.live_communities())}

    # -- mutation -----------------------------------------------------------

    def move(self, g, w: int, target: int) -> None:
        """Reassign vertex w to a live target community, updating aggregates."""
        source = int(self.assignment[w])
        if target == source:
            return
        if self.community_size[target] == 0:
            raise ValueError(f"community {target} is dead; it cannot be a move target")
        l_src = links_to_community(g, self, w, source)
        l_tgt = links_to_community(g, self, w, target)
        sw = int(g.self_loops[w]) if g.self_loops is not None else 0
        k = int(_strength(g)[w])
        self.community_edges[source] -= l_src + sw
        self.community_edges[target] += l_tgt + sw
        self.community_degree[source] -= k
        self.community_degree[target] += k
        self.community_size[source] -= 1
        self.community_size[target] += 1
        self.assignment[w] = target

    # -- consistency --------------------------------------------------------

    def audit(self, g) -> None:
        """Assert aggregates match a from-scratch recomputation."""
        fresh = Partition._with_aggregates(g, self.assignment, self.capacity)
        for name in ("community_edges", "community_degree", "community_size"):
            a, b = getattr(self, name), getattr(fresh, name)
            if not np.array_equal(a, b):
                c = int(np.nonzero(a != b)[0][0])
                raise AssertionError(
                    f"partition aggregate {name} inconsistent at community {c}: "
                    f"incremental {a[c]} vs recomputed {b[c]}"
                )
