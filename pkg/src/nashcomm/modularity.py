"""Modularity under its equivalent formulations, plus exhaustive oracles.

The production path computes Q from per-community aggregates:

    Q = sum_c [ e_c / m  -  (d_c / 2m)^2 ]

with e_c the number of edges internal to community c and d_c the sum of
its members' degrees. `modularity_pairwise_oracle` evaluates the same
quantity literally as a double sum over all ordered vertex pairs (null
model terms included for i = j) and exists to cross-check everything that
claims to equal a modularity difference. `brute_force_best_partition`
enumerates all set partitions of tiny graphs for ground-truth optima.
"""

from __future__ import annotations

import warnings

import numpy as np

from .graphs import BipartiteGraph, Graph
from .partition import Partition

__all__ = [
    "modularity",
    "modularity_pairwise_oracle",
    "bipartite_modularity",
    "brute_force_best_partition",
    "restricted_growth_strings",
]


def modularity(g, p: Partition) -> float:
    """Modularity of a partition, from its community aggregates.

    Defined as 0 (with a warning) on edgeless graphs. Accepts both binary
    graphs and weighted aggregate graphs, since only m, e_c and d_c enter.
    """
    if g.m == 0:
        warnings.warn("modularity of an edgeless graph is defined as 0", stacklevel=2)
        return 0.0
    live = p.live_communities()
    e = p.community_edges[live].astype(np.float64)
    d = p.community_degree[live].astype(np.float64)
    m = float(g.m)
    return float(np.sum(e / m - (d / (2.0 * m)) ** 2))


def modularity_pairwise_oracle(g: Graph, p: Partition, max_n: int = 4000) -> float:
    """Literal double-sum evaluation over all ordered pairs, i = j included.

    Test oracle only: builds the dense adjacency matrix, so it refuses
    graphs beyond ``max_n`` vertices.
    """
    if g.m == 0:
        warnings.warn("modularity of an edgeless graph is defined as 0", stacklevel=2)
        return 0.0
    if g.n > max_n:
        raise ValueError(f"pairwise oracle is dense; refusing n={g.n} > {max_n}")
    a = np.zeros((g.n, g.n), dtype=np.float64)
    heads = np.repeat(np.arange(g.n, dtype=np.int64), g.degree)
    a[heads, g.indices] = 1.0
    k = g.degree.astype(np.float64)
    m = float(g.m)
    same = p.assignment[:, None] == p.assignment[None, :]
    contrib = a - np.outer(k, k) / (2.0 * m)
    return float(contrib[same].sum() / (2.0 * m))


def bipartite_modularity(bg: BipartiteGraph, p: Partition) -> float:
    """Modularity of a partition of a bipartite graph, in biadjacency terms.

    The partition assigns all r + s block vertices (U first). Computed per
    community as e_c / m - ((d_u|c + d_v|c) / 2m)^2 where d_u|c and d_v|c
    are the U-side and V-side degree sums; equals the block-graph
    modularity exactly.
    """
    if bg.m == 0:
        warnings.warn("modularity of an edgeless graph is defined as 0", stacklevel=2)
        return 0.0
    if p.assignment.shape[0] != bg.r + bg.s:
        raise ValueError("partition must assign all r + s block vertices")
    cap = p.capacity
    cu = p.assignment[: bg.r]
    cv = p.assignment[bg.r :]
    eu = np.repeat(cu, bg.row_margin)
    ev = cv[bg.indices]
    same = eu == ev
    e_c = np.bincount(eu[same], minlength=cap).astype(np.float64)
    d_u = np.bincount(cu, weights=bg.row_margin, minlength=cap)
    d_v = np.bincount(cv, weights=bg.col_margin, minlength=cap)
    live = p.live_communities()
    m = float(bg.m)
    return float(np.sum(e_c[live] / m - ((d_u[live] + d_v[live]) / (2.0 * m)) ** 2))


def restricted_growth_strings(n: int):
    """Yield every set partition of {0..n-1} as a label list, in lex order.

    A restricted growth string satisfies a[0] = 0 and
    a[i] <= 1 + max(a[:i]); each one encodes exactly one set partition.
    """
    if n == 0:
        yield []
        return
    a = [0] * n
    b = [1] * n  # b[i] = 1 + max(a[:i]), the ceiling for a[i]
    while True:
        yield a.copy()
        i = n - 1
        while i > 0 and a[i] == b[i]:
            i -= 1
        if i == 0:
            return
        a[i] += 1
        for j in range(i + 1, n):
            a[j] = 0
            b[j] = b[i] if a[i] < b[i] else b[i] + 1
            i = j  # carry the updated ceiling rightward


def brute_force_best_partition(g: Graph, max_n: int = 12) -> tuple[Partition, float]:
    """Exhaustive modularity maximum over all set partitions of a tiny graph.

    Ties resolve to the lexicographically smallest restricted growth
    string. Bell(12) is about 4.2e6, so anything past ``max_n`` is refused.
    """
    if g.n > max_n:
        raise ValueError(f"brute force enumerates Bell({g.n}) partitions; refusing n > {max_n}")
    if g.m == 0:
        raise ValueError("brute force needs at least one edge")
    edges = [(int(i), int(j)) for i, j in g.edges()]
    deg = g.degree.tolist()
    m = float(g.m)
    inv_m = 1.0 / m
    half = 1.0 / (2.0 * m)
    best_q = -np.inf
    best: list[int] | None = None
    for labels in restricted_growth_strings(g.n):
        k = max(labels) + 1
        e = [0] * k
        d = [0] * k
        for i, j in edges:
            if labels[i] == labels[j]:
                e[labels[i]] += 1
        for v, lab in enumerate(labels):
            d[lab] += deg[v]
        q = 0.0
        for c in range(k):
            t = d[c] * half
            q += e[c] * inv_m - t * t
        if q > best_q:
            best_q = q
            best = labels
    assert best is not None
    return Partition.from_assignment(g, best), float(best_q)
