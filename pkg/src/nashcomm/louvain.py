"""Two-phase greedy modularity maximization (local moves + aggregation).

Phase one sweeps vertices in a fixed order, moving each to the neighboring
community with the largest positive modularity gain until a full sweep
gains less than ``min_gain``. Phase two collapses each community into a
single coarse vertex; inter-community edge multiplicities become integer
weights and internal edges become self-loop counts, so the coarse graph's
modularity under the identity partition equals the fine graph's under the
current one. Levels repeat until no vertex merges.

The input graphs of this package are binary; only the internal coarse
levels are weighted. Scan order is ascending vertex id by default so runs
are exactly reproducible; an optional seeded shuffle is available.
"""

from __future__ import annotations

from array import array
from dataclasses import dataclass

import numpy as np

from .graphs import Graph, _freeze
from .partition import Partition

__all__ = ["LouvainConfig", "AggregateGraph", "local_move_phase", "aggregate", "louvain"]


@dataclass(frozen=True)
class LouvainConfig:
    min_gain: float = 1e-10
    max_levels: int = 32
    scan: str = "fixed"  # "fixed" (ascending ids) or "seeded" (shuffled)
    seed: int | None = None

    def __post_init__(self):
        if self.scan not in ("fixed", "seeded"):
            raise ValueError(f"unknown scan mode {self.scan!r}")
        if self.scan == "seeded" and self.seed is None:
            raise ValueError("scan='seeded' requires a seed")


@dataclass(frozen=True)
class AggregateGraph:
    """Coarse graph whose vertices are the live communities of a partition.

    ``weights`` holds inter-community edge multiplicities, ``self_loops``
    per-vertex internal edge counts, and ``degree`` the vertex strength
    (2 * self_loops + incident weight), so total edge weight still equals
    the original m. ``mapping`` sends each fine vertex to its coarse id.
    """

    n: int
    indptr: np.ndarray
    indices: np.ndarray
    weights: np.ndarray
    self_loops: np.ndarray
    degree: np.ndarray
    m: int
    mapping: np.ndarray

    def neighbors(self, i: int) -> np.ndarray:
        return self.indices[self.indptr[i] : self.indptr[i + 1]]


def _scan_order(n: int, cfg: LouvainConfig):
    if cfg.scan == "seeded":
        return np.random.default_rng(cfg.seed).permutation(n).tolist()
    return range(n)


def local_move_phase(g, p: Partition, cfg: LouvainConfig | None = None) -> tuple[Partition, float]:
    """Greedy single-vertex moves until a full sweep gains < cfg.min_gain.

    Mutates and returns ``p`` together with the total modularity gained.
    Works on binary graphs and on weighted aggregate graphs alike; the
    gain of moving u from its community D to a neighboring community C is

        (l_uC - l_uD) / m - (k_u^2 + k_u (d_C - d_D)) / (2 m^2)

    with l the (weighted) link counts from u, d_D including u and d_C not.
    Ties go to the lowest community id.
    """
    cfg = cfg or LouvainConfig()
    n = g.n
    m = float(g.m)
    inv_m = 1.0 / m
    inv_2m2 = 1.0 / (2.0 * m * m)
    # CSR slices are converted per visit; prebuilding n Python lists would
    # dominate the memory footprint on large graphs.
    indptr = g.indptr
    indices = g.indices
    weights = g.weights
    selfw = g.self_loops.tolist() if g.self_loops is not None else None
    k = g.degree.tolist()

    # aggregates live in p's own arrays; the hot per-neighbor community
    # lookups go through an unboxed int array
    comm = array("i", p.assignment.tolist())
    d_comm = p.community_degree
    e_comm = p.community_edges
    size = p.community_size
    order = _scan_order(n, cfg)

    total = 0.0
    while True:
        sweep_gain = 0.0
        for u in order:
            cu = comm[u]
            lo, hi = indptr[u], indptr[u + 1]
            acc: dict[int, int] = {}
            if weights is None:
                for v in indices[lo:hi].tolist():
                    cv = comm[v]
                    acc[cv] = acc.get(cv, 0) + 1
            else:
                for v, wv in zip(indices[lo:hi].tolist(), weights[lo:hi].tolist()):
                    cv = comm[v]
                    acc[cv] = acc.get(cv, 0) + wv
            l_own = acc.get(cu, 0)
            ku = k[u]
            d_cu = d_comm[cu]
            best_gain = 0.0
            best_t = -1
            for t, lt in acc.items():
                if t == cu:
                    continue
                gain = (lt - l_own) * inv_m - (ku * ku + ku * (d_comm[t] - d_cu)) * inv_2m2
                if gain > best_gain or (gain == best_gain and best_t != -1 and t < best_t):
                    best_gain = gain
                    best_t = t
            if best_t != -1 and best_gain > 0.0:
                sw = selfw[u] if selfw is not None else 0
                e_comm[cu] -= l_own + sw
                e_comm[best_t] += acc[best_t] + sw
                d_comm[cu] -= ku
                d_comm[best_t] += ku
                size[cu] -= 1
                size[best_t] += 1
                comm[u] = best_t
                sweep_gain += best_gain
        total += sweep_gain
        if sweep_gain < cfg.min_gain:
            break

    p.assignment[:] = comm
    return p, total


def aggregate(g, p: Partition) -> AggregateGraph:
    """Collapse each live community of p into one coarse vertex."""
    live = p.live_communities()
    k = int(live.size)
    if k == 0:
        raise ValueError("partition has no live community")
    cmap = np.full(p.capacity, -1, dtype=np.int32)
    cmap[live] = np.arange(k, dtype=np.int32)
    coarse = cmap[p.assignment]

    # temporaries are the memory peak of a whole run: keep them int32 where
    # the value range allows, release eagerly, sort in place
    degree = np.bincount(coarse, weights=g.degree, minlength=k).astype(np.int64)
    ca = np.repeat(coarse, g.degree) if g.weights is None else np.repeat(coarse, np.diff(g.indptr))
    cb = coarse[g.indices]
    cross = ca != cb
    if g.weights is None:
        key_dtype = np.int32 if k <= 46340 else np.int64  # k^2 must fit the key
        key = ca[cross].astype(key_dtype, copy=False)
        key *= k
        key += cb[cross]
        del ca, cb, cross
        key.sort()
        if key.size:
            mask = np.empty(key.size, dtype=bool)
            mask[0] = True
            np.not_equal(key[1:], key[:-1], out=mask[1:])
            starts = np.flatnonzero(mask).astype(np.int64, copy=False)
            uniq = key[starts].astype(np.int64)
            wsum = np.diff(np.append(starts, key.size))
            del mask, starts
        else:
            uniq = np.empty(0, dtype=np.int64)
            wsum = np.empty(0, dtype=np.int64)
        del key
        uh = uniq // k
        # internal halfedges = coarse strength minus outgoing cross halfedges
        crossdeg = np.bincount(uh, weights=wsum, minlength=k).astype(np.int64)
        inner = (degree - crossdeg) // 2
    else:
        key = ca[cross].astype(np.int64)
        key *= k
        key += cb[cross]
        uniq, inv = np.unique(key, return_inverse=True)
        wsum = np.bincount(inv, weights=g.weights[cross], minlength=uniq.size)
        inner = np.bincount(ca[~cross], weights=g.weights[~cross], minlength=k).astype(np.int64) // 2
        del key, ca, cb, cross
        uh = uniq // k
    if g.self_loops is not None:
        inner = inner + np.bincount(coarse, weights=g.self_loops, minlength=k).astype(np.int64)

    indptr = np.zeros(k + 1, dtype=np.int64)
    np.cumsum(np.bincount(uh, minlength=k), out=indptr[1:])
    return AggregateGraph(
        n=k,
        indptr=_freeze(indptr),
        indices=_freeze((uniq % k).astype(np.int32)),
        weights=_freeze(wsum.astype(np.int32)),
        self_loops=_freeze(np.asarray(inner, dtype=np.int64)),
        degree=_freeze(degree),
        m=g.m,
        mapping=_freeze(coarse),
    )


def louvain(g: Graph, cfg: LouvainConfig | None = None) -> Partition:
    """Full multi-level run; returns a partition of g with dense community ids.

    Deterministic for a fixed config. Isolated vertices never gain from a
    move and therefore stay in their own singleton communities.
    """
    cfg = cfg or LouvainConfig()
    if g.m == 0:
        raise ValueError("louvain needs at least one edge")
    current = np.arange(g.n, dtype=np.int32)  # original vertex -> level vertex
    level = g
    for _ in range(cfg.max_levels):
        p_level = Partition.singletons(level)
        p_level, _gained = local_move_phase(level, p_level, cfg)
        if p_level.live_count == level.n:
            break
        ag = aggregate(level, p_level)
        p_level = None  # release before the next level allocates
        current = ag.mapping[current]
        level = ag
        if level.n == 1:
            break
    return Partition.from_assignment(g, current)
