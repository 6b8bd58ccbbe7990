"""Exact per-move modularity gains and best-response convergence.

The gain of reassigning vertex w from its community C1 to another live
community C2 is

    gain(w: C1 -> C2) = (l_w2 - l_w1) / m
                        - (k_w^2 + k_w (d_C2 - d_C1)) / (2 m^2)

where l_wi counts w's edges into C_i, d_C1 includes w and d_C2 does not.
This equals the modularity difference Q(after) - Q(before) exactly, which
makes Q an exact potential for the move game: repeatedly applying any
positive-gain move strictly increases Q, and since partitions are finitely
many the dynamics terminate in a state where no vertex can improve - a
Nash equilibrium of the reassignment game.

After w moves, every other vertex z's gains shift by a correction built
from a single per-pair quantity

    delta_z = ({w,z} - d_z d_w / 2m) / m      ({w,z} = 1 iff edge, else 0)

the shift being +2 delta_z for moves C1->C2, -2 delta_z for C2->C1,
+/- delta_z when exactly one endpoint community is C1 or C2, and 0
otherwise. Equivalently: a target gains +delta_z if it is C2, -delta_z if
it is C1, and the vertex's own side contributes the negated term. This is
what `apply_move_delta` implements; the mover's own column is recomputed
outright.
"""

from __future__ import annotations

import bisect
from array import array
from dataclasses import dataclass, field

import numpy as np

from .modularity import modularity
from .partition import Partition

__all__ = [
    "EPSILON",
    "MoveStep",
    "EquilibriumTrace",
    "EquilibriumCapError",
    "ReassignmentMatrix",
    "reassignment_gain",
    "reassignment_matrix",
    "move_delta",
    "apply_move_delta",
    "best_response_step",
    "to_nash_equilibrium",
    "is_nash_equilibrium",
]

# Gains in (0, EPSILON] count as zero: they are float noise, not incentives.
EPSILON = 1e-12


@dataclass(frozen=True, slots=True)
class MoveStep:
    vertex: int
    source: int
    target: int
    gain: float
    q_after: float


@dataclass
class EquilibriumTrace:
    """Ordered record of applied moves from a seed partition to equilibrium."""

    steps: list[MoveStep] = field(default_factory=list)
    seed_q: float = 0.0
    final_q: float = 0.0


class EquilibriumCapError(RuntimeError):
    """Safety cap exceeded; indicates a bookkeeping bug since Q is monotone."""

    def __init__(self, message: str, trace: EquilibriumTrace):
        super().__init__(message)
        self.trace = trace


@dataclass
class ReassignmentMatrix:
    """(community x vertex) matrix of reassignment gains.

    Row c, column w holds the gain of moving w from its current community
    to c; the entry at w's own community is exactly 0 and rows of dead
    communities are -inf so they never win a scan.
    """

    values: np.ndarray


def reassignment_gain(g, p: Partition, w: int, target: int) -> float:
    """Exact modularity change if w moved from its community to ``target``.

    Zero when target is w's own community; dead targets are not strategies
    and are rejected.
    """
    source = int(p.assignment[w])
    if target == source:
        return 0.0
    if p.community_size[target] == 0:
        raise ValueError(f"community {target} is dead; it cannot be a reassignment target")
    nb = g.indices[g.indptr[w] : g.indptr[w + 1]]
    nbc = p.assignment[nb]
    l_src = int(np.count_nonzero(nbc == source))
    l_tgt = int(np.count_nonzero(nbc == target))
    kw = float(g.degree[w])
    m = float(g.m)
    d_src = float(p.community_degree[source])
    d_tgt = float(p.community_degree[target])
    return (l_tgt - l_src) / m - (kw * kw + kw * (d_tgt - d_src)) / (2.0 * m * m)


def _gain_column(g, p: Partition, w: int) -> np.ndarray:
    """Gains of moving w to every community (dead rows -inf, own row 0)."""
    cap = p.capacity
    nb = g.indices[g.indptr[w] : g.indptr[w + 1]]
    links = np.bincount(p.assignment[nb], minlength=cap).astype(np.float64)
    source = int(p.assignment[w])
    kw = float(g.degree[w])
    m = float(g.m)
    d = p.community_degree.astype(np.float64)
    col = (links - links[source]) / m - (kw * kw + kw * (d - d[source])) / (2.0 * m * m)
    col[source] = 0.0
    col[p.community_size == 0] = -np.inf
    return col


def reassignment_matrix(g, p: Partition) -> ReassignmentMatrix:
    """Gain of every (vertex, community) reassignment under the current p."""
    n = g.n
    cap = p.capacity
    m = float(g.m)
    links = np.zeros((cap, n), dtype=np.float64)
    heads = np.repeat(np.arange(n, dtype=np.int64), np.diff(g.indptr))
    np.add.at(links, (p.assignment[g.indices], heads), 1.0)
    cols = np.arange(n)
    l_own = links[p.assignment, cols]
    k = g.degree.astype(np.float64)
    d = p.community_degree.astype(np.float64)
    d_own = d[p.assignment]
    vals = (links - l_own) / m - (k * k + k * (d[:, None] - d_own)) / (2.0 * m * m)
    vals[p.assignment, cols] = 0.0
    vals[p.community_size == 0, :] = -np.inf
    return ReassignmentMatrix(vals)


def move_delta(g, w: int) -> np.ndarray:
    """Per-vertex correction unit delta_z = ({w,z} - d_z d_w / 2m) / m."""
    m = float(g.m)
    kw = float(g.degree[w])
    dr = g.degree.astype(np.float64) * (-kw / (2.0 * m * m))
    nb = g.indices[g.indptr[w] : g.indptr[w + 1]]
    dr[nb] += 1.0 / m
    return dr


def apply_move_delta(
    rmat: ReassignmentMatrix, g, p: Partition, moved: int, source: int, target: int, audit: bool = False
) -> ReassignmentMatrix:
    """Update rmat in place after ``moved`` went source -> target.

    ``p`` must already reflect the move while ``rmat`` still holds the
    pre-move gains. Every column shifts by the correction table; the
    mover's own column is recomputed from scratch, and a community left
    empty stops being a row of the live matrix.
    """
    dr = move_delta(g, moved)
    vals = rmat.values
    vals[source, :] -= dr
    vals[target, :] += dr
    mem_src = p.members(source)
    mem_tgt = p.members(target)
    mem_tgt = mem_tgt[mem_tgt != moved]
    vals[:, mem_src] += dr[mem_src]
    vals[:, mem_tgt] -= dr[mem_tgt]
    # own-community entries must stay exactly zero, not rounding residue
    vals[p.assignment[mem_src], mem_src] = 0.0
    vals[p.assignment[mem_tgt], mem_tgt] = 0.0
    vals[:, moved] = _gain_column(g, p, moved)
    vals[p.community_size == 0, :] = -np.inf
    if audit:
        fresh = reassignment_matrix(g, p).values
        worst = float(np.max(np.abs(np.where(np.isfinite(vals), vals - fresh, 0.0))))
        if worst > 1e-9:
            raise AssertionError(
                f"incremental reassignment matrix inconsistent after move "
                f"{moved}: {source}->{target} (max deviation {worst:.3e})"
            )
    return rmat


def best_response_step(g, p: Partition, rmat: ReassignmentMatrix, epsilon: float = EPSILON) -> MoveStep | None:
    """Apply the single best positive-gain move, if any.

    Selection is the globally maximal gain; ties break to the lowest
    vertex id, then the lowest target community id. Mutates p and rmat;
    returns None at equilibrium.
    """
    col_max = rmat.values.max(axis=0)
    w = int(np.argmax(col_max))
    gain = float(col_max[w])
    if not (gain > epsilon):
        return None
    target = int(np.argmax(rmat.values[:, w]))
    source = int(p.assignment[w])
    p.move(g, w, target)
    q_after = modularity(g, p)
    apply_move_delta(rmat, g, p, w, source, target)
    return MoveStep(vertex=w, source=source, target=target, gain=gain, q_after=q_after)


# ---------------------------------------------------------------------------
# Sparse engine: per-vertex best responses without the dense matrix.
#
# For a vertex w, only communities holding a neighbor of w can receive it
# with a nonzero link term; among all others the gain is maximized by the
# live community of smallest total degree. Scanning neighbors plus one
# lookup in a degree-sorted community list therefore finds w's exact best
# response in O(deg(w)) amortized, which keeps large runs inside O(m) per
# sweep instead of O(n * communities).
# ---------------------------------------------------------------------------


class _SweepState:
    def __init__(self, g, p: Partition):
        self.g = g
        self.n = g.n
        self.m = float(g.m)
        self.inv_m = 1.0 / self.m
        self.inv_2m2 = 1.0 / (2.0 * self.m * self.m)
        self.indptr = g.indptr
        self.indices = g.indices
        self.k = g.degree.tolist()
        self.comm = array("i", p.assignment.tolist())
        self.d_comm = p.community_degree
        self.e_comm = p.community_edges
        self.size = p.community_size
        self.by_degree = sorted(
            (int(self.d_comm[c]), c) for c in np.nonzero(self.size)[0].tolist()
        )

    def best_move(self, u: int) -> tuple[float, int]:
        comm = self.comm
        cu = comm[u]
        acc: dict[int, int] = {}
        for v in self.indices[self.indptr[u] : self.indptr[u + 1]].tolist():
            cv = comm[v]
            acc[cv] = acc.get(cv, 0) + 1
        l_own = acc.get(cu, 0)
        ku = self.k[u]
        d_cu = self.d_comm[cu]
        base = ku * ku - ku * d_cu
        best_gain = 0.0
        best_t = -1
        for t, lt in acc.items():
            if t == cu:
                continue
            gain = (lt - l_own) * self.inv_m - (base + ku * self.d_comm[t]) * self.inv_2m2
            if gain > best_gain or (gain == best_gain and best_t != -1 and t < best_t):
                best_gain = gain
                best_t = t
        # best non-neighbor target: smallest-degree live community not already tried
        for d, c in self.by_degree:
            if c == cu or c in acc:
                continue
            gain = (0 - l_own) * self.inv_m - (base + ku * d) * self.inv_2m2
            if gain > best_gain or (gain == best_gain and best_t != -1 and c < best_t):
                best_gain = gain
                best_t = c
            break
        return best_gain, best_t

    def apply(self, u: int, target: int) -> None:
        cu = self.comm[u]
        l_own = 0
        l_tgt = 0
        comm = self.comm
        for v in self.indices[self.indptr[u] : self.indptr[u + 1]].tolist():
            cv = comm[v]
            if cv == cu:
                l_own += 1
            elif cv == target:
                l_tgt += 1
        ku = self.k[u]
        for c, de, dd, ds in ((cu, -l_own, -ku, -1), (target, l_tgt, ku, 1)):
            i = bisect.bisect_left(self.by_degree, (int(self.d_comm[c]), c))
            del self.by_degree[i]
            self.e_comm[c] += de
            self.d_comm[c] += dd
            self.size[c] += ds
            if self.size[c] > 0:
                bisect.insort(self.by_degree, (int(self.d_comm[c]), c))
        comm[u] = target

    def community_term(self, c: int) -> float:
        d = float(self.d_comm[c]) * self.inv_m * 0.5
        return float(self.e_comm[c]) * self.inv_m - d * d

    def write_back(self, p: Partition) -> None:
        p.assignment[:] = self.comm


def _sweep_to_equilibrium(g, p: Partition, epsilon: float, cap: int, q_seed: float) -> list[MoveStep]:
    state = _SweepState(g, p)
    steps: list[MoveStep] = []
    q = q_seed
    while True:
        moved_any = False
        for u in range(state.n):
            gain, target = state.best_move(u)
            if target == -1 or not (gain > epsilon):
                continue
            source = state.comm[u]
            before = state.community_term(source) + state.community_term(target)
            state.apply(u, target)
            q += state.community_term(source) + state.community_term(target) - before
            steps.append(MoveStep(vertex=u, source=source, target=target, gain=gain, q_after=q))
            moved_any = True
            if len(steps) > cap:
                state.write_back(p)
                trace = EquilibriumTrace(steps, q_seed, q)
                raise EquilibriumCapError(f"equilibrium loop exceeded safety cap of {cap} moves", trace)
        if not moved_any:
            break
    state.write_back(p)
    return steps


def to_nash_equilibrium(
    g,
    p0: Partition,
    epsilon: float = EPSILON,
    max_steps: int | None = None,
    policy: str = "auto",
    audit_every: int = 0,
) -> tuple[Partition, EquilibriumTrace]:
    """Drive a partition to a Nash equilibrium of the reassignment game.

    ``policy`` "steepest" applies the globally best move per step through
    the incrementally updated gain matrix; "sweep" repeatedly applies each
    vertex's own best response in ascending id order, which needs no dense
    matrix and is the default for large inputs. Both terminate because
    every applied move strictly increases Q. Returns the equilibrium
    partition (the seed is not mutated) and the move trace.
    """
    p = p0.copy()
    seed_q = modularity(g, p)
    cap = int(max_steps) if max_steps is not None else 10 * max(g.n, 1) * max(p.live_count, 1)
    if policy == "auto":
        policy = "steepest" if p.capacity * max(g.n, 1) <= 4_000_000 else "sweep"
    if policy == "steepest":
        steps: list[MoveStep] = []
        rmat = reassignment_matrix(g, p)
        while (step := best_response_step(g, p, rmat, epsilon=epsilon)) is not None:
            steps.append(step)
            if len(steps) > cap:
                raise EquilibriumCapError(
                    f"equilibrium loop exceeded safety cap of {cap} moves",
                    EquilibriumTrace(steps, seed_q, step.q_after),
                )
            if audit_every and len(steps) % audit_every == 0:
                fresh = reassignment_matrix(g, p).values
                bad = np.max(np.abs(np.where(np.isfinite(rmat.values), rmat.values - fresh, 0.0)))
                if bad > 1e-9:
                    raise AssertionError(f"gain matrix drifted from recomputation by {bad:.3e}")
    elif policy == "sweep":
        steps = _sweep_to_equilibrium(g, p, epsilon, cap, seed_q)
    else:
        raise ValueError(f"unknown policy {policy!r}")
    return p, EquilibriumTrace(steps, seed_q, modularity(g, p))


def is_nash_equilibrium(g, p: Partition, epsilon: float = EPSILON) -> bool:
    """True iff no vertex has a positive-gain reassignment anywhere."""
    if g.m == 0:
        return True
    state = _SweepState(g, p)
    for u in range(g.n):
        gain, target = state.best_move(u)
        if target != -1 and gain > epsilon:
            return False
    return True


def unstable_count(g, p: Partition, epsilon: float = EPSILON) -> int:
    """Number of vertices with a positive best gain, without a dense matrix."""
    if g.m == 0:
        return 0
    state = _SweepState(g, p)
    total = 0
    for u in range(g.n):
        gain, target = state.best_move(u)
        if target != -1 and gain > epsilon:
            total += 1
    return total
