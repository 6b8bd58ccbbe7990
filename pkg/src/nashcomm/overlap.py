"""Membership legitimacy: how strongly each vertex belongs to each community.

The legitimacy of vertex u toward community c is the number of u's edges
into c divided by a community size, so a vertex attracted by a community
scores high regardless of the community's absolute size. Two denominator
conventions are supported:

  - ``all``: every member of c except u itself;
  - ``opposite``: only members of the node type opposite to u, for block
    graphs built from bipartite inputs (a woman's legitimacy toward a
    community divides by that community's event count, and vice versa).

Positive reassignment gains flag the vertices whose current placement is
unstable; `unstable_vertices` lists them from a gain matrix.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .partition import Partition
from .reassignment import EPSILON, ReassignmentMatrix

__all__ = ["LegitimacyMatrix", "legitimacy", "legitimacy_matrix", "unstable_vertices", "write_matrix_csv"]


@dataclass(frozen=True)
class LegitimacyMatrix:
    """(community x vertex) legitimacy values with per-column argmax markers.

    ``flagged`` marks cells whose denominator was empty (legitimacy defined
    as 0 there). ``argmax`` holds, per vertex, the lowest community id
    attaining the column maximum.
    """

    values: np.ndarray
    argmax: np.ndarray
    flagged: np.ndarray


def _denominators(p: Partition, u: int, mode: str, type_split: int | None) -> np.ndarray:
    if mode == "all":
        denom = p.community_size.astype(np.int64).copy()
        denom[p.assignment[u]] -= 1  # u does not count toward its own community's size
        return denom
    if mode == "opposite":
        if type_split is None:
            raise ValueError("mode 'opposite' needs the block type split (r)")
        is_v = np.zeros(p.assignment.shape[0], dtype=bool)
        is_v[type_split:] = True
        opposite = ~is_v if u >= type_split else is_v
        return np.bincount(p.assignment[opposite], minlength=p.capacity).astype(np.int64)
    raise ValueError(f"unknown legitimacy mode {mode!r}")


def legitimacy(g, p: Partition, u: int, c: int, mode: str = "all", type_split: int | None = None) -> float:
    """Edges from u into community c, divided by the community size per mode.

    An empty denominator defines the value as 0.
    """
    if p.community_size[c] == 0:
        raise ValueError(f"community {c} is dead")
    nb = g.indices[g.indptr[u] : g.indptr[u + 1]]
    num = int(np.count_nonzero(p.assignment[nb] == c))
    den = int(_denominators(p, u, mode, type_split)[c])
    if den == 0:
        return 0.0
    return num / den


def legitimacy_matrix(g, p: Partition, mode: str = "all", type_split: int | None = None) -> LegitimacyMatrix:
    """Legitimacy of every (community, vertex) pair, with column argmaxes."""
    n = g.n
    cap = p.capacity
    nums = np.zeros((cap, n), dtype=np.float64)
    heads = np.repeat(np.arange(n, dtype=np.int64), np.diff(g.indptr))
    np.add.at(nums, (p.assignment[g.indices], heads), 1.0)

    if mode == "all":
        dens = np.repeat(p.community_size.astype(np.float64)[:, None], n, axis=1)
        dens[p.assignment, np.arange(n)] -= 1.0
    elif mode == "opposite":
        if type_split is None:
            raise ValueError("mode 'opposite' needs the block type split (r)")
        size_u = np.bincount(p.assignment[:type_split], minlength=cap).astype(np.float64)
        size_v = np.bincount(p.assignment[type_split:], minlength=cap).astype(np.float64)
        dens = np.empty((cap, n), dtype=np.float64)
        dens[:, :type_split] = size_v[:, None]
        dens[:, type_split:] = size_u[:, None]
    else:
        raise ValueError(f"unknown legitimacy mode {mode!r}")

    flagged = dens == 0
    vals = np.divide(nums, dens, out=np.zeros_like(nums), where=~flagged)
    vals[p.community_size == 0, :] = 0.0
    flagged[p.community_size == 0, :] = False
    live = p.live_communities()
    argmax = live[np.argmax(vals[live, :], axis=0)] if live.size else np.zeros(n, dtype=np.int64)
    return LegitimacyMatrix(values=vals, argmax=argmax, flagged=flagged)


def unstable_vertices(rmat: ReassignmentMatrix, epsilon: float = EPSILON) -> list[tuple[int, int, float]]:
    """Vertices with a positive best reassignment gain, best first.

    Returns (vertex, best target community, gain) sorted by gain descending
    (ties by vertex id).
    """
    vals = rmat.values
    col_max = vals.max(axis=0)
    out = []
    for w in np.nonzero(col_max > epsilon)[0]:
        out.append((int(w), int(np.argmax(vals[:, w])), float(col_max[w])))
    out.sort(key=lambda t: (-t[2], t[0]))
    return out


def write_matrix_csv(path, values: np.ndarray, p: Partition, labels: list[str], argmax: np.ndarray | None = None, decimals: int = 6) -> None:
    """Write a (community x vertex) matrix as CSV.

    Columns are vertex labels in id order; rows are live communities under
    their output (compacted) ids, values at fixed precision. When given,
    per-column argmax community ids are duplicated in a trailing marker
    row, also under output ids.
    """
    compact = p.compact_ids()
    live = p.live_communities()
    lines = ["community," + ",".join(labels)]
    for c in live:
        row = ",".join(f"{v:.{decimals}f}" for v in values[c, :])
        lines.append(f"{compact[int(c)]},{row}")
    if argmax is not None:
        lines.append("argmax," + ",".join(str(compact[int(c)]) for c in argmax))
    path.write_text("\n".join(lines) + "\n")
