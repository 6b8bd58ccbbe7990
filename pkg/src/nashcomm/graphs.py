"""Sparse binary graph containers and conversions between graph kinds.

Vertices are dense non-negative integers. A bipartite graph keeps its two
vertex sets apart (U indices in [0, r), V indices in [0, s)); its block
expansion lays both sets out on a single index range with U first, so block
vertex ``r + j`` is V vertex ``j``. That U-before-V layout is part of the
output contract and every consumer relies on it.

All graphs are unweighted: an edge either exists or it does not. Input
files may carry a weight column, but any weight other than 1 is rejected.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

__all__ = [
    "GraphInputError",
    "Graph",
    "BipartiteGraph",
    "LoadedInput",
    "build_graph",
    "build_bipartite",
    "to_block_unipartite",
    "directed_to_bipartite",
    "links_to_community",
    "load_graph_file",
    "load_labels",
]


class GraphInputError(ValueError):
    """Malformed edge input: self-loops, bad tokens, or out-of-range ids."""


def _freeze(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Graph:
    """Immutable undirected binary graph in CSR form.

    ``indices[indptr[i]:indptr[i+1]]`` is the sorted neighbor list of
    vertex ``i``. ``degree[i]`` equals the length of that slice and the
    degrees sum to ``2 * m``.
    """

    n: int
    indptr: np.ndarray
    indices: np.ndarray
    degree: np.ndarray
    m: int

    # Weighted duck-type interface shared with louvain.AggregateGraph.
    # A binary graph has unit edge weights and no self-loops.
    weights = None
    self_loops = None

    def neighbors(self, i: int) -> np.ndarray:
        return self.indices[self.indptr[i] : self.indptr[i + 1]]

    def has_edge(self, i: int, j: int) -> bool:
        nb = self.neighbors(i)
        k = int(np.searchsorted(nb, j))
        return k < nb.size and nb[k] == j

    def edges(self) -> np.ndarray:
        """All edges as an (m, 2) array with i < j, lexicographically sorted."""
        heads = np.repeat(np.arange(self.n, dtype=np.int64), self.degree)
        keep = heads < self.indices
        return np.column_stack([heads[keep], self.indices[keep]])


@dataclass(frozen=True)
class BipartiteGraph:
    """Immutable bipartite graph stored as a biadjacency CSR over U.

    ``indices[indptr[i]:indptr[i+1]]`` lists the V-neighbors of U vertex
    ``i``. Row margins are U degrees, column margins V degrees, and both
    sum to ``m``.
    """

    r: int
    s: int
    indptr: np.ndarray
    indices: np.ndarray
    row_margin: np.ndarray
    col_margin: np.ndarray
    m: int

    def v_neighbors(self, u: int) -> np.ndarray:
        return self.indices[self.indptr[u] : self.indptr[u + 1]]

    def edges(self) -> np.ndarray:
        """All (u, v) pairs, sorted by u then v."""
        heads = np.repeat(np.arange(self.r, dtype=np.int64), self.row_margin)
        return np.column_stack([heads, self.indices])


def _as_pair_array(edge_list, what: str) -> np.ndarray:
    pairs = np.asarray(list(edge_list) if not isinstance(edge_list, np.ndarray) else edge_list)
    if pairs.size == 0:
        return np.empty((0, 2), dtype=np.int64)
    if pairs.ndim != 2 or pairs.shape[1] != 2:
        raise GraphInputError(f"{what} must be a sequence of (i, j) pairs")
    if not np.issubdtype(pairs.dtype, np.integer):
        rounded = np.asarray(pairs, dtype=np.int64)
        if not np.array_equal(rounded, pairs):
            raise GraphInputError(f"{what} must contain integer vertex ids")
        pairs = rounded
    if pairs.min() < 0:
        bad = pairs[(pairs < 0).any(axis=1)][0]
        raise GraphInputError(f"negative vertex id in pair ({bad[0]}, {bad[1]})")
    return pairs.astype(np.int64, copy=False)


def _csr_from_halfedges(heads: np.ndarray, tails: np.ndarray, n: int):
    order = np.lexsort((tails, heads))
    heads = heads[order]
    tails = tails[order]
    counts = np.bincount(heads, minlength=n).astype(np.int64)
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])
    return indptr, tails.astype(np.int32), counts


def build_graph(edge_list, n: int | None = None) -> Graph:
    """Build an undirected graph from integer pairs.

    Duplicate edges collapse to one. Self-loops are rejected. Vertex count
    is ``max id + 1`` (so ids that never appear still exist, with degree 0)
    unless a larger ``n`` is given.
    """
    pairs = _as_pair_array(edge_list, "edge list")
    if pairs.shape[0]:
        loops = pairs[:, 0] == pairs[:, 1]
        if loops.any():
            v = int(pairs[loops][0, 0])
            raise GraphInputError(f"self-loop edge ({v}, {v}) is not allowed in an undirected graph")
        n_seen = int(pairs.max()) + 1
    else:
        n_seen = 0
    n = max(n_seen, 0 if n is None else int(n))

    lo = np.minimum(pairs[:, 0], pairs[:, 1])
    hi = np.maximum(pairs[:, 0], pairs[:, 1])
    keys = np.unique(lo * np.int64(n if n else 1) + hi)
    if n:
        lo, hi = keys // n, keys % n
    m = int(keys.size)
    heads = np.concatenate([lo, hi])
    tails = np.concatenate([hi, lo])
    indptr, indices, degree = _csr_from_halfedges(heads, tails, n)
    return Graph(n=n, indptr=_freeze(indptr), indices=_freeze(indices), degree=_freeze(degree), m=m)


def build_bipartite(edge_list, r: int, s: int) -> BipartiteGraph:
    """Build a bipartite graph from (u, v) pairs with u in [0, r), v in [0, s)."""
    pairs = _as_pair_array(edge_list, "bipartite edge list")
    if pairs.shape[0]:
        bad_u = pairs[:, 0] >= r
        bad_v = pairs[:, 1] >= s
        if bad_u.any() or bad_v.any():
            p = pairs[bad_u | bad_v][0]
            raise GraphInputError(f"edge ({p[0]}, {p[1]}) outside U x V ranges [0, {r}) x [0, {s})")
    # sorted unique keys give the CSR directly: v ascending within u ascending
    keys = np.unique(pairs[:, 0] * np.int64(max(s, 1)) + pairs[:, 1])
    u = keys // max(s, 1)
    v = (keys % max(s, 1)).astype(np.int32)
    m = int(keys.size)
    row_margin = np.bincount(u, minlength=r).astype(np.int64)
    indptr = np.zeros(r + 1, dtype=np.int64)
    np.cumsum(row_margin, out=indptr[1:])
    col_margin = np.bincount(v, minlength=s).astype(np.int64)
    return BipartiteGraph(
        r=int(r),
        s=int(s),
        indptr=_freeze(indptr),
        indices=_freeze(v),
        row_margin=_freeze(row_margin),
        col_margin=_freeze(col_margin),
        m=m,
    )


def to_block_unipartite(bg: BipartiteGraph) -> Graph:
    """Expand a bipartite graph into its block unipartite form.

    U vertex i keeps index i; V vertex j becomes index r + j. Every (u, v)
    edge becomes the undirected edge (u, r + v), so edge counts carry over
    and margins become degrees.
    """
    n = bg.r + bg.s
    # U rows reuse the biadjacency CSR (order preserved); V rows are its
    # transpose, materialized with one stable sort of the V column.
    u_heads = np.repeat(np.arange(bg.r, dtype=np.int32), bg.row_margin)
    order = np.argsort(bg.indices, kind="stable")
    indices = np.concatenate([bg.indices.astype(np.int32) + bg.r, u_heads[order]])
    degree = np.concatenate([bg.row_margin, bg.col_margin])
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(degree, out=indptr[1:])
    return Graph(n=n, indptr=_freeze(indptr), indices=_freeze(indices), degree=_freeze(degree), m=bg.m)


def directed_to_bipartite(edge_list, n: int) -> BipartiteGraph:
    """Reduce a directed graph to a bipartite one over out-roles and in-roles.

    Each vertex splits into an out-role (U, same index) and an in-role (V),
    and arc (src, dst) becomes biadjacency entry (src, dst), so r = s = n.
    Self-arcs are dropped with a warning carrying the dropped count.
    """
    pairs = _as_pair_array(edge_list, "arc list")
    if pairs.shape[0] and pairs.max() >= n:
        p = pairs[(pairs >= n).any(axis=1)][0]
        raise GraphInputError(f"arc ({p[0]}, {p[1]}) references vertex outside [0, {n})")
    loops = pairs.shape[0] and pairs[:, 0] == pairs[:, 1]
    dropped = int(np.count_nonzero(loops)) if pairs.shape[0] else 0
    if dropped:
        pairs = pairs[~loops]
        warnings.warn(f"dropped {dropped} self-arc(s) in directed input", stacklevel=2)
    return build_bipartite(pairs, r=n, s=n)


def links_to_community(g, p, w: int, c: int):
    """Number (or weight) of edges between vertex w and members of community c.

    w's own membership does not enter the count; only its neighbors'
    assignments matter. Works on both binary graphs and weighted aggregate
    graphs (returning an int for the former).
    """
    nb = g.indices[g.indptr[w] : g.indptr[w + 1]]
    mask = p.assignment[nb] == c
    if g.weights is None:
        return int(np.count_nonzero(mask))
    return g.weights[g.indptr[w] : g.indptr[w + 1]][mask].sum()


# ---------------------------------------------------------------------------
# Edge-list file format
#
#   - one edge per line, whitespace-separated integer ids
#   - optional third column: weight, which must be 1
#   - '#' starts a comment line
#   - bipartite files start with a header line '%bipartite r s'
#   - directed files start with a header line '%directed n'
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LoadedInput:
    """A parsed input file, normalized to block-unipartite analysis form."""

    kind: str  # "unipartite" | "bipartite" | "directed"
    graph: Graph  # block graph for bipartite/directed inputs
    bipartite: BipartiteGraph | None
    labels: list[str] | None  # sidecar labels, if present
    type_split: int | None  # r for block graphs, None for unipartite
    dropped_self_loops: int

    def label_strings(self) -> list[str]:
        """Sidecar labels, or generated defaults (built on demand: they can
        outweigh the graph itself on large inputs)."""
        if self.labels is not None:
            return self.labels
        if self.type_split is None:
            return [str(i) for i in range(self.graph.n)]
        r, s = self.bipartite.r, self.bipartite.s
        if self.kind == "directed":
            return [f"{i}>" for i in range(r)] + [f">{j}" for j in range(s)]
        return [f"U{i}" for i in range(r)] + [f"V{j}" for j in range(s)]


def _parse_lines(path: Path):
    """Stream the file into flat endpoint arrays (no per-line objects kept)."""
    from array import array

    header = None
    us = array("q")
    vs = array("q")
    with path.open() as fh:
        for ln, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if line.startswith("%"):
                if header is not None or us:
                    raise GraphInputError(f"{path.name}:{ln}: header line must come first")
                header = (ln, line)
                continue
            toks = line.split()
            if len(toks) not in (2, 3):
                raise GraphInputError(f"{path.name}:{ln}: expected 'i j' or 'i j w', got {raw!r}")
            try:
                i, j = int(toks[0]), int(toks[1])
            except ValueError:
                raise GraphInputError(f"{path.name}:{ln}: malformed vertex id in {raw!r}") from None
            if len(toks) == 3:
                try:
                    w = float(toks[2])
                except ValueError:
                    raise GraphInputError(f"{path.name}:{ln}: malformed weight in {raw!r}") from None
                if w != 1:
                    raise GraphInputError(f"{path.name}:{ln}: weighted edges are not supported (weight {toks[2]})")
            us.append(i)
            vs.append(j)
    if us:
        pairs = np.column_stack([np.frombuffer(us, dtype=np.int64), np.frombuffer(vs, dtype=np.int64)])
    else:
        pairs = np.empty((0, 2), dtype=np.int64)
    return header, pairs


def load_labels(path: Path, expected: int | None = None) -> list[str] | None:
    """Read a one-label-per-line sidecar file, if present next to the input.

    For a graph file ``g.txt`` the sidecar is ``g.txt.labels``; line k holds
    the label of dense vertex k (for block graphs: U labels first, then V).
    """
    side = Path(str(path) + ".labels")
    if not side.exists():
        return None
    labels = [ln.strip() for ln in side.read_text().splitlines() if ln.strip()]
    if expected is not None and len(labels) != expected:
        raise GraphInputError(f"{side.name}: expected {expected} labels, found {len(labels)}")
    return labels


def load_graph_file(path, kind: str = "auto") -> LoadedInput:
    """Parse an edge-list file into analysis-ready graphs.

    ``kind`` is normally resolved from the header line; passing an explicit
    kind rejects inputs whose header disagrees.
    """
    path = Path(path)
    header, pairs = _parse_lines(path)

    detected = "unipartite"
    header_args: list[int] = []
    if header is not None:
        ln, line = header
        toks = line[1:].split()
        if not toks or toks[0] not in ("bipartite", "directed"):
            raise GraphInputError(f"{path.name}:{ln}: unknown header {line!r}")
        detected = toks[0]
        try:
            header_args = [int(t) for t in toks[1:]]
        except ValueError:
            raise GraphInputError(f"{path.name}:{ln}: malformed header arguments in {line!r}") from None
        want = 2 if detected == "bipartite" else 1
        if len(header_args) != want:
            raise GraphInputError(f"{path.name}:{ln}: header %{detected} takes {want} argument(s)")
    if kind != "auto" and kind != detected:
        raise GraphInputError(f"{path.name}: requested kind '{kind}' but file is '{detected}'")

    dropped = 0
    if detected == "unipartite":
        if not pairs.shape[0]:
            raise GraphInputError(f"{path.name}: no edges found")
        g = build_graph(pairs)
        return LoadedInput("unipartite", g, None, load_labels(path, g.n), None, 0)
    if detected == "bipartite":
        r, s = header_args
        bg = build_bipartite(pairs, r, s)
    else:
        nv = header_args[0]
        dropped = int(np.count_nonzero(pairs[:, 0] == pairs[:, 1])) if pairs.shape[0] else 0
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            bg = directed_to_bipartite(pairs, nv)
    g = to_block_unipartite(bg)
    return LoadedInput(detected, g, bg, load_labels(path, g.n), bg.r, dropped)
