"""Bundled benchmark graphs and a synthetic bipartite generator.

Three public-domain classics ship as edge-list files: the Zachary karate
club (34 vertices, 78 edges), the Doubtful Sound dolphin social network
(62, 159) and the Davis Southern Women participation data (18 women x 14
events, 89 attendances). The generator produces photo/tag-shaped bipartite
graphs - many degree-1 or degree-2 V vertices attached to a smaller set of
U vertices with planted blocks - for scalability runs where no public
dataset of the right size is redistributable.
"""

from __future__ import annotations

from importlib import resources
from pathlib import Path

import numpy as np

from .graphs import LoadedInput, load_graph_file

__all__ = ["data_path", "karate", "dolphins", "southern_women", "synthetic_phototag", "write_synthetic_file"]


def data_path(name: str) -> Path:
    """Filesystem path of a bundled dataset file."""
    return Path(str(resources.files("nashcomm.data").joinpath(name)))


def karate() -> LoadedInput:
    return load_graph_file(data_path("karate.txt"))


def dolphins() -> LoadedInput:
    return load_graph_file(data_path("dolphins.txt"))


def southern_women() -> LoadedInput:
    return load_graph_file(data_path("southern_women.txt"))


def synthetic_phototag(
    n_u: int,
    n_v: int,
    blocks: int,
    seed: int,
    mix: float = 0.05,
    deg_choices: tuple[int, ...] = (1, 2, 3),
    deg_probs: tuple[float, ...] = (0.72, 0.22, 0.06),
) -> np.ndarray:
    """Random bipartite (u, v) edge pairs with planted U-blocks.

    Each V vertex draws a few U endpoints (skewed to 1, like photos tagged
    with few people; pass a wider ``deg_choices`` for coauthorship-like
    shapes), mostly from its home block plus a ``mix`` fraction of global
    picks; within a block, popularity is skewed so a few U vertices become
    hubs. Deterministic for a fixed seed; duplicate pairs may occur and
    collapse at graph construction.
    """
    rng = np.random.default_rng(seed)
    block_of_u = rng.integers(0, blocks, size=n_u)
    # skewed popularity within the U set
    pop = rng.pareto(1.5, size=n_u) + 0.1
    order = np.argsort(block_of_u, kind="stable")
    u_sorted = order
    block_sorted = block_of_u[order]
    starts = np.searchsorted(block_sorted, np.arange(blocks + 1))

    deg = rng.choice(deg_choices, size=n_v, p=deg_probs)
    home = rng.integers(0, blocks, size=n_v)
    us = []
    vs = []
    for b in range(blocks):
        members = u_sorted[starts[b] : starts[b + 1]]
        if members.size == 0:
            continue
        w = pop[members]
        w = w / w.sum()
        vmask = home == b
        total = int(deg[vmask].sum())
        picks = rng.choice(members, size=total, p=w)
        vids = np.repeat(np.nonzero(vmask)[0], deg[vmask])
        us.append(picks)
        vs.append(vids)
    u = np.concatenate(us)
    v = np.concatenate(vs)
    stray = rng.random(u.size) < mix
    u[stray] = rng.integers(0, n_u, size=int(stray.sum()))
    return np.column_stack([u, v])


def write_synthetic_file(path, n_u: int, n_v: int, blocks: int, seed: int, **kwargs) -> Path:
    """Write a synthetic bipartite graph in the edge-list file format."""
    pairs = synthetic_phototag(n_u, n_v, blocks, seed, **kwargs)
    path = Path(path)
    with path.open("w") as fh:
        fh.write(f"%bipartite {n_u} {n_v}\n")
        lines = "\n".join(f"{u} {v}" for u, v in pairs)
        fh.write(lines + "\n")
    return path
