"""End-to-end pipeline driver and command line entry point.

Reads an edge-list file, runs the Louvain seed, measures overlap and
instability, drives the partition to a Nash equilibrium, and writes the
artifacts: final partition, legitimacy and reassignment-gain matrices at
seed and at equilibrium, the move trace, and a key/value summary. Reruns
with an identical config produce byte-identical partition, matrix and
trace files; only the summary carries wall-clock times.
"""

from __future__ import annotations

import argparse
import os
import sys
import tempfile
import time
from dataclasses import dataclass, field
from pathlib import Path

from .graphs import GraphInputError, LoadedInput, load_graph_file
from .louvain import LouvainConfig, louvain
from .modularity import modularity
from .overlap import legitimacy_matrix, unstable_vertices, write_matrix_csv
from .partition import Partition
from .reassignment import (
    EPSILON,
    EquilibriumCapError,
    EquilibriumTrace,
    reassignment_matrix,
    to_nash_equilibrium,
    unstable_count,
)

__all__ = ["RunConfig", "RunSummary", "run", "emit_membership_matrix", "main"]

ALL_ARTIFACTS = ("partition", "legitimacy", "rm", "trace", "summary", "membership")

# beyond this many (community x vertex) cells, dense matrices are not emitted
DENSE_CELL_LIMIT = 4_000_000


@dataclass
class RunConfig:
    input: Path
    kind: str = "auto"
    out: Path = Path("out")
    epsilon: float = EPSILON
    max_steps: int | None = None
    min_gain: float = 1e-10
    max_levels: int = 32
    seed: int | None = None  # switches Louvain scan order to a seeded shuffle
    legitimacy_mode: str = "auto"  # auto -> opposite on block graphs, all otherwise
    ne_policy: str = "auto"
    emit: tuple[str, ...] = ALL_ARTIFACTS
    audit: bool = False


@dataclass
class RunSummary:
    n: int = 0
    m: int = 0
    kind: str = ""
    communities_seed: int = 0
    communities_final: int = 0
    q_seed: float = 0.0
    q_final: float = 0.0
    moves: int = 0
    unstable_seed: int = 0
    dropped_self_loops: int = 0
    timings: dict[str, float] = field(default_factory=dict)

    def lines(self) -> list[str]:
        out = [
            f"n: {self.n}",
            f"m: {self.m}",
            f"kind: {self.kind}",
            f"communities_seed: {self.communities_seed}",
            f"communities_final: {self.communities_final}",
            f"q_seed: {self.q_seed:.17g}",
            f"q_final: {self.q_final:.17g}",
            f"moves: {self.moves}",
            f"unstable_seed: {self.unstable_seed}",
        ]
        if self.dropped_self_loops:
            out.append(f"dropped_self_loops: {self.dropped_self_loops}")
        out += [f"time_{k}_s: {v:.3f}" for k, v in self.timings.items()]
        return out


def _atomic_write(path: Path, text: str) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _write_partition(path: Path, p: Partition, labels: list[str]) -> None:
    compact = p.compact_ids()
    lines = [f"{labels[v]}\t{compact[int(p.assignment[v])]}" for v in range(len(labels))]
    _atomic_write(path, "\n".join(lines) + "\n")


def _write_trace(path: Path, trace: EquilibriumTrace, labels: list[str]) -> None:
    lines = [
        f"# seed_q {trace.seed_q:.17g}",
        f"# final_q {trace.final_q:.17g}",
        "# step\tvertex\tfrom\tto\trm\tq_after",
    ]
    for i, s in enumerate(trace.steps):
        lines.append(f"{i}\t{labels[s.vertex]}\t{s.source}\t{s.target}\t{s.gain:.17g}\t{s.q_after:.17g}")
    _atomic_write(path, "\n".join(lines) + "\n")


def emit_membership_matrix(out_dir: Path, p: Partition, labels: list[str], type_split: int | None = None) -> list[Path]:
    """Write community-by-vertex 0/1 membership matrices.

    Columns follow ascending vertex id. Block graphs emit the U block and
    the V block as two separate matrices, as two node types cannot share
    one display matrix.
    """
    compact = p.compact_ids()
    live = p.live_communities()

    def render(vertex_ids) -> str:
        lines = ["community," + ",".join(labels[v] for v in vertex_ids)]
        for c in live:
            row = ",".join("1" if p.assignment[v] == c else "0" for v in vertex_ids)
            lines.append(f"{compact[int(c)]},{row}")
        return "\n".join(lines) + "\n"

    paths: list[Path] = []
    if type_split is None:
        path = out_dir / "membership.csv"
        _atomic_write(path, render(range(len(labels))))
        paths.append(path)
    else:
        for name, ids in (("membership_u.csv", range(type_split)), ("membership_v.csv", range(type_split, len(labels)))):
            path = out_dir / name
            _atomic_write(path, render(ids))
            paths.append(path)
    return paths


def run(cfg: RunConfig) -> RunSummary:
    """Execute the full pipeline and write the requested artifacts."""
    summary = RunSummary()
    t0 = time.perf_counter()
    loaded: LoadedInput = load_graph_file(cfg.input, cfg.kind)
    g = loaded.graph
    if g.m == 0:
        raise GraphInputError(f"{Path(cfg.input).name}: graph has no edges")
    summary.n, summary.m, summary.kind = g.n, g.m, loaded.kind
    summary.dropped_self_loops = loaded.dropped_self_loops
    labels = loaded.label_strings()
    summary.timings["parse"] = time.perf_counter() - t0

    out_dir = Path(cfg.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    emit = set(cfg.emit)

    t0 = time.perf_counter()
    scan = "seeded" if cfg.seed is not None else "fixed"
    lcfg = LouvainConfig(min_gain=cfg.min_gain, max_levels=cfg.max_levels, scan=scan, seed=cfg.seed)
    seed_p = louvain(g, lcfg)
    summary.communities_seed = seed_p.live_count
    summary.q_seed = modularity(g, seed_p)
    summary.timings["louvain"] = time.perf_counter() - t0

    mode = cfg.legitimacy_mode
    if mode == "auto":
        mode = "opposite" if loaded.type_split is not None else "all"

    t0 = time.perf_counter()
    dense_ok = seed_p.capacity * g.n <= DENSE_CELL_LIMIT
    if dense_ok:
        rmat_seed = reassignment_matrix(g, seed_p)
        summary.unstable_seed = len(unstable_vertices(rmat_seed, cfg.epsilon))
        if "rm" in emit:
            write_matrix_csv(out_dir / "rm_seed.csv", rmat_seed.values, seed_p, labels, decimals=9)
    else:
        summary.unstable_seed = unstable_count(g, seed_p, cfg.epsilon)
    if "legitimacy" in emit and dense_ok:
        lm = legitimacy_matrix(g, seed_p, mode, loaded.type_split)
        write_matrix_csv(out_dir / "legitimacy_seed.csv", lm.values, seed_p, labels, argmax=lm.argmax)
    summary.timings["overlap"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    try:
        final_p, trace = to_nash_equilibrium(
            g,
            seed_p,
            epsilon=cfg.epsilon,
            max_steps=cfg.max_steps,
            policy=cfg.ne_policy,
            audit_every=64 if cfg.audit else 0,
        )
    except EquilibriumCapError as err:
        if "trace" in emit:
            _write_trace(out_dir / "trace.txt", err.trace, labels)
        raise
    summary.timings["equilibrium"] = time.perf_counter() - t0
    summary.communities_final = final_p.live_count
    summary.q_final = trace.final_q
    summary.moves = len(trace.steps)

    t0 = time.perf_counter()
    if "partition" in emit:
        _write_partition(out_dir / "partition.txt", final_p, labels)
    if "trace" in emit:
        _write_trace(out_dir / "trace.txt", trace, labels)
    if dense_ok:
        if "rm" in emit:
            rmat_final = reassignment_matrix(g, final_p)
            write_matrix_csv(out_dir / "rm_final.csv", rmat_final.values, final_p, labels, decimals=9)
        if "legitimacy" in emit:
            lm_final = legitimacy_matrix(g, final_p, mode, loaded.type_split)
            write_matrix_csv(out_dir / "legitimacy_final.csv", lm_final.values, final_p, labels, argmax=lm_final.argmax)
    if "membership" in emit:
        emit_membership_matrix(out_dir, final_p, labels, loaded.type_split)
    summary.timings["emit"] = time.perf_counter() - t0

    if "summary" in emit:
        _atomic_write(out_dir / "summary.txt", "\n".join(summary.lines()) + "\n")
    return summary


def main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(prog="nashcomm", description=__doc__)
    ap.add_argument("--input", required=True, type=Path, help="edge-list file")
    ap.add_argument("--kind", default="auto", choices=["auto", "unipartite", "bipartite", "directed"])
    ap.add_argument("--out", default=Path("out"), type=Path, help="output directory")
    ap.add_argument("--epsilon", default=EPSILON, type=float, help="positive-gain threshold")
    ap.add_argument("--max-steps", default=None, type=int, help="equilibrium safety cap override")
    ap.add_argument("--min-gain", default=1e-10, type=float, help="Louvain sweep stopping threshold")
    ap.add_argument("--max-levels", default=32, type=int, help="Louvain aggregation level cap")
    ap.add_argument("--seed", default=None, type=int, help="shuffle Louvain scan order with this seed")
    ap.add_argument("--legitimacy-mode", default="auto", choices=["auto", "all", "opposite"])
    ap.add_argument("--ne-policy", default="auto", choices=["auto", "steepest", "sweep"])
    ap.add_argument("--emit", default=",".join(ALL_ARTIFACTS), help="comma list of artifacts to write")
    ap.add_argument("--audit", action="store_true", help="periodically recheck incremental state")
    args = ap.parse_args(argv)

    emit = tuple(s for s in args.emit.split(",") if s)
    bad = [s for s in emit if s not in ALL_ARTIFACTS]
    if bad:
        print(f"unknown artifact(s) in --emit: {', '.join(bad)}", file=sys.stderr)
        return 2
    cfg = RunConfig(
        input=args.input,
        kind=args.kind,
        out=args.out,
        epsilon=args.epsilon,
        max_steps=args.max_steps,
        min_gain=args.min_gain,
        max_levels=args.max_levels,
        seed=args.seed,
        legitimacy_mode=args.legitimacy_mode,
        ne_policy=args.ne_policy,
        emit=emit,
        audit=args.audit,
    )
    try:
        summary = run(cfg)
    except (GraphInputError, FileNotFoundError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except EquilibriumCapError as err:
        print(f"error: {err} (trace dumped)", file=sys.stderr)
        return 3
    for line in summary.lines():
        print(line)
    return 0


if __name__ == "__main__":
    sys.exit(main())
