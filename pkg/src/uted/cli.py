"""Command-line interface.

Subcommands: distance, gen, sweep, census, dump-matrix, bench.
Exit codes: 0 success, 1 usage or parse error, 2 verification mismatch,
3 internal assertion failure.  All randomness flows from --seed, and the
stdout of every subcommand except bench is byte-deterministic given
(inputs, seed, flags); timings go to stderr.
"""

from __future__ import annotations

import argparse
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

from . import oracle
from .cubic import compute_S_cubic, rooting_distances_from_matrix
from .simmatrix import dump_csv, first_valid_mismatch
from .subcubic import EngineConfig, compute_S_subcubic, transition_census
from .trees import TreeParseError, format_tree, parse_tree, random_tree

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_MISMATCH = 2
EXIT_INTERNAL = 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


@dataclass
class RunReport:
    """Result of one distance computation."""

    distance: int
    algorithm: str
    per_rooting: Optional[list[int]] = None
    census: Optional[dict] = None
    timing: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.per_rooting is not None and self.distance != min(self.per_rooting):
            raise AssertionError("distance is not the minimum of the rooting vector")


def run_distance(
    t1,
    t2,
    algo: str = "cubic",
    delta: Optional[int] = None,
    backend: str = "dense",
    bd: str = "naive",
    want_vector: bool = False,
    trace=None,
    seed: Optional[int] = None,
) -> RunReport:
    """Distance between the unrooted views of two parsed trees."""
    began = time.perf_counter()
    census = None
    if algo == "oracle":
        distance = oracle.unrooted_ted_oracle(t1, t2)
        vector = None
        if want_vector:
            from .trees import enumerate_rootings

            vector = [oracle.rooted_ted_oracle(t1, r) for r in enumerate_rootings(t2)]
            distance = min(vector)
    else:
        if algo == "cubic":
            s = compute_S_cubic(t1, t2, backend=backend)
        elif algo == "subcubic":
            from .subcubic import SubcubicStats

            stats = SubcubicStats()
            cfg = EngineConfig(delta=delta, bd_backend=bd, backend=backend, trace=trace, seed=seed)
            s = compute_S_subcubic(t1, t2, cfg, stats=stats)
            census = stats.census.as_dict()
        else:
            raise _UsageError(f"unknown algorithm {algo!r}")
        vector = rooting_distances_from_matrix(s, t1.n_edges, t2.n_edges)
        distance = min(vector)
        if not want_vector:
            vector = None
    timing = {"total_s": time.perf_counter() - began}
    return RunReport(distance, algo, vector, census, timing)


def _read_tree(path: str):
    if path == "-":
        return parse_tree(sys.stdin.read())
    with open(path, "r", encoding="utf-8") as fh:
        return parse_tree(fh.read())


def _cmd_distance(args) -> int:
    t1 = _read_tree(args.tree1)
    t2 = _read_tree(args.tree2)
    trace = open(args.trace, "w", encoding="utf-8") if args.trace else None
    try:
        if args.check:
            ref = compute_S_cubic(t1, t2, backend=args.backend)
            cfg = EngineConfig(delta=args.delta, bd_backend=args.bd, backend=args.backend,
                               trace=trace, seed=args.seed)
            got = compute_S_subcubic(t1, t2, cfg)
            mm = first_valid_mismatch(ref, got)
            if mm is not None:
                i, j, va, vb = mm
                print(
                    f"engine mismatch at cell ({i},{j}): cubic={va} subcubic={vb}\n"
                    f"tree1: {format_tree(t1)}\ntree2: {format_tree(t2)}",
                    file=sys.stderr,
                )
                return EXIT_MISMATCH
        report = run_distance(
            t1, t2, algo=args.algo, delta=args.delta, backend=args.backend,
            bd=args.bd, want_vector=args.all_rootings, trace=trace, seed=args.seed,
        )
    finally:
        if trace:
            trace.close()
    print(report.distance)
    if report.per_rooting is not None:
        print(" ".join(str(d) for d in report.per_rooting))
    print(f"time: {report.timing['total_s']:.3f}s", file=sys.stderr)
    return EXIT_OK


def _cmd_gen(args) -> int:
    tree = random_tree(args.edges, seed=args.seed, shape=args.shape, alphabet=args.alphabet)
    text = format_tree(tree)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return EXIT_OK


def _sweep_case(case) -> dict:
    idx, seed, max_edges, deltas, backend = case
    import random as _random

    rng = _random.Random(seed)
    t = random_tree(rng.randint(1, max_edges), seed=rng.randrange(1 << 30), alphabet=3)
    q = random_tree(rng.randint(1, max_edges), seed=rng.randrange(1 << 30), alphabet=3)
    ref = compute_S_cubic(t, q, backend=backend)
    vec = rooting_distances_from_matrix(ref, t.n_edges, q.n_edges)
    out = {"idx": idx, "t": format_tree(t), "q": format_tree(q), "fail": None}
    want = oracle.unrooted_ted_oracle(t, q)
    if min(vec) != want:
        out["fail"] = f"cubic distance {min(vec)} != oracle {want}"
        return out
    for delta in deltas:
        d = max(1, delta if delta > 0 else t.n_edges)
        got = compute_S_subcubic(t, q, EngineConfig(delta=d, backend=backend))
        mm = first_valid_mismatch(ref, got)
        if mm is not None:
            i, j, va, vb = mm
            out["fail"] = f"delta={d} cell ({i},{j}): cubic={va} subcubic={vb}"
            return out
    return out


def _cmd_sweep(args) -> int:
    deltas = [int(x) for x in args.deltas.split(",")] if args.deltas else [1, 2, 3, 0]
    cases = [
        (i, (args.seed * 1_000_003 + i) & 0x7FFFFFFF, args.max_edges, deltas, args.backend)
        for i in range(args.count)
    ]
    began = time.perf_counter()
    if args.jobs > 1 and args.count > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_sweep_case, cases, chunksize=8))
    else:
        results = [_sweep_case(c) for c in cases]
    results.sort(key=lambda r: r["idx"])
    for r in results:
        if r["fail"]:
            print(f"FAIL case {r['idx']}: {r['fail']}")
            print(f"tree1: {r['t']}")
            print(f"tree2: {r['q']}")
            print(f"time: {time.perf_counter() - began:.3f}s", file=sys.stderr)
            return EXIT_MISMATCH
    print(f"PASS {len(results)} pairs, deltas {','.join(str(d) if d > 0 else '|E|' for d in deltas)}")
    print(f"time: {time.perf_counter() - began:.3f}s", file=sys.stderr)
    return EXIT_OK


def _cmd_census(args) -> int:
    if (args.tree is None) == (args.gen is None):
        raise _UsageError("census needs exactly one of --tree or --gen")
    if args.tree:
        tree = _read_tree(args.tree)
    else:
        tree = random_tree(args.gen, seed=args.seed, shape=args.shape, alphabet=args.alphabet)
    deltas = [int(x) for x in args.deltas.split(",")]
    print("delta\ttype1\ttype2_large\ttype2_small\ttype2_base\tratio")
    for d in deltas:
        c = transition_census(tree, delta=d)
        ratio = c.total() * d / max(1, tree.n_edges)
        print(f"{d}\t{c.type1}\t{c.type2_large}\t{c.type2_small}\t{c.type2_base}\t{ratio:.3f}")
    return EXIT_OK


def _cmd_dump_matrix(args) -> int:
    t1 = _read_tree(args.tree1)
    t2 = _read_tree(args.tree2)
    if args.algo == "subcubic":
        s = compute_S_subcubic(t1, t2, EngineConfig(delta=args.delta, backend=args.backend))
    else:
        s = compute_S_cubic(t1, t2, backend=args.backend)
    text = dump_csv(s)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _cmd_bench(args) -> int:
    from .bench import format_report

    sizes = [int(x) for x in args.sizes.split(",")] if args.sizes else []
    sys.stdout.write(format_report(args.edges, sizes, seed=args.seed, pairs=args.pairs))
    return EXIT_OK


def _build_parser() -> _Parser:
    p = _Parser(prog="uted", description="unrooted tree edit distance")
    sub = p.add_subparsers(dest="cmd", required=True)

    d = sub.add_parser("distance", help="distance between two tree files ('-' for stdin)")
    d.add_argument("tree1")
    d.add_argument("tree2")
    d.add_argument("--algo", choices=["cubic", "subcubic", "oracle"], default="cubic")
    d.add_argument("--delta", type=int, default=None)
    d.add_argument("--all-rootings", action="store_true")
    d.add_argument("--check", action="store_true",
                   help="cross-run cubic vs subcubic and fail on any valid-cell mismatch")
    d.add_argument("--backend", choices=["dense", "persistent"], default="dense")
    d.add_argument("--bd", choices=["naive"], default="naive")
    d.add_argument("--trace", default=None, help="write per-transition TSV trace to this file")
    d.add_argument("--seed", type=int, default=0)
    d.set_defaults(fn=_cmd_distance)

    g = sub.add_parser("gen", help="generate a random tree")
    g.add_argument("--edges", "-n", type=int, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--shape", choices=["random", "path", "star", "caterpillar"], default="random")
    g.add_argument("--alphabet", type=int, default=4)
    g.add_argument("--out", default=None)
    g.set_defaults(fn=_cmd_gen)

    s = sub.add_parser("sweep", help="oracle vs cubic vs subcubic on random pairs")
    s.add_argument("--count", type=int, default=100)
    s.add_argument("--max-edges", type=int, default=10)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--deltas", default=None, help="comma list; 0 means |E(T)|")
    s.add_argument("--backend", choices=["dense", "persistent"], default="dense")
    s.add_argument("--jobs", type=int, default=4)
    s.set_defaults(fn=_cmd_sweep)

    c = sub.add_parser("census", help="transition counts per block size")
    c.add_argument("--tree", default=None)
    c.add_argument("--gen", type=int, default=None, help="generate a tree with this many edges")
    c.add_argument("--shape", choices=["random", "path", "star", "caterpillar"], default="random")
    c.add_argument("--alphabet", type=int, default=4)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--deltas", required=True)
    c.set_defaults(fn=_cmd_census)

    m = sub.add_parser("dump-matrix", help="similarity matrix as CSV")
    m.add_argument("tree1")
    m.add_argument("tree2")
    m.add_argument("--algo", choices=["cubic", "subcubic"], default="cubic")
    m.add_argument("--delta", type=int, default=None)
    m.add_argument("--backend", choices=["dense", "persistent"], default="dense")
    m.add_argument("--out", default=None)
    m.set_defaults(fn=_cmd_dump_matrix)

    b = sub.add_parser("bench", help="compiled vs pure kernel lanes; engine scaling")
    b.add_argument("--edges", type=int, default=24, help="tree size for kernel microbenches")
    b.add_argument("--sizes", default=None, help="comma list of engine scaling sizes")
    b.add_argument("--pairs", type=int, default=1)
    b.add_argument("--seed", type=int, default=0)
    b.set_defaults(fn=_cmd_bench)

    return p


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return args.fn(args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (TreeParseError, oracle.SizeGuardError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except AssertionError as exc:
        print(f"internal assertion failed: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
