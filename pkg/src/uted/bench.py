"""Benchmarks: compiled vs pure kernels, and engine scaling.

The two kernel lanes export identical functions, so the comparison runs
both on the same inputs in one process.  Engine scaling uses whichever
lane is active.
"""

from __future__ import annotations

import time

import numpy as np

from . import _core_py
from ._kernel import KERNEL_KIND, kernel
from .cubic import EngineContext, compute_S_cubic
from .trees import random_tree


def _time(fn, *args, repeat: int = 3) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def kernel_lane_rows(n_edges: int = 24, seed: int = 0) -> list[tuple[str, float, float]]:
    """(name, compiled_or_active_s, pure_s) rows for the hot kernels."""
    t = random_tree(n_edges, seed=seed)
    q = random_tree(n_edges, seed=seed + 1)
    ctx = EngineContext(q)
    a = compute_S_cubic(t, q, ctx=ctx)
    b = compute_S_cubic(random_tree(n_edges, seed=seed + 2), q, ctx=ctx)
    ra, rb = a.raw(), b.raw()
    t_a, t_b = 2 * n_edges, 2 * n_edges
    eta = ctx.eta_row(0)

    rows = []
    rows.append((
        f"mul_bounded side={a.side}",
        _time(kernel.mul_bounded_kernel, ra, rb, a.l, t_a, t_b),
        _time(_core_py.mul_bounded_kernel, ra, rb, a.l, t_a, t_b),
    ))
    rows.append((
        f"case_b side={a.side}",
        _time(kernel.case_b_kernel, ra, a.l, ctx.occ, eta),
        _time(_core_py.case_b_kernel, ra, a.l, ctx.occ, eta),
    ))
    fa = kernel.fix_invalid_kernel(ra, a.l)
    fb = kernel.fix_invalid_kernel(rb, b.l)
    rows.append((
        f"bd_product_naive side={a.side}",
        _time(kernel.bd_product_naive_kernel, fa, fb),
        _time(_core_py.bd_product_naive_kernel, fa, fb),
    ))
    g = ra.copy()
    rows.append((
        f"sweep side={a.side}",
        _time(kernel.sweep_inplace, g),
        _time(_core_py.sweep_inplace, g),
    ))
    return rows


def engine_scaling(sizes: list[int], seed: int = 0, backend: str = "persistent",
                   pairs: int = 1) -> tuple[list[tuple[int, float]], float]:
    """Median cubic-engine wall time per size and the log-log slope."""
    rows = []
    for n in sizes:
        samples = []
        for p in range(pairs):
            t = random_tree(n, seed=seed + 2 * p)
            q = random_tree(n, seed=seed + 2 * p + 1)
            t0 = time.perf_counter()
            compute_S_cubic(t, q, backend=backend)
            samples.append(time.perf_counter() - t0)
        rows.append((n, float(np.median(samples))))
    xs = np.log([float(n) for n, _ in rows])
    ys = np.log([max(s, 1e-9) for _, s in rows])
    slope = float(np.polyfit(xs, ys, 1)[0]) if len(rows) > 1 else float("nan")
    return rows, slope


def format_report(n_edges: int, sizes: list[int], seed: int = 0, pairs: int = 1) -> str:
    out = [f"active kernel lane: {KERNEL_KIND}"]
    out.append("kernel\tactive_s\tpure_s\tspeedup")
    for name, fast, pure in kernel_lane_rows(n_edges, seed):
        ratio = pure / fast if fast > 0 else float("inf")
        out.append(f"{name}\t{fast:.4f}\t{pure:.4f}\t{ratio:.1f}x")
    if sizes:
        rows, slope = engine_scaling(sizes, seed=seed, pairs=pairs)
        out.append("")
        out.append("engine scaling (cubic, persistent backend)")
        out.append("edges\tseconds")
        for n, s in rows:
            out.append(f"{n}\t{s:.3f}")
        out.append(f"log-log slope\t{slope:.3f}")
    return "\n".join(out) + "\n"
