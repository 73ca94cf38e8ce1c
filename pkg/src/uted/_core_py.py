"""Pure-Python kernels for the similarity-matrix computation model.

Everything here operates on "raw grids": ``(side+1, side+1)`` int32 arrays
with 1-based indexing (row/column 0 unused, kept at -inf).  A raw grid
stores a row/column-monotone completion of the matrix; the *valid band*
``i <= j <= i+l`` is the authoritative part and all query helpers mask
reads to it.

Updates are corner stamps: a stamp ``(i', j', x)`` raises every cell
``{i <= i', j >= j'}`` to at least ``x``.  Builders record stamps as point
maxima at their corners and apply them in one dominance sweep at the end,
which is equivalent because no builder reads the grid it is writing.

The compiled module ``uted._core`` exports the same names; this module is
the fallback and the reference for lane-equivalence tests.
"""

from __future__ import annotations

import numpy as np

NEG_INF = -(1 << 30)

KERNEL_KIND = "pure"


def grid_new(side: int) -> np.ndarray:
    g = np.full((side + 1, side + 1), NEG_INF, dtype=np.int32)
    return g


def grid_stamp(raw: np.ndarray, i: int, j: int, x: int) -> None:
    """Eagerly apply one corner stamp: raise ``{<=i} x {>=j}`` to ``x``."""
    side = raw.shape[0] - 1
    if i < 1 or j > side:
        return
    region = raw[1 : i + 1, j:]
    np.maximum(region, np.int32(x), out=region)


def sweep_inplace(raw: np.ndarray) -> None:
    """Dominance closure: each cell absorbs its lower and left neighbors.

    Turns corner point-stamps into their full rectangular effect; leaves
    already-monotone content unchanged.
    """
    side = raw.shape[0] - 1
    for i in range(side, 0, -1):
        row = raw[i]
        if i < side:
            np.maximum(row, raw[i + 1], out=row)
        np.maximum.accumulate(row[1:], out=row[1:])


def q_value(raw: np.ndarray, l: int, i: int, j: int) -> int:
    side = raw.shape[0] - 1
    if i < 1 or j < 1 or i > side or j > side or j < i or j - i > l:
        return NEG_INF
    return int(raw[i, j])


def q_mincol(raw: np.ndarray, l: int, i: int, x: int) -> int:
    """Smallest j with masked value >= x in row i, or 0 if none."""
    side = raw.shape[0] - 1
    if i < 1 or i > side:
        return 0
    lo, hi = i, min(side, i + l)
    if lo > hi or raw[i, hi] < x:
        return 0
    while lo < hi:
        mid = (lo + hi) // 2
        if raw[i, mid] >= x:
            hi = mid
        else:
            lo = mid + 1
    return lo


def q_maxrow(raw: np.ndarray, l: int, j: int, x: int) -> int:
    """Largest i with masked value >= x in column j, or 0 if none."""
    side = raw.shape[0] - 1
    if j < 1 or j > side:
        return 0
    lo, hi = max(1, j - l), j
    if lo > hi or raw[lo, j] < x:
        return 0
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if raw[mid, j] >= x:
            lo = mid
        else:
            hi = mid - 1
    return lo


def max_valid(raw: np.ndarray, l: int) -> int:
    """Largest value on the valid band (NEG_INF when the band is empty)."""
    side = raw.shape[0] - 1
    best = NEG_INF
    for i in range(1, side + 1):
        hi = min(side, i + l)
        if hi >= i:
            best = max(best, int(raw[i, i : hi + 1].max()))
    return best


def mul_bounded_kernel(
    rawA: np.ndarray, rawB: np.ndarray, l: int, t_a: int, t_b: int
) -> np.ndarray:
    """Threshold-probed (max,+) product of two similarity-matrix grids.

    For every column j and value guesses ``x <= t_b``, ``y <= t_a``, two
    chained maxrow probes locate the Pareto corner achieving those values
    and stamp the product cell.
    """
    side = rawA.shape[0] - 1
    C = grid_new(side)
    for j in range(1, side + 1):
        for x in range(t_b + 1):
            k = q_maxrow(rawB, l, j, x)
            if k == 0:
                break
            vb = int(rawB[k, j])
            for y in range(t_a + 1):
                i = q_maxrow(rawA, l, k, y)
                if i == 0:
                    break
                v = int(rawA[i, k]) + vb
                if v > C[i, j]:
                    C[i, j] = v
    sweep_inplace(C)
    return C


def case_b_kernel(
    raw_prev: np.ndarray, l: int, occ: np.ndarray, eta: np.ndarray
) -> np.ndarray:
    """Extend S(T'-ru) to S(T') for a single-child root edge ru.

    ``occ[e]`` holds the four 1-based tour positions of edge e; ``eta[e]``
    the match weight of ru against e.  Each consecutive occurrence pair
    contributes one stamp anchored at the pair.
    """
    side = raw_prev.shape[0] - 1
    C = raw_prev.copy()
    m = occ.shape[0]
    for e in range(m):
        w = int(eta[e])
        for c in range(3):
            p = int(occ[e, c])
            q = int(occ[e, c + 1])
            if q + 1 > side:
                continue
            inner = q_value(raw_prev, l, p + 1, q)
            if inner <= NEG_INF:
                continue
            v = inner + w
            if v > C[p, q + 1]:
                C[p, q + 1] = v
    sweep_inplace(C)
    return C


def restricted_kernel(
    side: int,
    l: int,
    occ: np.ndarray,
    eta_x: np.ndarray,
    limit: int,
    passes: list,
) -> np.ndarray:
    """Build the restricted matrix of one path edge from its tail matrices.

    Each pass is ``(rawL, rawR, rawMid)``: the flank matrices below the
    edge and the middle matrix (the already-extended core, or a deeper
    restricted matrix).  For every edge occurrence pair and every pair of
    flank cost guesses, probe the cheapest enclosing split and stamp the
    occurrence window.
    """
    out = grid_new(side)
    m = occ.shape[0]
    for rawL, rawR, rawMid in passes:
        for e in range(m):
            w = int(eta_x[e])
            for c in range(3):
                p = int(occ[e, c])
                q = int(occ[e, c + 1])
                if q + 1 > side:
                    continue
                # probe targets are reused across the cost grid
                for a in range(limit + 1):
                    i = q_mincol(rawL, l, p, a)
                    if i == 0:
                        break
                    vl = int(rawL[p, i])
                    for b in range(limit + 1):
                        j = q_maxrow(rawR, l, q, b)
                        if j == 0:
                            break
                        vm = q_value(rawMid, l, i, j)
                        if vm <= NEG_INF:
                            continue
                        v = w + vl + vm + int(rawR[j, q])
                        if v > out[p, q + 1]:
                            out[p, q + 1] = v
    sweep_inplace(out)
    return out


def hat_apply_kernel(
    raw_init: np.ndarray, l: int, occ: np.ndarray, limit: int, passes: list
) -> np.ndarray:
    """Fold restricted matrices of all path edges into the grown matrix.

    Each pass is ``(rawL, rawR, rawMid)`` for one path edge: the flank
    matrices above it and its restricted matrix.  Stamps extend windows
    beyond the forced occurrence pair by probed flank costs.
    """
    side = raw_init.shape[0] - 1
    C = raw_init.copy()
    m = occ.shape[0]
    for rawL, rawR, rawMid in passes:
        for e in range(m):
            for c in range(3):
                p = int(occ[e, c])
                q = int(occ[e, c + 1])
                if q + 1 > side:
                    continue
                vm = q_value(rawMid, l, p, q + 1)
                if vm <= NEG_INF:
                    continue
                for a in range(limit + 1):
                    i = q_maxrow(rawL, l, p, a)
                    if i == 0:
                        break
                    vl = int(rawL[i, p])
                    for b in range(limit + 1):
                        j = q_mincol(rawR, l, q + 1, b)
                        if j == 0:
                            break
                        v = vl + vm + int(rawR[q + 1, j])
                        if v > C[i, j]:
                            C[i, j] = v
    sweep_inplace(C)
    return C


def fix_invalid_kernel(raw: np.ndarray, l: int) -> np.ndarray:
    """Monotone completion of the invalid corner from the valid band.

    Valid cells and under-diagonal cells are kept; every invalid cell
    (i, j) becomes the maximum over valid cells (i', j') with
    i <= i' <= j' <= j, via ``max(out[i+1, j], out[i, j-1])`` walking away
    from the band -- which is exactly a band mask plus a dominance sweep.
    """
    side = raw.shape[0] - 1
    out = np.full((side + 1, side + 1), NEG_INF, dtype=np.int32)
    for i in range(1, side + 1):
        hi = min(side, i + l)
        out[i, i : hi + 1] = raw[i, i : hi + 1]
    sweep_inplace(out)
    return out


def bd_product_naive_kernel(rawA: np.ndarray, rawB: np.ndarray) -> np.ndarray:
    """Exact (max,+) product by the cubic triple loop; -inf is absorbing."""
    side = rawA.shape[0] - 1
    A = rawA.astype(np.int64)
    B = rawB.astype(np.int64)
    C = np.full((side + 1, side + 1), np.int64(2 * NEG_INF), dtype=np.int64)
    for i in range(1, side + 1):
        C[i, 1:] = (A[i, 1:, None] + B[1:, 1:]).max(axis=0)
    # anything that absorbed a -inf operand sits far below NEG_INF // 2
    out = np.where(C < NEG_INF // 2, NEG_INF, C).astype(np.int32)
    out[0, :] = NEG_INF
    out[:, 0] = NEG_INF
    return out
