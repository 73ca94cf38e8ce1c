# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels for the similarity-matrix computation model.

Same contract as ``uted._core_py`` (the authoritative docstrings live
there): raw grids are (side+1, side+1) int32 arrays, 1-based, band-masked
through the query helpers, built by corner point-stamps plus one
dominance sweep.
"""

import numpy as np

cimport cython
from libc.stdint cimport int32_t, int64_t

NEG_INF = -(1 << 30)
KERNEL_KIND = "compiled"

cdef int32_t C_NEG_INF = -(1 << 30)


def grid_new(int side):
    return np.full((side + 1, side + 1), C_NEG_INF, dtype=np.int32)


def grid_stamp(raw, int i, int j, x):
    cdef int32_t[:, ::1] g = raw
    cdef int side = g.shape[0] - 1
    cdef int32_t xv = <int32_t> x
    cdef int r, c
    if i < 1 or j > side:
        return
    if j < 1:
        j = 1
    for r in range(1, i + 1):
        for c in range(j, side + 1):
            if xv > g[r, c]:
                g[r, c] = xv


cdef void _sweep(int32_t[:, ::1] g) noexcept:
    cdef int side = g.shape[0] - 1
    cdef int i, j
    cdef int32_t v
    for i in range(side, 0, -1):
        for j in range(1, side + 1):
            v = g[i, j]
            if i < side and g[i + 1, j] > v:
                v = g[i + 1, j]
            if j > 1 and g[i, j - 1] > v:
                v = g[i, j - 1]
            g[i, j] = v


def sweep_inplace(raw):
    cdef int32_t[:, ::1] g = raw
    _sweep(g)


cdef inline int32_t _q_value(int32_t[:, ::1] g, int side, int l, int i, int j) noexcept:
    if i < 1 or j < 1 or i > side or j > side or j < i or j - i > l:
        return C_NEG_INF
    return g[i, j]


cdef inline int _q_mincol(int32_t[:, ::1] g, int side, int l, int i, int32_t x) noexcept:
    cdef int lo, hi, mid
    if i < 1 or i > side:
        return 0
    lo = i
    hi = i + l
    if hi > side:
        hi = side
    if lo > hi or g[i, hi] < x:
        return 0
    while lo < hi:
        mid = (lo + hi) >> 1
        if g[i, mid] >= x:
            hi = mid
        else:
            lo = mid + 1
    return lo


cdef inline int _q_maxrow(int32_t[:, ::1] g, int side, int l, int j, int32_t x) noexcept:
    cdef int lo, hi, mid
    if j < 1 or j > side:
        return 0
    lo = j - l
    if lo < 1:
        lo = 1
    hi = j
    if lo > hi or g[lo, j] < x:
        return 0
    while lo < hi:
        mid = (lo + hi + 1) >> 1
        if g[mid, j] >= x:
            lo = mid
        else:
            hi = mid - 1
    return lo


def q_value(raw, int l, int i, int j):
    cdef int32_t[:, ::1] g = raw
    return int(_q_value(g, g.shape[0] - 1, l, i, j))


def q_mincol(raw, int l, int i, x):
    cdef int32_t[:, ::1] g = raw
    return _q_mincol(g, g.shape[0] - 1, l, i, <int32_t> x)


def q_maxrow(raw, int l, int j, x):
    cdef int32_t[:, ::1] g = raw
    return _q_maxrow(g, g.shape[0] - 1, l, j, <int32_t> x)


def max_valid(raw, int l):
    cdef int32_t[:, ::1] g = raw
    cdef int side = g.shape[0] - 1
    cdef int i, j, hi
    cdef int32_t best = C_NEG_INF
    for i in range(1, side + 1):
        hi = i + l
        if hi > side:
            hi = side
        for j in range(i, hi + 1):
            if g[i, j] > best:
                best = g[i, j]
    return int(best)


def mul_bounded_kernel(rawA, rawB, int l, int t_a, int t_b):
    cdef int32_t[:, ::1] A = rawA
    cdef int32_t[:, ::1] B = rawB
    cdef int side = A.shape[0] - 1
    out = grid_new(side)
    cdef int32_t[:, ::1] C = out
    cdef int j, x, y, k, i
    cdef int32_t vb, v
    for j in range(1, side + 1):
        for x in range(t_b + 1):
            k = _q_maxrow(B, side, l, j, <int32_t> x)
            if k == 0:
                break
            vb = B[k, j]
            for y in range(t_a + 1):
                i = _q_maxrow(A, side, l, k, <int32_t> y)
                if i == 0:
                    break
                v = A[i, k] + vb
                if v > C[i, j]:
                    C[i, j] = v
    _sweep(C)
    return out


def case_b_kernel(raw_prev, int l, occ, eta):
    cdef int32_t[:, ::1] P = raw_prev
    cdef int32_t[:, ::1] occ_v = occ
    cdef int32_t[::1] eta_v = eta
    cdef int side = P.shape[0] - 1
    out = np.array(raw_prev, dtype=np.int32, copy=True)
    cdef int32_t[:, ::1] C = out
    cdef int m = occ_v.shape[0]
    cdef int e, c, p, q
    cdef int32_t w, inner, v
    for e in range(m):
        w = eta_v[e]
        for c in range(3):
            p = occ_v[e, c]
            q = occ_v[e, c + 1]
            if q + 1 > side:
                continue
            inner = _q_value(P, side, l, p + 1, q)
            if inner <= C_NEG_INF:
                continue
            v = inner + w
            if v > C[p, q + 1]:
                C[p, q + 1] = v
    _sweep(C)
    return out


def restricted_kernel(int side, int l, occ, eta_x, int limit, passes):
    cdef int32_t[:, ::1] occ_v = occ
    cdef int32_t[::1] eta_v = eta_x
    out = grid_new(side)
    cdef int32_t[:, ::1] O = out
    cdef int32_t[:, ::1] L, R, M
    cdef int m = occ_v.shape[0]
    cdef int e, c, p, q, a, b, i, j
    cdef int32_t w, vl, vm, v
    for rawL, rawR, rawMid in passes:
        L = rawL
        R = rawR
        M = rawMid
        for e in range(m):
            w = eta_v[e]
            for c in range(3):
                p = occ_v[e, c]
                q = occ_v[e, c + 1]
                if q + 1 > side:
                    continue
                for a in range(limit + 1):
                    i = _q_mincol(L, side, l, p, <int32_t> a)
                    if i == 0:
                        break
                    vl = L[p, i]
                    for b in range(limit + 1):
                        j = _q_maxrow(R, side, l, q, <int32_t> b)
                        if j == 0:
                            break
                        vm = _q_value(M, side, l, i, j)
                        if vm <= C_NEG_INF:
                            continue
                        v = w + vl + vm + R[j, q]
                        if v > O[p, q + 1]:
                            O[p, q + 1] = v
    _sweep(O)
    return out


def hat_apply_kernel(raw_init, int l, occ, int limit, passes):
    cdef int32_t[:, ::1] occ_v = occ
    out = np.array(raw_init, dtype=np.int32, copy=True)
    cdef int32_t[:, ::1] C = out
    cdef int side = C.shape[0] - 1
    cdef int32_t[:, ::1] L, R, M
    cdef int m = occ_v.shape[0]
    cdef int e, c, p, q, a, b, i, j
    cdef int32_t vl, vm, v
    for rawL, rawR, rawMid in passes:
        L = rawL
        R = rawR
        M = rawMid
        for e in range(m):
            for c in range(3):
                p = occ_v[e, c]
                q = occ_v[e, c + 1]
                if q + 1 > side:
                    continue
                vm = _q_value(M, side, l, p, q + 1)
                if vm <= C_NEG_INF:
                    continue
                for a in range(limit + 1):
                    i = _q_maxrow(L, side, l, p, <int32_t> a)
                    if i == 0:
                        break
                    vl = L[i, p]
                    for b in range(limit + 1):
                        j = _q_mincol(R, side, l, q + 1, <int32_t> b)
                        if j == 0:
                            break
                        v = vl + vm + R[q + 1, j]
                        if v > C[i, j]:
                            C[i, j] = v
    _sweep(C)
    return out


def fix_invalid_kernel(raw, int l):
    # band mask + dominance sweep: invalid (i, j) becomes the max over
    # valid cells (i', j') with i <= i' <= j' <= j
    cdef int32_t[:, ::1] g = raw
    cdef int side = g.shape[0] - 1
    out = grid_new(side)
    cdef int32_t[:, ::1] O = out
    cdef int i, j, hi
    for i in range(1, side + 1):
        hi = i + l
        if hi > side:
            hi = side
        for j in range(i, hi + 1):
            O[i, j] = g[i, j]
    _sweep(O)
    return out


def bd_product_naive_kernel(rawA, rawB):
    cdef int32_t[:, ::1] A = rawA
    cdef int32_t[:, ::1] B = rawB
    cdef int side = A.shape[0] - 1
    out = grid_new(side)
    cdef int32_t[:, ::1] C = out
    cdef int i, j, k
    cdef int32_t a
    cdef int32_t best
    for i in range(1, side + 1):
        for k in range(1, side + 1):
            a = A[i, k]
            if a <= C_NEG_INF:
                continue
            for j in range(1, side + 1):
                if B[k, j] <= C_NEG_INF:
                    continue
                if a + B[k, j] > C[i, j]:
                    C[i, j] = a + B[k, j]
    return out
