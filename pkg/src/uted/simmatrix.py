"""Similarity matrices under the rangemax/mincol/maxrow computation model.

A matrix of side ``4m`` (m = edge count of the segmented tree) is valid on
the band ``i <= j <= i + 2m``; everything else reads as -inf through the
query layer no matter what the storage holds.  Handles are immutable:
``rangemax`` returns a new handle and the old one keeps reading its own
version.

Two storage backends sit behind the same handle:

* ``dense``      -- copy-on-write dense grids, one full copy per update;
                    the straightforward correctness reference.
* ``persistent`` -- a shared append-only stamp log per matrix family with
                    lazily materialized dense checkpoints; updates at the
                    newest version are O(1), reads materialize once and
                    are O(1)/O(log) after that.
"""

from __future__ import annotations

from typing import Callable, Optional

import numpy as np

from ._kernel import NEG_INF, kernel

__all__ = [
    "NEG_INF",
    "MatrixHandle",
    "new_matrix",
    "from_raw",
    "full_zero_matrix",
    "mul_bounded",
    "fix_invalid",
    "star_similarity",
    "bd_product_naive",
    "BD_BACKENDS",
    "valid_equal",
    "first_valid_mismatch",
    "masked_dense",
    "dump_csv",
    "check_similarity_laws",
]

BACKENDS = ("dense", "persistent")


class _DenseStore:
    """One immutable raw grid per handle version."""

    __slots__ = ("raw",)

    def __init__(self, raw: np.ndarray):
        self.raw = raw


class _PersistentStore:
    """Append-only stamp log over an immutable base grid.

    A handle is (store, version); version counts applied stamps.  Reads
    materialize a dense checkpoint for their version (cached, newest few
    kept).  Updating an old version forks the store, so every handle stays
    readable forever.
    """

    __slots__ = ("base", "log", "cache")

    _CACHE_KEEP = 3

    def __init__(self, base: np.ndarray):
        self.base = base
        self.log: list[tuple[int, int, int]] = []
        self.cache: dict[int, np.ndarray] = {0: base}

    def materialize(self, version: int) -> np.ndarray:
        got = self.cache.get(version)
        if got is not None:
            return got
        at = max(v for v in self.cache if v <= version)
        raw = self.cache[at].copy()
        for v in range(at, version):
            i, j, x = self.log[v]
            side = raw.shape[0] - 1
            if 1 <= i and j <= side and x > raw[i, j]:
                raw[i, j] = x
        kernel.sweep_inplace(raw)
        self.cache[version] = raw
        if len(self.cache) > self._CACHE_KEEP + 1:
            evict = min(v for v in self.cache if v != 0 and v != version)
            del self.cache[evict]
        return raw


class MatrixHandle:
    """Immutable view of one matrix version.

    ``l`` is the validity span (half the side); ``t_edges`` optionally
    records the edge count of the tree this matrix encodes, which bounds
    its finite values by ``2 * t_edges``.
    """

    __slots__ = ("side", "l", "backend", "t_edges", "_store", "_version")

    def __init__(self, side: int, backend: str, store, version: int = 0, t_edges: Optional[int] = None):
        if side < 1:
            raise ValueError("matrix side must be positive")
        self.side = side
        self.l = side // 2
        self.backend = backend
        self.t_edges = t_edges
        self._store = store
        self._version = version

    # -- reads ----------------------------------------------------------

    def raw(self) -> np.ndarray:
        """The backing grid for this version.  Treat as read-only."""
        if self.backend == "dense":
            return self._store.raw
        return self._store.materialize(self._version)

    def value(self, i: int, j: int) -> int:
        return kernel.q_value(self.raw(), self.l, i, j)

    def mincol(self, i: int, x: int) -> int:
        """Smallest j with value(i, j) >= x, or the sentinel 0."""
        return kernel.q_mincol(self.raw(), self.l, i, x)

    def maxrow(self, j: int, x: int) -> int:
        """Largest i with value(i, j) >= x, or the sentinel 0."""
        return kernel.q_maxrow(self.raw(), self.l, j, x)

    def max_valid(self) -> int:
        return kernel.max_valid(self.raw(), self.l)

    # -- updates ---------------------------------------------------------

    def rangemax(self, i: int, j: int, x: int) -> "MatrixHandle":
        """New handle where cells {<= i} x {>= j} absorb ``x``.

        ``j = side + 1`` is allowed and is a no-op update (an anchor just
        past the walk).
        """
        if not (1 <= i <= self.side) or not (1 <= j <= self.side + 1):
            raise ValueError(f"rangemax anchor ({i}, {j}) out of range for side {self.side}")
        if self.backend == "dense":
            raw = self._store.raw.copy()
            kernel.grid_stamp(raw, i, j, x)
            return MatrixHandle(self.side, "dense", _DenseStore(raw), 0, self.t_edges)
        store = self._store
        if self._version != len(store.log):
            store = _PersistentStore(store.materialize(self._version))
        store.log.append((i, j, x))
        return MatrixHandle(self.side, "persistent", store, len(store.log), self.t_edges)

    def copy(self) -> "MatrixHandle":
        """A handle reading identically; O(1) because versions are frozen."""
        return MatrixHandle(self.side, self.backend, self._store, self._version, self.t_edges)

    def with_t_edges(self, t_edges: int) -> "MatrixHandle":
        return MatrixHandle(self.side, self.backend, self._store, self._version, t_edges)

    def __repr__(self):
        return f"MatrixHandle(side={self.side}, backend={self.backend!r}, t_edges={self.t_edges})"


def _fresh_raw(side: int) -> np.ndarray:
    return np.full((side + 1, side + 1), NEG_INF, dtype=np.int32)


def new_matrix(side: int, backend: str = "dense") -> MatrixHandle:
    """All -inf matrix of the given side."""
    if backend not in BACKENDS:
        raise ValueError(f"unknown backend {backend!r}")
    raw = _fresh_raw(side)
    if backend == "dense":
        return MatrixHandle(side, "dense", _DenseStore(raw))
    return MatrixHandle(side, "persistent", _PersistentStore(raw))


def from_raw(raw: np.ndarray, backend: str, t_edges: Optional[int] = None) -> MatrixHandle:
    """Wrap a kernel-built grid as a frozen version-0 handle."""
    side = raw.shape[0] - 1
    if backend == "dense":
        return MatrixHandle(side, "dense", _DenseStore(raw), 0, t_edges)
    return MatrixHandle(side, "persistent", _PersistentStore(raw), 0, t_edges)


def full_zero_matrix(side: int, backend: str = "dense") -> MatrixHandle:
    """Matrix of a single-vertex tree: every valid cell is 0."""
    h = new_matrix(side, backend)
    return h.rangemax(side, 1, 0).with_t_edges(0)


def masked_dense(handle: MatrixHandle) -> np.ndarray:
    """Dense copy with everything outside the valid band forced to -inf."""
    raw = handle.raw()
    side, l = handle.side, handle.l
    out = np.full_like(raw, NEG_INF)
    for i in range(1, side + 1):
        hi = min(side, i + l)
        if hi >= i:
            out[i, i : hi + 1] = raw[i, i : hi + 1]
    return out


def valid_equal(a: MatrixHandle, b: MatrixHandle) -> bool:
    return first_valid_mismatch(a, b) is None


def first_valid_mismatch(a: MatrixHandle, b: MatrixHandle):
    """First (i, j, va, vb) where the valid cells differ, else None."""
    if a.side != b.side:
        raise ValueError("matrix sides differ")
    ra, rb = a.raw(), b.raw()
    side, l = a.side, a.l
    for i in range(1, side + 1):
        hi = min(side, i + l)
        if hi < i:
            continue
        row_a = ra[i, i : hi + 1]
        row_b = rb[i, i : hi + 1]
        if not np.array_equal(row_a, row_b):
            k = int(np.nonzero(row_a != row_b)[0][0])
            return (i, i + k, int(row_a[k]), int(row_b[k]))
    return None


# ---------------------------------------------------------------------------
# products


def mul_bounded(a: MatrixHandle, b: MatrixHandle, t_a: int, t_b: int) -> MatrixHandle:
    """(max,+) product of two similarity matrices via threshold probing.

    ``t_a``/``t_b`` bound the finite valid entries of the operands; a
    violation is an error rather than a wrong answer.  Cost scales with
    ``t_a * t_b * side``.
    """
    if a.side != b.side:
        raise ValueError("operand sides differ")
    if a.max_valid() > t_a:
        raise ValueError(f"left operand exceeds declared bound {t_a}")
    if b.max_valid() > t_b:
        raise ValueError(f"right operand exceeds declared bound {t_b}")
    raw = kernel.mul_bounded_kernel(a.raw(), b.raw(), a.l, t_a, t_b)
    t_edges = None
    if a.t_edges is not None and b.t_edges is not None:
        t_edges = a.t_edges + b.t_edges
    return from_raw(raw, a.backend, t_edges)


def fix_invalid(a: MatrixHandle) -> np.ndarray:
    """Monotone dense completion: invalid cells become the max over the
    valid cells they dominate; valid and under-diagonal cells unchanged."""
    return kernel.fix_invalid_kernel(a.raw(), a.l)


def bd_product_naive(a_dense: np.ndarray, b_dense: np.ndarray, seed: Optional[int] = None) -> np.ndarray:
    """Exact (max,+) product of two dense matrices; the reference backend.

    ``seed`` is accepted for interface parity with randomized backends and
    ignored.
    """
    if a_dense.shape != b_dense.shape:
        raise ValueError("operand shapes differ")
    return kernel.bd_product_naive_kernel(
        np.ascontiguousarray(a_dense, dtype=np.int32),
        np.ascontiguousarray(b_dense, dtype=np.int32),
    )


BD_BACKENDS: dict[str, Callable[..., np.ndarray]] = {
    "naive": bd_product_naive,
}


def star_similarity(
    a: MatrixHandle,
    b: MatrixHandle,
    bd_backend: str | Callable[..., np.ndarray] = "naive",
    seed: Optional[int] = None,
) -> MatrixHandle:
    """(max,+) product routed through a bounded-difference product backend.

    Both operands get their invalid cells rewritten from the valid ones so
    that a plain dense product of the completions agrees with the true
    product on every valid cell; the result is re-masked.
    """
    if a.side != b.side:
        raise ValueError("operand sides differ")
    for name, h in (("left", a), ("right", b)):
        raw = h.raw()
        diag = raw[np.arange(1, h.side + 1), np.arange(1, h.side + 1)]
        if not np.all(diag == 0):
            raise ValueError(f"{name} operand does not have a zero valid diagonal")
    backend = BD_BACKENDS[bd_backend] if isinstance(bd_backend, str) else bd_backend
    a_fix = fix_invalid(a)
    b_fix = fix_invalid(b)
    c_dense = backend(a_fix, b_fix, seed=seed)
    side, l = a.side, a.l
    out = _fresh_raw(side)
    for i in range(1, side + 1):
        hi = min(side, i + l)
        if hi >= i:
            out[i, i : hi + 1] = c_dense[i, i : hi + 1]
    t_edges = None
    if a.t_edges is not None and b.t_edges is not None:
        t_edges = a.t_edges + b.t_edges
    return from_raw(out, a.backend, t_edges)


# ---------------------------------------------------------------------------
# diagnostics


def dump_csv(handle: MatrixHandle) -> str:
    """CSV of the matrix through the query layer: numbers on the valid
    band, ``-inf`` literals elsewhere; 1-based headers."""
    side, l = handle.side, handle.l
    raw = handle.raw()
    lines = ["," + ",".join(str(j) for j in range(1, side + 1))]
    for i in range(1, side + 1):
        cells = [str(i)]
        for j in range(1, side + 1):
            if i <= j <= i + l:
                v = int(raw[i, j])
                cells.append("-inf" if v == NEG_INF else str(v))
            else:
                cells.append("-inf")
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def check_similarity_laws(handle: MatrixHandle, t_edges: Optional[int] = None) -> list[str]:
    """Violations of the similarity-matrix laws on the valid band.

    Checks row/column monotonicity, the [0, 2] neighbor-difference bound,
    a zero diagonal, and the value range [0, 2 * t_edges].
    """
    problems: list[str] = []
    side, l = handle.side, handle.l
    raw = handle.raw()
    if t_edges is None:
        t_edges = handle.t_edges
    for i in range(1, side + 1):
        hi = min(side, i + l)
        row = raw[i, i : hi + 1].astype(np.int64)
        if row[0] != 0:
            problems.append(f"diagonal ({i},{i}) = {row[0]} != 0")
        if row.min() < 0:
            problems.append(f"negative value in row {i}")
        if t_edges is not None and row.max() > 2 * t_edges:
            problems.append(f"row {i} exceeds 2*|E| = {2 * t_edges}")
        d = np.diff(row)
        if d.size and (d.min() < 0 or d.max() > 2):
            problems.append(f"row {i} neighbor differences outside [0, 2]")
        # column step: compare with the row below on the shared band columns
        if i < side:
            lo, chi = i + 1, min(side, i + l)
            if chi >= lo:
                up = raw[i, lo : chi + 1].astype(np.int64)
                down = raw[i + 1, lo : chi + 1].astype(np.int64)
                cd = up - down
                if cd.min() < 0 or cd.max() > 2:
                    problems.append(f"column differences below row {i} outside [0, 2]")
    return problems
