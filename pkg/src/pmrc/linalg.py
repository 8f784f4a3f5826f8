"""Dense exact linear algebra over a prime field.

Matrices are immutable values backed by int64 numpy arrays; every operation
reduces mod q. Solving and rank use plain Gaussian elimination with
leftmost-nonzero pivoting (exact arithmetic needs no pivot scaling).
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from .errors import (
    FieldMismatchError,
    InconsistentSystemError,
    ParameterError,
    SingularMatrixError,
)
from .field import Fq

# int64 matmul is exact while cols * (q-1)^2 < 2**63; this bound is generous
# for every modulus the shard format can carry.
_FAST_MUL_Q = 1 << 20


class MatrixFq:
    """Immutable dense matrix over F_q."""

    __slots__ = ("field", "_a")

    def __init__(self, field: Fq, data, _trusted: bool = False):
        a = np.array(data, dtype=np.int64, copy=True)
        if a.ndim != 2:
            raise ParameterError(f"matrix data must be 2-D, got ndim={a.ndim}")
        if not _trusted and a.size:
            if int(a.min()) < 0 or int(a.max()) >= field.q:
                raise ParameterError("matrix entries must be reduced mod q")
        a.setflags(write=False)
        self.field = field
        self._a = a

    @property
    def rows(self) -> int:
        return self._a.shape[0]

    @property
    def cols(self) -> int:
        return self._a.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self._a.shape

    @classmethod
    def zeros(cls, field: Fq, rows: int, cols: int) -> "MatrixFq":
        return cls(field, np.zeros((rows, cols), dtype=np.int64), _trusted=True)

    @classmethod
    def identity(cls, field: Fq, n: int) -> "MatrixFq":
        return cls(field, np.eye(n, dtype=np.int64), _trusted=True)

    @classmethod
    def column(cls, field: Fq, values: Sequence[int]) -> "MatrixFq":
        return cls(field, np.asarray(values, dtype=np.int64).reshape(-1, 1))

    def array(self) -> np.ndarray:
        """Read-only int64 view of the entries."""
        return self._a

    def row(self, i: int) -> tuple[int, ...]:
        return tuple(int(v) for v in self._a[i])

    def col(self, j: int) -> tuple[int, ...]:
        return tuple(int(v) for v in self._a[:, j])

    def entry(self, i: int, j: int) -> int:
        return int(self._a[i, j])

    def take_rows(self, idx: Iterable[int]) -> "MatrixFq":
        return MatrixFq(self.field, self._a[list(idx), :], _trusted=True)

    def slice_cols(self, j0: int, j1: int) -> "MatrixFq":
        return MatrixFq(self.field, self._a[:, j0:j1], _trusted=True)

    @property
    def T(self) -> "MatrixFq":
        return MatrixFq(self.field, self._a.T, _trusted=True)

    def _same_field(self, other: "MatrixFq"):
        if self.field != other.field:
            raise FieldMismatchError(
                f"fields differ: F_{self.field.q} vs F_{other.field.q}"
            )

    def __matmul__(self, other: "MatrixFq") -> "MatrixFq":
        self._same_field(other)
        if self.cols != other.rows:
            raise ParameterError(
                f"shape mismatch for product: {self.shape} @ {other.shape}"
            )
        q = self.field.q
        if q <= _FAST_MUL_Q:
            prod = (self._a @ other._a) % q
        else:
            prod = np.dot(self._a.astype(object), other._a.astype(object)) % q
            prod = prod.astype(np.int64)
        return MatrixFq(self.field, prod, _trusted=True)

    def __add__(self, other: "MatrixFq") -> "MatrixFq":
        self._same_field(other)
        if self.shape != other.shape:
            raise ParameterError(f"shape mismatch: {self.shape} + {other.shape}")
        return MatrixFq(self.field, (self._a + other._a) % self.field.q, _trusted=True)

    def __sub__(self, other: "MatrixFq") -> "MatrixFq":
        self._same_field(other)
        if self.shape != other.shape:
            raise ParameterError(f"shape mismatch: {self.shape} - {other.shape}")
        return MatrixFq(self.field, (self._a - other._a) % self.field.q, _trusted=True)

    def __eq__(self, other):
        return (
            isinstance(other, MatrixFq)
            and self.field == other.field
            and self.shape == other.shape
            and bool(np.array_equal(self._a, other._a))
        )

    def __hash__(self):
        return hash((self.field, self.shape, self._a.tobytes()))

    def to_lists(self) -> list[list[int]]:
        return [[int(v) for v in row] for row in self._a]

    def __repr__(self):
        return f"MatrixFq(q={self.field.q}, {self.rows}x{self.cols})"


def vandermonde(field: Fq, points: Sequence[int], width: int) -> MatrixFq:
    """Rows [1, x, x^2, ..., x^(width-1)] for each evaluation point x."""
    pts = [field.check(x) for x in points]
    if len(set(pts)) != len(pts):
        raise ParameterError("Vandermonde points must be pairwise distinct")
    if width < 0:
        raise ParameterError("width must be nonnegative")
    a = np.empty((len(pts), width), dtype=np.int64)
    if width:
        col = np.ones(len(pts), dtype=np.int64)
        xs = np.asarray(pts, dtype=np.int64)
        for j in range(width):
            a[:, j] = col
            col = col * xs % field.q
    return MatrixFq(field, a, _trusted=True)


def _rref(arr: np.ndarray, q: int, stop_col: int) -> list[int]:
    """In-place reduced row echelon form mod q; pivots searched in columns
    [0, stop_col). Returns the pivot column list."""
    rows = arr.shape[0]
    pivots: list[int] = []
    r = 0
    for c in range(stop_col):
        if r == rows:
            break
        nz = np.flatnonzero(arr[r:, c])
        if nz.size == 0:
            continue
        p = r + int(nz[0])
        if p != r:
            arr[[r, p]] = arr[[p, r]]
        inv = pow(int(arr[r, c]), q - 2, q)
        arr[r] = arr[r] * inv % q
        col = arr[:, c].copy()
        col[r] = 0
        arr -= np.outer(col, arr[r])
        arr %= q
        pivots.append(c)
        r += 1
    return pivots


def _solve_common(a: MatrixFq, y: MatrixFq, require_unique: bool) -> MatrixFq:
    a._same_field(y)
    if a.rows != y.rows:
        raise ParameterError(f"rhs has {y.rows} rows, matrix has {a.rows}")
    q = a.field.q
    aug = np.concatenate([a.array(), y.array()], axis=1).copy()
    pivots = _rref(aug, q, a.cols)
    rank_a = len(pivots)
    # rows below rank_a are zero in the A block; any nonzero rhs there means
    # the system has no solution.
    if aug[rank_a:, a.cols:].any():
        raise InconsistentSystemError("linear system has no solution")
    if require_unique and rank_a < a.cols:
        raise SingularMatrixError(
            f"matrix has column rank {rank_a} < {a.cols}; solution not unique"
        )
    x = np.zeros((a.cols, y.cols), dtype=np.int64)
    for i, c in enumerate(pivots):
        x[c] = aug[i, a.cols :]
    return MatrixFq(a.field, x, _trusted=True)


def solve(a: MatrixFq, y: MatrixFq) -> MatrixFq:
    """Unique x with a @ x = y; a must have full column rank."""
    return _solve_common(a, y, require_unique=True)


def solve_any(a: MatrixFq, y: MatrixFq) -> MatrixFq:
    """Some x with a @ x = y (free variables set to zero)."""
    return _solve_common(a, y, require_unique=False)


def rank(a: MatrixFq) -> int:
    arr = a.array().copy()
    return len(_rref(arr, a.field.q, a.cols))


def inverse(a: MatrixFq) -> MatrixFq:
    if a.rows != a.cols:
        raise ParameterError("only square matrices have inverses")
    return solve(a, MatrixFq.identity(a.field, a.rows))


def left_inverse(a: MatrixFq) -> MatrixFq:
    """L with L @ a = I; a must have full column rank."""
    try:
        x = solve_any(a.T, MatrixFq.identity(a.field, a.cols))
    except InconsistentSystemError:
        raise SingularMatrixError("matrix has no left inverse (column rank deficient)")
    return x.T


def hstack(mats: Sequence[MatrixFq]) -> MatrixFq:
    first = mats[0]
    for m in mats[1:]:
        first._same_field(m)
    return MatrixFq(
        first.field, np.concatenate([m.array() for m in mats], axis=1), _trusted=True
    )


def vstack(mats: Sequence[MatrixFq]) -> MatrixFq:
    first = mats[0]
    for m in mats[1:]:
        first._same_field(m)
    return MatrixFq(
        first.field, np.concatenate([m.array() for m in mats], axis=0), _trusted=True
    )
