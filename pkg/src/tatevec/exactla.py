"""Deterministic dense linear algebra over prime fields GF(p).

Everything downstream (towers, duality, tensor products, grid
decompositions) reduces to the operations in this module.  Arithmetic is
exact modulo a prime; there are no tolerances anywhere.  All tie-breaking
(pivot choice, free variables, complement completion) is lexicographic so
that repeated runs are byte-identical.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np


class FieldMismatchError(ValueError):
    """Operands live over different prime fields."""


class ShapeMismatchError(ValueError):
    """Operand shapes are incompatible."""


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


@dataclass(frozen=True)
class FieldSpec:
    """A prime field GF(p), p checked by trial division."""

    p: int

    def __post_init__(self):
        if not _is_prime(self.p):
            raise ValueError(f"modulus {self.p} is not prime")

    def inv(self, a: int) -> int:
        a %= self.p
        if a == 0:
            raise ZeroDivisionError("no inverse of 0")
        return pow(a, self.p - 2, self.p)

    def __repr__(self):
        return f"GF({self.p})"


class Matrix:
    """Immutable dense matrix over GF(p), row-major int64 storage."""

    __slots__ = ("field", "data")

    def __init__(self, field: FieldSpec, data):
        arr = np.asarray(data, dtype=np.int64)
        if arr.ndim != 2:
            raise ShapeMismatchError(f"expected 2-d data, got shape {arr.shape}")
        arr = np.mod(arr, field.p)
        arr.flags.writeable = False
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "data", arr)

    def __setattr__(self, name, value):
        raise AttributeError("Matrix is immutable")

    # -- constructors ------------------------------------------------------

    @classmethod
    def from_entries(cls, field: FieldSpec, rows: int, cols: int, entries) -> "Matrix":
        entries = list(entries)
        if len(entries) != rows * cols:
            raise ShapeMismatchError(
                f"{rows}x{cols} matrix needs {rows * cols} entries, got {len(entries)}"
            )
        return cls(field, np.array(entries, dtype=np.int64).reshape(rows, cols))

    @classmethod
    def zeros(cls, field: FieldSpec, rows: int, cols: int) -> "Matrix":
        return cls(field, np.zeros((rows, cols), dtype=np.int64))

    @classmethod
    def identity(cls, field: FieldSpec, n: int) -> "Matrix":
        return cls(field, np.eye(n, dtype=np.int64))

    # -- basic structure ---------------------------------------------------

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape

    @property
    def T(self) -> "Matrix":
        return Matrix(self.field, self.data.T)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Matrix)
            and self.field == other.field
            and self.shape == other.shape
            and bool(np.array_equal(self.data, other.data))
        )

    def __hash__(self):
        return hash((self.field.p, self.shape, self.data.tobytes()))

    def __repr__(self):
        return f"Matrix({self.field}, {self.data.tolist()})"

    def is_zero(self) -> bool:
        return not self.data.any()

    # -- arithmetic --------------------------------------------------------

    def _check_field(self, other: "Matrix"):
        if self.field != other.field:
            raise FieldMismatchError(f"{self.field} vs {other.field}")

    def __matmul__(self, other: "Matrix") -> "Matrix":
        self._check_field(other)
        if self.cols != other.rows:
            raise ShapeMismatchError(f"{self.shape} @ {other.shape}")
        return Matrix(self.field, (self.data @ other.data) % self.field.p)

    def __add__(self, other: "Matrix") -> "Matrix":
        self._check_field(other)
        if self.shape != other.shape:
            raise ShapeMismatchError(f"{self.shape} + {other.shape}")
        return Matrix(self.field, self.data + other.data)

    def __sub__(self, other: "Matrix") -> "Matrix":
        self._check_field(other)
        if self.shape != other.shape:
            raise ShapeMismatchError(f"{self.shape} - {other.shape}")
        return Matrix(self.field, self.data - other.data)

    def __neg__(self) -> "Matrix":
        return Matrix(self.field, -self.data)

    def scale(self, c: int) -> "Matrix":
        return Matrix(self.field, self.data * (c % self.field.p))

    def col(self, j: int) -> "Matrix":
        return Matrix(self.field, self.data[:, j : j + 1])

    def take_cols(self, indices) -> "Matrix":
        indices = list(indices)
        out = np.zeros((self.rows, len(indices)), dtype=np.int64)
        for j, c in enumerate(indices):
            out[:, j] = self.data[:, c]
        return Matrix(self.field, out)

    # -- serialization -----------------------------------------------------

    def to_json(self) -> dict:
        return {
            "rows": self.rows,
            "cols": self.cols,
            "entries": [int(x) for x in self.data.reshape(-1)],
        }

    @classmethod
    def from_json(cls, field: FieldSpec, doc: dict) -> "Matrix":
        return cls.from_entries(field, int(doc["rows"]), int(doc["cols"]), doc["entries"])


def hstack(mats: list[Matrix]) -> Matrix:
    field = mats[0].field
    for m in mats[1:]:
        if m.field != field:
            raise FieldMismatchError("mixed fields in hstack")
    return Matrix(field, np.hstack([m.data for m in mats]))


def vstack(mats: list[Matrix]) -> Matrix:
    field = mats[0].field
    for m in mats[1:]:
        if m.field != field:
            raise FieldMismatchError("mixed fields in vstack")
    return Matrix(field, np.vstack([m.data for m in mats]))


def block_diag(mats: list[Matrix], field: Optional[FieldSpec] = None) -> Matrix:
    if not mats:
        if field is None:
            raise ValueError("block_diag of empty list needs an explicit field")
        return Matrix.zeros(field, 0, 0)
    field = mats[0].field
    r = sum(m.rows for m in mats)
    c = sum(m.cols for m in mats)
    out = np.zeros((r, c), dtype=np.int64)
    i = j = 0
    for m in mats:
        out[i : i + m.rows, j : j + m.cols] = m.data
        i += m.rows
        j += m.cols
    return Matrix(field, out)


# ---------------------------------------------------------------------------
# Row reduction and the derived operations
# ---------------------------------------------------------------------------


def rref(M: Matrix) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form with lexicographic pivoting.

    Columns are scanned left to right; the pivot is the first row at or
    below the current one with a nonzero entry.  Returns (R, pivot_cols).
    """
    p = M.field.p
    A = M.data.copy()
    m, n = A.shape
    pivots: list[int] = []
    r = 0
    for c in range(n):
        if r == m:
            break
        pivot = -1
        for i in range(r, m):
            if A[i, c] != 0:
                pivot = i
                break
        if pivot == -1:
            continue
        if pivot != r:
            A[[r, pivot]] = A[[pivot, r]]
        inv = M.field.inv(int(A[r, c]))
        A[r] = (A[r] * inv) % p
        for i in range(m):
            if i != r and A[i, c] != 0:
                A[i] = (A[i] - A[i, c] * A[r]) % p
        pivots.append(c)
        r += 1
    return Matrix(M.field, A), pivots


def rank(M: Matrix) -> int:
    return len(rref(M)[1])


def solve_linear(M: Matrix, B: Matrix) -> Optional[Matrix]:
    """Canonical solution X of MX = B, or None if inconsistent.

    Free variables (non-pivot columns of the RREF) are set to 0, which
    makes the solution unique and reproducible.
    """
    M._check_field(B)
    if M.rows != B.rows:
        raise ShapeMismatchError(f"solve: {M.shape} vs rhs {B.shape}")
    R, pivots = rref(hstack([M, B]) if B.cols else Matrix(M.field, M.data))
    n, k = M.cols, B.cols
    if k == 0:
        return Matrix.zeros(M.field, n, 0)
    # a pivot in the augmented block means 0 = nonzero
    if any(c >= n for c in pivots):
        return None
    X = np.zeros((n, k), dtype=np.int64)
    for r, c in enumerate(pivots):
        X[c] = R.data[r, n:]
    return Matrix(M.field, X)


def kernel_basis(M: Matrix) -> Matrix:
    """Canonical RREF-derived kernel basis, columns indexed by free columns."""
    R, pivots = rref(M)
    p = M.field.p
    n = M.cols
    free = [c for c in range(n) if c not in pivots]
    K = np.zeros((n, len(free)), dtype=np.int64)
    for j, fc in enumerate(free):
        K[fc, j] = 1
        for r, pc in enumerate(pivots):
            K[pc, j] = (-R.data[r, fc]) % p
    return Matrix(M.field, K)


def image_basis(M: Matrix) -> Matrix:
    """Pivot columns of M (the columns themselves, not their reductions)."""
    _, pivots = rref(M)
    return M.take_cols(pivots)


def complement_basis(S: Matrix, ambient_dim: int) -> Matrix:
    """Greedy completion of the column span of S by e1, e2, ... in index order.

    Standard basis vectors already in the running span are skipped.  S must
    have independent columns inside the ambient space.
    """
    if S.rows != ambient_dim:
        raise ShapeMismatchError(f"S has {S.rows} rows, ambient dim {ambient_dim}")
    if rank(S) != S.cols:
        raise ValueError("complement: input columns are dependent")
    field = S.field
    current = S
    r = current.cols
    chosen: list[int] = []
    for i in range(ambient_dim):
        if r == ambient_dim:
            break
        e = np.zeros((ambient_dim, 1), dtype=np.int64)
        e[i, 0] = 1
        cand = hstack([current, Matrix(field, e)])
        if rank(cand) > r:
            current = cand
            chosen.append(i)
            r += 1
    out = np.zeros((ambient_dim, len(chosen)), dtype=np.int64)
    for j, i in enumerate(chosen):
        out[i, j] = 1
    return Matrix(field, out)


def subspace_basis(M: Matrix, mode: str, ambient_dim: Optional[int] = None) -> Matrix:
    """Kernel, image, or greedy complement basis (columns)."""
    if mode == "kernel":
        return kernel_basis(M)
    if mode == "image":
        return image_basis(M)
    if mode == "complement":
        if ambient_dim is None:
            ambient_dim = M.rows
        return complement_basis(M, ambient_dim)
    raise ValueError(f"unknown mode {mode!r}")


def factor_through(f: Matrix, alpha: Matrix) -> Matrix:
    """theta with f @ theta = alpha, for surjective f; columnwise canonical solve."""
    f._check_field(alpha)
    if f.rows != alpha.rows:
        raise ShapeMismatchError(f"factor_through: {f.shape} vs {alpha.shape}")
    if rank(f) != f.rows:
        raise ValueError("factor_through: f is not surjective")
    theta = solve_linear(f, alpha)
    assert theta is not None  # surjectivity makes every system consistent
    return theta


def kron(A: Matrix, B: Matrix) -> Matrix:
    """Kronecker product; basis order e_i (x) e_j with the left factor major."""
    A._check_field(B)
    return Matrix(A.field, np.kron(A.data, B.data) % A.field.p)


def inverse(M: Matrix) -> Optional[Matrix]:
    """Exact inverse, or None if singular."""
    if M.rows != M.cols:
        return None
    X = solve_linear(M, Matrix.identity(M.field, M.rows))
    if X is None or rank(M) != M.rows:
        return None
    return X


def is_invertible(M: Matrix) -> bool:
    return M.rows == M.cols and rank(M) == M.rows


# ---------------------------------------------------------------------------
# Subspace predicates (spans given by basis columns)
# ---------------------------------------------------------------------------


def span_contains(S: Matrix, V: Matrix) -> bool:
    """True iff every column of V lies in the column span of S."""
    if V.cols == 0:
        return True
    return rank(hstack([S, V])) == rank(S)


def spans_equal(S: Matrix, T: Matrix) -> bool:
    return span_contains(S, T) and span_contains(T, S)


def intersect_columns(A: Matrix, B: Matrix) -> Matrix:
    """Basis of span(A) meet span(B), canonical via the kernel of [A | -B]."""
    A._check_field(B)
    if A.rows != B.rows:
        raise ShapeMismatchError("intersection in different ambient spaces")
    if A.cols == 0 or B.cols == 0:
        return Matrix.zeros(A.field, A.rows, 0)
    K = kernel_basis(hstack([A, -B]))
    cand = A @ Matrix(A.field, K.data[: A.cols, :])
    return image_basis(cand)
