"""Dense exact matrix and vector kernels.

Matrices are immutable grids of raw scalars tied to a :class:`~nilvariety.fields.Field`;
vectors are plain tuples.  Elimination uses deterministic first-nonzero
pivoting with exact comparisons -- there are no tolerance parameters.  Over a
prime field the row reduction is carried out on int64 numpy arrays (residues
stay below the modulus, so the arithmetic is exact), which keeps the many
small solves in the stabilizer and conjugator searches fast.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import PreconditionError
from .fields import Field, PrimeField

Vec = tuple  # vectors and covectors are raw tuples of scalars


# ---------------------------------------------------------------------------
# vectors


def vec(field: Field, entries: Iterable) -> Vec:
    return tuple(entries)

def zero_vec(field: Field, n: int) -> Vec:
    return (field.zero,) * n

def basis_vec(field: Field, n: int, k: int) -> Vec:
    """Standard basis vector with a one in position k (0-based)."""
    return tuple(field.one if i == k else field.zero for i in range(n))

def vec_add(field: Field, u: Vec, v: Vec) -> Vec:
    return tuple(field.add(a, b) for a, b in zip(u, v))

def vec_sub(field: Field, u: Vec, v: Vec) -> Vec:
    return tuple(field.sub(a, b) for a, b in zip(u, v))

def vec_scale(field: Field, c, u: Vec) -> Vec:
    return tuple(field.mul(c, a) for a in u)

def vec_is_zero(field: Field, u: Vec) -> bool:
    return all(field.is_zero(a) for a in u)

def dot(field: Field, u: Vec, v: Vec) -> object:
    acc = field.zero
    for a, b in zip(u, v):
        acc = field.add(acc, field.mul(a, b))
    return acc


# ---------------------------------------------------------------------------
# matrices


@dataclass(frozen=True)
class Matrix:
    field: Field
    rows: tuple

    @staticmethod
    def from_rows(field: Field, rows: Iterable[Iterable]) -> "Matrix":
        return Matrix(field, tuple(tuple(r) for r in rows))

    @staticmethod
    def zeros(field: Field, nrows: int, ncols: int) -> "Matrix":
        return Matrix(field, tuple((field.zero,) * ncols for _ in range(nrows)))

    @staticmethod
    def identity(field: Field, n: int) -> "Matrix":
        return Matrix(field, tuple(basis_vec(field, n, k) for k in range(n)))

    @staticmethod
    def from_cols(field: Field, cols: Sequence[Vec]) -> "Matrix":
        nrows = len(cols[0]) if cols else 0
        return Matrix(field, tuple(tuple(c[r] for c in cols) for r in range(nrows)))

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def ncols(self) -> int:
        return len(self.rows[0]) if self.rows else 0

    @property
    def n(self) -> int:
        if self.nrows != self.ncols:
            raise PreconditionError("matrix is not square")
        return self.nrows

    def row(self, k: int) -> Vec:
        return self.rows[k]

    def col(self, k: int) -> Vec:
        return tuple(r[k] for r in self.rows)

    def __add__(self, other: "Matrix") -> "Matrix":
        f = self.field
        return Matrix(f, tuple(tuple(f.add(a, b) for a, b in zip(r1, r2))
                               for r1, r2 in zip(self.rows, other.rows)))

    def __sub__(self, other: "Matrix") -> "Matrix":
        f = self.field
        return Matrix(f, tuple(tuple(f.sub(a, b) for a, b in zip(r1, r2))
                               for r1, r2 in zip(self.rows, other.rows)))

    def __neg__(self) -> "Matrix":
        f = self.field
        return Matrix(f, tuple(tuple(f.neg(a) for a in r) for r in self.rows))

    def __mul__(self, other: "Matrix") -> "Matrix":
        f = self.field
        if self.ncols != other.nrows:
            raise PreconditionError("matrix shapes do not compose")
        oc = list(zip(*other.rows)) if other.rows else []
        out = []
        for r in self.rows:
            out.append(tuple(dot(f, r, c) for c in oc))
        return Matrix(f, tuple(out))

    def scale(self, c) -> "Matrix":
        f = self.field
        return Matrix(f, tuple(tuple(f.mul(c, a) for a in r) for r in self.rows))

    def matvec(self, v: Vec) -> Vec:
        """Matrix times column vector."""
        f = self.field
        return tuple(dot(f, r, v) for r in self.rows)

    def covec(self, u: Vec) -> Vec:
        """Row covector times matrix."""
        f = self.field
        return tuple(dot(f, u, self.col(c)) for c in range(self.ncols))

    def transpose(self) -> "Matrix":
        return Matrix(self.field, tuple(zip(*self.rows)) if self.rows else ())

    def trace(self):
        f = self.field
        acc = f.zero
        for k in range(self.n):
            acc = f.add(acc, self.rows[k][k])
        return acc

    def is_zero(self) -> bool:
        f = self.field
        return all(f.is_zero(a) for r in self.rows for a in r)

    def is_upper_triangular(self, strict: bool = False) -> bool:
        f = self.field
        for r in range(self.nrows):
            stop = r + 1 if strict else r
            for c in range(min(stop, self.ncols)):
                if not f.is_zero(self.rows[r][c]):
                    return False
        return True

    def __str__(self) -> str:
        f = self.field
        return "\n".join("[" + " ".join(f.fmt(a) for a in r) + "]" for r in self.rows)


def block(field: Field, grid: Sequence[Sequence[Optional[Matrix]]],
          row_sizes: Sequence[int], col_sizes: Sequence[int]) -> Matrix:
    """Assemble a block matrix; ``None`` entries are zero blocks."""
    rows = []
    for bi, rs in enumerate(row_sizes):
        for r in range(rs):
            row = []
            for bj, cs in enumerate(col_sizes):
                blk = grid[bi][bj]
                if blk is None:
                    row.extend([field.zero] * cs)
                else:
                    row.extend(blk.rows[r])
            rows.append(tuple(row))
    return Matrix(field, tuple(rows))


def outer(field: Field, i: Vec, j: Vec) -> Matrix:
    """Column vector times row covector."""
    return Matrix(field, tuple(tuple(field.mul(a, b) for b in j) for a in i))


def regular_nilpotent(field: Field, n: int) -> Matrix:
    """Single Jordan block with ones on the superdiagonal (J e_k = e_{k-1})."""
    rows = [[field.zero] * n for _ in range(n)]
    for r in range(n - 1):
        rows[r][r + 1] = field.one
    return Matrix.from_rows(field, rows)


def poly_no_const(M: Matrix, coeffs: Sequence) -> Matrix:
    """c_1 M + c_2 M^2 + ... for coeffs = (c_1, c_2, ...)."""
    f = M.field
    acc = Matrix.zeros(f, M.n, M.n)
    P = Matrix.identity(f, M.n)
    for c in coeffs:
        P = P * M
        acc = acc + P.scale(c)
    return acc


# ---------------------------------------------------------------------------
# elimination core

_FP_LIMIT = 1 << 31  # int64 products of two residues stay exact below this


def _rref_fp(rows: Sequence[Sequence[int]], p: int):
    A = np.array([[int(x) % p for x in r] for r in rows], dtype=np.int64)
    nr, nc = A.shape
    pivots = []
    r = 0
    for c in range(nc):
        if r == nr:
            break
        nz = np.nonzero(A[r:, c])[0]
        if nz.size == 0:
            continue
        pr = r + int(nz[0])
        if pr != r:
            A[[r, pr]] = A[[pr, r]]
        inv = pow(int(A[r, c]), p - 2, p)
        A[r] = (A[r] * inv) % p
        colvals = A[:, c].copy()
        colvals[r] = 0
        mask = colvals != 0
        if mask.any():
            A[mask] = (A[mask] - colvals[mask, None] * A[r][None, :]) % p
        pivots.append(c)
        r += 1
    return [[int(x) for x in row] for row in A], pivots


def _rref_exact(rows: Sequence[Sequence], field: Field):
    A = [list(r) for r in rows]
    nr = len(A)
    nc = len(A[0]) if A else 0
    pivots = []
    r = 0
    for c in range(nc):
        if r == nr:
            break
        pr = next((k for k in range(r, nr) if not field.is_zero(A[k][c])), None)
        if pr is None:
            continue
        A[r], A[pr] = A[pr], A[r]
        inv = field.inv(A[r][c])
        A[r] = [field.mul(inv, x) for x in A[r]]
        for k in range(nr):
            if k != r and not field.is_zero(A[k][c]):
                fac = A[k][c]
                A[k] = [field.sub(A[k][j], field.mul(fac, A[r][j])) for j in range(nc)]
        pivots.append(c)
        r += 1
    return A, pivots


def rref(rows: Sequence[Sequence], field: Field):
    """Reduced row echelon form with the list of pivot columns."""
    if not rows or not rows[0]:
        return [list(r) for r in rows], []
    if isinstance(field, PrimeField) and field.p < _FP_LIMIT:
        return _rref_fp(rows, field.p)
    return _rref_exact(rows, field)


def rank(M: Matrix) -> int:
    """Row rank by exact elimination."""
    _, pivots = rref(M.rows, M.field)
    return len(pivots)


def nullspace(M: Matrix) -> list[Vec]:
    """Basis of the right kernel of M, one vector per free column."""
    f = M.field
    nc = M.ncols
    R, pivots = rref(M.rows, f)
    pivot_set = set(pivots)
    free = [c for c in range(nc) if c not in pivot_set]
    basis = []
    for fc in free:
        v = [f.zero] * nc
        v[fc] = f.one
        for k, pc in enumerate(pivots):
            v[pc] = f.neg(R[k][fc])
        basis.append(tuple(v))
    return basis


def solve(A: Matrix, b: Vec):
    """Solve A x = b exactly.

    Returns ``None`` when the system is inconsistent, otherwise a pair
    ``(x, kernel)`` with one particular solution and a basis of the
    homogeneous solution space.
    """
    f = A.field
    if len(b) != A.nrows:
        raise PreconditionError("right-hand side length mismatch")
    nc = A.ncols
    aug = [list(r) + [b[k]] for k, r in enumerate(A.rows)]
    R, pivots = rref(aug, f)
    if nc in pivots:
        return None
    x = [f.zero] * nc
    for k, pc in enumerate(pivots):
        x[pc] = R[k][nc]
    pivot_set = set(pivots)
    free = [c for c in range(nc) if c not in pivot_set]
    kernel = []
    for fc in free:
        v = [f.zero] * nc
        v[fc] = f.one
        for k, pc in enumerate(pivots):
            v[pc] = f.neg(R[k][fc])
        kernel.append(tuple(v))
    return tuple(x), kernel


def inverse(M: Matrix) -> Matrix:
    f = M.field
    n = M.n
    aug = [list(r) + list(basis_vec(f, n, k)) for k, r in enumerate(M.rows)]
    R, pivots = rref(aug, f)
    if pivots != list(range(n)):
        raise PreconditionError("matrix is singular")
    return Matrix(f, tuple(tuple(R[k][n:]) for k in range(n)))


def is_invertible(M: Matrix) -> bool:
    return M.nrows == M.ncols and rank(M) == M.nrows


# ---------------------------------------------------------------------------
# the operations the rest of the package is built on


def is_nilpotent(M: Matrix) -> bool:
    """True iff M^n = 0, tested by repeated squaring up to exponent >= n."""
    n = M.n
    P = M
    e = 1
    while e < n:
        P = P * P
        e *= 2
    return P.is_zero()


def commutator(X: Matrix, Y: Matrix) -> Matrix:
    return X * Y - Y * X


def commutator_defect(X: Matrix, Y: Matrix, i: Vec, j: Vec) -> Matrix:
    """XY - YX + i*j, the matrix whose vanishing defines membership."""
    if X.field != Y.field:
        raise PreconditionError("mixed fields")
    if not (X.n == Y.n == len(i) == len(j)):
        raise PreconditionError("dimension mismatch")
    return commutator(X, Y) + outer(X.field, i, j)
