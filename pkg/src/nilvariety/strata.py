"""Cyclic-module computations for almost-commuting nilpotent quadruples.

A quadruple (X, Y, i, j) with X, Y nilpotent and XY - YX + i*j = 0 generates
two modules: the smallest X,Y-invariant subspace containing the column
vector i, and its covector analogue generated by j.  On such quadruples the
two generated subspaces are genuine K[x,y]-modules, so they are spanned by
straightened monomial vectors X^a Y^b i (resp. j X^a Y^b) of total degree
below the matrix size.

Monomials are ordered degree-first with ties broken by the y-exponent:

    1 < x < y < x^2 < xy < y^2 < x^3 < ...

A greedy scan in descending order keeps each monomial vector that is
independent of the previously kept ones.  The kept exponent pairs always
form a staircase (a Young diagram closed under decreasing either exponent),
the constant monomial is always kept last, and the action of X and Y on the
kept basis is strictly triangular because multiplying by x or y strictly
increases monomials.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

from .errors import InternalCheckError, PreconditionError
from .fields import Field
from .linalg import (Matrix, Vec, basis_vec, commutator, commutator_defect,
                     dot, inverse, is_nilpotent, nullspace, solve,
                     vec_is_zero, zero_vec)

Cell = tuple  # exponent pair (a, b) for the monomial x^a y^b


def monomial_key(cell: Cell):
    """Sort key realizing 1 < x < y < x^2 < xy < y^2 < ..."""
    a, b = cell
    return (a + b, b)


def monomials_upto(deg: int) -> list[Cell]:
    """All exponent pairs of total degree <= deg, ascending."""
    out = [(a, b) for total in range(deg + 1) for b in range(total + 1)
           for a in [total - b]]
    out.sort(key=monomial_key)
    return out


class Side(enum.Enum):
    RIGHT = "right"  # column vectors m(X, Y) i
    LEFT = "left"    # covectors j m(X, Y)


@dataclass(frozen=True)
class Staircase:
    """Young diagram of kept monomials plus the corresponding basis vectors.

    ``monomials`` is descending in the monomial order, so ``basis[-1]`` is
    the generator itself (i on the right side, j on the left).
    """

    side: Side
    cells: frozenset
    monomials: tuple
    basis: tuple

    @property
    def size(self) -> int:
        return len(self.monomials)

    @property
    def is_empty(self) -> bool:
        return not self.monomials

    @property
    def lam_x(self) -> frozenset:
        return frozenset(c for c in self.cells if (c[0] + 1, c[1]) in self.cells)

    @property
    def lam_y(self) -> frozenset:
        return frozenset(c for c in self.cells if (c[0], c[1] + 1) in self.cells)

    def sorted_cells(self) -> list[Cell]:
        return sorted(self.cells, key=monomial_key)

    def coeff_of(self, coeffs: dict, cell: Cell):
        return coeffs.get(cell)

    def __str__(self) -> str:
        return " ".join(f"({a},{b})" for a, b in self.sorted_cells())


@dataclass(frozen=True)
class StratumLabel:
    r: int
    s: int
    commuting: bool


@dataclass(frozen=True)
class Quadruple:
    """One point (n, field, X, Y, i, j); membership is checked by is_in_N,
    not assumed at construction."""

    field: Field
    n: int
    X: Matrix
    Y: Matrix
    i: Vec
    j: Vec

    def __post_init__(self):
        n = self.n
        if not (self.X.nrows == self.X.ncols == n and
                self.Y.nrows == self.Y.ncols == n and
                len(self.i) == n and len(self.j) == n):
            raise PreconditionError("quadruple shapes do not match n")
        if self.X.field != self.field or self.Y.field != self.field:
            raise PreconditionError("quadruple entries use a different field")


def quadruple(field: Field, X: Matrix, Y: Matrix, i: Vec, j: Vec) -> Quadruple:
    return Quadruple(field, X.n, X, Y, tuple(i), tuple(j))


# ---------------------------------------------------------------------------
# straightened monomial vectors


def right_monomial_vectors(X: Matrix, Y: Matrix, i: Vec, deg: int) -> dict:
    """X^a Y^b i for all a + b <= deg, computed by the recursion
    v(a,b) = X v(a-1,b), v(0,b) = Y v(0,b-1)."""
    vecs = {(0, 0): tuple(i)}
    for cell in monomials_upto(deg):
        a, b = cell
        if cell in vecs:
            continue
        if a >= 1:
            vecs[cell] = X.matvec(vecs[(a - 1, b)])
        else:
            vecs[cell] = Y.matvec(vecs[(0, b - 1)])
    return vecs


def left_monomial_vectors(X: Matrix, Y: Matrix, j: Vec, deg: int) -> dict:
    """j X^a Y^b for all a + b <= deg (covector side)."""
    vecs = {(0, 0): tuple(j)}
    for cell in monomials_upto(deg):
        a, b = cell
        if cell in vecs:
            continue
        if a >= 1:
            vecs[cell] = X.covec(vecs[(a - 1, b)])
        else:
            vecs[cell] = Y.covec(vecs[(0, b - 1)])
    return vecs


class SpanTracker:
    """Incremental exact row reduction used for independence tests."""

    def __init__(self, field: Field, width: int):
        self.field = field
        self.width = width
        self.pivot_rows: list[list] = []   # rows in reduced echelon form
        self.pivot_cols: list[int] = []

    def _reduce(self, v) -> list:
        f = self.field
        w = list(v)
        for row, pc in zip(self.pivot_rows, self.pivot_cols):
            c = w[pc]
            if not f.is_zero(c):
                w = [f.sub(a, f.mul(c, b)) for a, b in zip(w, row)]
        return w

    def contains(self, v) -> bool:
        f = self.field
        return all(f.is_zero(a) for a in self._reduce(v))

    def add_if_independent(self, v) -> bool:
        f = self.field
        w = self._reduce(v)
        pc = next((k for k, a in enumerate(w) if not f.is_zero(a)), None)
        if pc is None:
            return False
        inv = f.inv(w[pc])
        w = [f.mul(inv, a) for a in w]
        for k, row in enumerate(self.pivot_rows):
            c = row[pc]
            if not f.is_zero(c):
                self.pivot_rows[k] = [f.sub(a, f.mul(c, b)) for a, b in zip(row, w)]
        self.pivot_rows.append(w)
        self.pivot_cols.append(pc)
        return True

    @property
    def dim(self) -> int:
        return len(self.pivot_rows)


def _greedy_staircase(field: Field, n: int, vectors: dict, side: Side) -> Staircase:
    chosen_cells = []
    chosen_vecs = []
    tracker = SpanTracker(field, n)
    for cell in sorted(vectors, key=monomial_key, reverse=True):
        v = vectors[cell]
        if tracker.add_if_independent(v):
            chosen_cells.append(cell)
            chosen_vecs.append(v)
    cells = frozenset(chosen_cells)
    # sanity: the kept cells must form a staircase ending at the constant
    # monomial; a violation means the input is outside the variety
    for (a, b) in cells:
        if (a > 0 and (a - 1, b) not in cells) or (b > 0 and (a, b - 1) not in cells):
            raise InternalCheckError(
                "kept monomials do not form a staircase (input outside the variety?)")
    if chosen_cells and chosen_cells[-1] != (0, 0):
        raise InternalCheckError("constant monomial was not kept last")
    return Staircase(side, cells, tuple(chosen_cells), tuple(chosen_vecs))


def right_module(X: Matrix, Y: Matrix, i: Vec) -> Staircase:
    """Staircase basis of the smallest X,Y-invariant subspace containing i.

    An all-zero i yields the empty staircase.
    """
    f = X.field
    n = X.n
    if vec_is_zero(f, i):
        return Staircase(Side.RIGHT, frozenset(), (), ())
    return _greedy_staircase(f, n, right_monomial_vectors(X, Y, i, n - 1), Side.RIGHT)


def left_module(X: Matrix, Y: Matrix, j: Vec) -> Staircase:
    """Covector mirror of :func:`right_module`, generated by j."""
    f = X.field
    n = X.n
    if vec_is_zero(f, j):
        return Staircase(Side.LEFT, frozenset(), (), ())
    return _greedy_staircase(f, n, left_monomial_vectors(X, Y, j, n - 1), Side.LEFT)


# ---------------------------------------------------------------------------
# membership and classification


def is_in_N(q: Quadruple) -> bool:
    """True iff X, Y are both nilpotent and XY - YX + i*j = 0."""
    return (is_nilpotent(q.X) and is_nilpotent(q.Y)
            and commutator_defect(q.X, q.Y, q.i, q.j).is_zero())


def classify(q: Quadruple) -> StratumLabel:
    """Stratum label (r, s, commuting) of a member quadruple."""
    if not is_in_N(q):
        raise PreconditionError("quadruple is not in the variety")
    r = right_module(q.X, q.Y, q.i).size
    s = left_module(q.X, q.Y, q.j).size
    return StratumLabel(r, s, commutator(q.X, q.Y).is_zero())


# ---------------------------------------------------------------------------
# triangularizing bases


def _common_kernel_triangularize(X: Matrix, Y: Matrix) -> list[Vec]:
    """Basis making two commuting nilpotent matrices strictly upper
    triangular, by repeatedly quotienting out a common kernel vector."""
    f = X.field
    m = X.n
    if m == 0:
        return []
    stacked = Matrix(f, X.rows + Y.rows)
    ker = nullspace(stacked)
    if not ker:
        raise InternalCheckError("commuting pair with no common kernel")
    v = ker[0]
    p = next(k for k, a in enumerate(v) if not f.is_zero(a))
    v = tuple(f.div(a, v[p]) for a in v)
    keep = [k for k in range(m) if k != p]

    def project(u):
        # kill the v-component, then drop coordinate p
        c = u[p]
        return tuple(f.sub(u[k], f.mul(c, v[k])) for k in keep)

    Xq = Matrix.from_cols(f, [project(X.col(l)) for l in keep]) if m > 1 else None
    Yq = Matrix.from_cols(f, [project(Y.col(l)) for l in keep]) if m > 1 else None
    cols = [v]
    if m > 1:
        for w in _common_kernel_triangularize(Xq, Yq):
            lifted = list(w[:p]) + [f.zero] + list(w[p:])
            cols.append(tuple(lifted))
    return cols


def _triangularize_member(X: Matrix, Y: Matrix, i: Vec, j: Vec) -> list[Vec]:
    f = X.field
    m = X.n
    if m == 0:
        return []
    if vec_is_zero(f, i):
        # the commutator vanishes; plain commuting recursion suffices
        return _common_kernel_triangularize(X, Y)
    stacked = Matrix(f, X.rows + Y.rows)
    ker = nullspace(stacked)
    if not ker:
        raise InternalCheckError(
            "common-kernel recursion stalled (input outside the variety?)")
    v = ker[0]
    p = next(k for k, a in enumerate(v) if not f.is_zero(a))
    v = tuple(f.div(a, v[p]) for a in v)
    if not f.is_zero(dot(f, j, v)):
        raise InternalCheckError("covector does not kill the common kernel")
    keep = [k for k in range(m) if k != p]

    def project(u):
        c = u[p]
        return tuple(f.sub(u[k], f.mul(c, v[k])) for k in keep)

    Xq = Matrix.from_cols(f, [project(X.col(l)) for l in keep]) if m > 1 else None
    Yq = Matrix.from_cols(f, [project(Y.col(l)) for l in keep]) if m > 1 else None
    iq = project(i)
    jq = tuple(j[k] for k in keep)
    cols = [v]
    if m > 1:
        for w in _triangularize_member(Xq, Yq, iq, jq):
            lifted = list(w[:p]) + [f.zero] + list(w[p:])
            cols.append(tuple(lifted))
    return cols


def triangularize_pair(q: Quadruple) -> Matrix:
    """Invertible G with both G^-1 X G and G^-1 Y G strictly upper triangular.

    Works by quotienting out a vector in ker X and ker Y at every stage; on
    members that vector is always killed by j, so the whole quadruple
    descends to the quotient.
    """
    if not is_in_N(q):
        raise PreconditionError("quadruple is not in the variety")
    f = q.field
    cols = _triangularize_member(q.X, q.Y, q.i, q.j)
    G = Matrix.from_cols(f, cols)
    Gi = inverse(G)
    if not ((Gi * q.X * G).is_upper_triangular(strict=True)
            and (Gi * q.Y * G).is_upper_triangular(strict=True)):
        raise InternalCheckError("triangularization postcondition failed")
    return G


def adapted_basis(q: Quadruple) -> Matrix:
    """Change of basis G adapted to the two modules.

    In the new basis both matrices are upper triangular, column r of G is i
    (when i is nonzero), and row n+1-s of G^-1 is j (when j is nonzero).
    The first r columns are the right staircase basis in descending monomial
    order; the middle block triangularizes the induced commuting action on
    the annihilator of the left module; the last s columns are dual to the
    left staircase covectors.
    """
    if not is_in_N(q):
        raise PreconditionError("quadruple is not in the variety")
    f, n = q.field, q.n
    right = right_module(q.X, q.Y, q.i)
    left = left_module(q.X, q.Y, q.j)
    r, s = right.size, left.size
    E = list(right.basis)  # e_1 .. e_r with e_r = i

    if s:
        U = Matrix(f, tuple(left.basis))  # rows u_1 .. u_s, u_s = j
        ker_u = nullspace(U)
    else:
        ker_u = [basis_vec(f, n, k) for k in range(n)]
    if len(ker_u) != n - s:
        raise InternalCheckError("left-module annihilator has wrong dimension")

    # complement of the right module inside the annihilator
    tracker = SpanTracker(f, n)
    for e in E:
        if not tracker.add_if_independent(e):
            raise InternalCheckError("right staircase basis is dependent")
    W = [w for w in ker_u if tracker.add_if_independent(w)]
    if len(W) != n - s - r:
        raise InternalCheckError("right module does not sit inside the annihilator")

    middle: list[Vec] = []
    if W:
        # induced action on the quotient (annihilator / right module):
        # coordinates of X*w in the E+W frame, keeping only the W part
        frame = Matrix.from_cols(f, E + W)

        def quotient_matrix(M: Matrix) -> Matrix:
            cols = []
            for w in W:
                res = solve(frame, M.matvec(w))
                if res is None:
                    raise InternalCheckError("annihilator is not invariant")
                cols.append(tuple(res[0][r:]))
            return Matrix.from_cols(f, cols)

        Xq, Yq = quotient_matrix(q.X), quotient_matrix(q.Y)
        for wbar in _common_kernel_triangularize(Xq, Yq):
            u = zero_vec(f, n)
            for c, w in zip(wbar, W):
                u = tuple(f.add(a, f.mul(c, b)) for a, b in zip(u, w))
            middle.append(u)

    tail: list[Vec] = []
    if s:
        for t in range(s):
            rhs = tuple(f.one if k == s - 1 - t else f.zero for k in range(s))
            res = solve(U, rhs)
            if res is None:
                raise InternalCheckError("left staircase covectors are dependent")
            tail.append(res[0])

    G = Matrix.from_cols(f, E + middle + tail)
    Gi = inverse(G)
    if not ((Gi * q.X * G).is_upper_triangular()
            and (Gi * q.Y * G).is_upper_triangular()):
        raise InternalCheckError("adapted basis is not triangularizing")
    return G
