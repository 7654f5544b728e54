"""Border ideals of cyclic modules and the orbit invariant of the middle strata.

The annihilator of a cyclic module K[X,Y]i is a finite-codimension ideal of
K[x,y]; it is presented here by the module's staircase together with the
expansion of every border monomial in the staircase basis.

On a stratum with module dimensions (t, n-1-t) the quadruple determines a
pair of principal ideals: the annihilator of the one-step enlargement of the
right module (inside the covector module's kernel) and its covector mirror.
Both ideals always take a two-generator form

    <y^(t+1), x - a_1 y - ... - a_t y^t>    (y acts regularly), or
    <x^(t+1), y - a_1 x - ... - a_t x^t>    (x acts regularly),

and the coefficient vectors (a, b) of the two sides are a complete orbit
invariant.  The pair is conjugation-invariant by construction since only
module-theoretic data enters.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .errors import InternalCheckError, PreconditionError
from .fields import Field
from .linalg import (Matrix, Vec, basis_vec, dot, poly_no_const,
                     regular_nilpotent, solve, vec_is_zero, vec_scale,
                     vec_sub)
from .strata import (Quadruple, Side, SpanTracker, Staircase, classify,
                     left_module, left_monomial_vectors, monomial_key,
                     nullspace, right_module, right_monomial_vectors)


class Orientation(enum.Enum):
    Y_REGULAR = "YRegular"
    X_REGULAR = "XRegular"


@dataclass(frozen=True)
class BorderIdeal:
    """A point of the punctual fiber: staircase plus border expansions.

    ``border`` maps each cell outside the staircase whose predecessor lies
    inside to the coefficients of its monomial vector in the staircase basis
    (aligned with ``staircase.monomials``, descending).  Stored as a sorted
    tuple of (cell, coeffs) pairs so ideals compare by value.
    """

    staircase: Staircase
    border: tuple

    @property
    def codim(self) -> int:
        return self.staircase.size

    def coeffs(self, cell) -> tuple:
        for c, v in self.border:
            if c == cell:
                return v
        raise KeyError(cell)

    def key(self) -> tuple:
        return (tuple(self.staircase.sorted_cells()), self.border)


def border_cells(cells: frozenset) -> list:
    """Cells just outside the staircase with a predecessor inside."""
    out = set()
    for (a, b) in cells:
        for cand in ((a + 1, b), (a, b + 1)):
            if cand not in cells:
                out.add(cand)
    return sorted(out, key=monomial_key)


def annihilator_ideal(X: Matrix, Y: Matrix, i: Vec) -> BorderIdeal:
    """The ideal of polynomials annihilating i, as a border presentation."""
    f = X.field
    n = X.n
    if vec_is_zero(f, i):
        raise PreconditionError("annihilator of the zero vector is the unit ideal")
    st = right_module(X, Y, i)
    vectors = right_monomial_vectors(X, Y, i, n)
    basis = Matrix.from_cols(f, list(st.basis))
    entries = []
    for cell in border_cells(st.cells):
        a, b = cell
        if cell in vectors:
            v = vectors[cell]
        else:  # degree n border of a full staircase; the vector vanishes
            v = tuple(f.zero for _ in range(n))
        res = solve(basis, v)
        if res is None:
            raise InternalCheckError("border vector escapes the module")
        coeffs = res[0]
        # expansions may only involve kept monomials strictly above the border cell
        for c, m in zip(coeffs, st.monomials):
            if not f.is_zero(c) and monomial_key(m) <= monomial_key(cell):
                raise InternalCheckError("border expansion hit a smaller monomial")
        entries.append((cell, tuple(coeffs)))
    return BorderIdeal(st, tuple(entries))


# ---------------------------------------------------------------------------
# principal encodings and their normal forms


def principal_model(field: Field, m: int, orientation: Orientation, coeffs) -> tuple:
    """Matrices (Xc, Yc) on K^m realizing the principal ideal with cyclic e_m.

    Y_REGULAR gives <y^m, x - sum c_k y^k>: y acts as the regular shift and
    x as the corresponding polynomial; X_REGULAR swaps the roles.
    """
    J = regular_nilpotent(field, m)
    P = poly_no_const(J, coeffs)
    if orientation is Orientation.Y_REGULAR:
        return P, J
    return J, P


def principal_ideal_key(field: Field, m: int, orientation: Orientation, coeffs) -> tuple:
    Xc, Yc = principal_model(field, m, orientation, coeffs)
    return annihilator_ideal(Xc, Yc, basis_vec(field, m, m - 1)).key()


def reencode_principal(field: Field, m: int, coeffs):
    """Rewrite <u^m, v - sum c_k u^k> as <v^m, u - sum c'_k v^k>.

    Needs c_1 invertible (the second variable must itself act regularly).
    Returns None when c_1 = 0 and the rewrite does not exist.
    """
    if not coeffs or field.is_zero(coeffs[0]):
        return None
    J = regular_nilpotent(field, m)
    V = poly_no_const(J, coeffs)
    v = basis_vec(field, m, m - 1)
    cols = [v]
    for _ in range(m - 1):
        cols.append(V.matvec(cols[-1]))
    B = Matrix.from_cols(field, cols)
    res = solve(B, J.matvec(v))
    if res is None:
        raise InternalCheckError("re-encoding basis is singular despite c_1 != 0")
    c = res[0]
    if not field.is_zero(c[0]):
        raise InternalCheckError("re-encoded generator has a constant term")
    return tuple(c[1:])


@dataclass(frozen=True)
class PsiImage:
    """The pair of principal ideals attached to a middle-stratum quadruple."""

    field: Field
    n: int
    t: int
    right_orientation: Orientation
    a: tuple
    left_orientation: Orientation
    b: tuple

    def _side_key(self, m, orientation, coeffs):
        return principal_ideal_key(self.field, m, orientation, coeffs)

    def right_key(self):
        return self._side_key(self.t + 1, self.right_orientation, self.a)

    def left_key(self):
        return self._side_key(self.n - self.t, self.left_orientation, self.b)

    def __eq__(self, other):
        if not isinstance(other, PsiImage):
            return NotImplemented
        if (self.field, self.n, self.t) != (other.field, other.n, other.t):
            return False
        # same ideal may carry either orientation in degenerate cases;
        # fall back to comparing border presentations
        if (self.right_orientation, self.a) != (other.right_orientation, other.a):
            if self.right_key() != other.right_key():
                return False
        if (self.left_orientation, self.b) != (other.left_orientation, other.b):
            if self.left_key() != other.left_key():
                return False
        return True

    def __hash__(self):
        return hash((self.field, self.n, self.t))

    def _fmt_side(self, m, orientation, coeffs) -> str:
        f = self.field
        reg, other = ("y", "x") if orientation is Orientation.Y_REGULAR else ("x", "y")

        def power(var, k):
            return var if k == 1 else f"{var}^{k}"

        parts = [other]
        for k, c in enumerate(coeffs, start=1):
            if f.is_zero(c):
                continue
            cs = f.fmt(c)
            sign = "-"
            if cs.startswith("-"):
                sign, cs = "+", cs[1:]
            parts.append(f"{sign} {power(reg, k) if cs == '1' else cs + power(reg, k)}")
        return f"⟨{power(reg, m)}, {' '.join(parts)}⟩"

    def __str__(self) -> str:
        return (self._fmt_side(self.t + 1, self.right_orientation, self.a)
                + " ; "
                + self._fmt_side(self.n - self.t, self.left_orientation, self.b))


# ---------------------------------------------------------------------------
# the cyclic extension step


def _complement_vector(field, span_basis, ambient_basis):
    """First ambient basis vector independent of the given span (deterministic)."""
    n = len(ambient_basis[0]) if ambient_basis else 0
    tracker = SpanTracker(field, n)
    for v in span_basis:
        if not tracker.add_if_independent(v):
            raise InternalCheckError("span basis is dependent")
    for w in ambient_basis:
        if tracker.add_if_independent(w):
            return w
    return None


def _middle_stratum_data(q: Quadruple):
    label = classify(q)
    n = q.n
    t = label.r
    if label.commuting or label.s != n - 1 - t or not (1 <= t <= n - 2):
        raise PreconditionError(
            f"quadruple lies in stratum ({label.r},{label.s}); "
            "the invariant needs module dimensions (t, n-1-t) with 1 <= t <= n-2")
    return t


def extend_cyclic(q: Quadruple):
    """Enlarge the right module inside the left module's kernel.

    Returns (i', axis): a vector spanning the one-dimensional enlargement
    such that Y i' = i when axis is Y_REGULAR (then the right module is the
    span of i, Yi, ...), symmetrically for X_REGULAR.
    """
    f, n = q.field, q.n
    t = _middle_stratum_data(q)
    st = right_module(q.X, q.Y, q.i)
    lt = left_module(q.X, q.Y, q.j)
    U = Matrix(f, tuple(lt.basis))
    ker_u = nullspace(U)
    w = _complement_vector(f, list(st.basis), ker_u)
    if w is None:
        raise InternalCheckError("kernel of the left module does not enlarge the right module")
    basis = Matrix.from_cols(f, list(st.basis))
    respx = solve(basis, q.X.matvec(w))
    respy = solve(basis, q.Y.matvec(w))
    if respx is None or respy is None:
        raise InternalCheckError("X w or Y w escapes the right module")
    P = dict(zip(st.monomials, respx[0]))
    Q = dict(zip(st.monomials, respy[0]))
    c0 = Q[(0, 0)]
    d0 = P[(0, 0)]
    cellvec = dict(zip(st.monomials, st.basis))

    if not f.is_zero(c0):
        if st.cells != frozenset((0, b) for b in range(t)):
            raise InternalCheckError("y-regular branch with a non-column staircase")
        acc = w
        for b in range(1, t):
            acc = vec_sub(f, acc, vec_scale(f, Q[(0, b)], cellvec[(0, b - 1)]))
        i_prime = vec_scale(f, f.inv(c0), acc)
        if q.Y.matvec(i_prime) != tuple(q.i):
            raise InternalCheckError("extension does not map to the generator under Y")
        return i_prime, Orientation.Y_REGULAR

    if not f.is_zero(d0):
        if st.cells != frozenset((a, 0) for a in range(t)):
            raise InternalCheckError("x-regular branch with a non-row staircase")
        acc = w
        for a in range(1, t):
            acc = vec_sub(f, acc, vec_scale(f, P[(a, 0)], cellvec[(a - 1, 0)]))
        i_prime = vec_scale(f, f.inv(d0), acc)
        if q.X.matvec(i_prime) != tuple(q.i):
            raise InternalCheckError("extension does not map to the generator under X")
        return i_prime, Orientation.X_REGULAR

    raise InternalCheckError("neither expansion has a constant term")


def _extract_side_coeffs(f, apply_reg, apply_other, start, generator, m):
    """Coefficients c with other = sum c_k reg^k on the cyclic chain from start.

    ``apply_reg`` is the regular action (builds the chain start, reg*start =
    generator, ...), ``apply_other`` the action being expanded."""
    chain = [start]
    for _ in range(m):
        chain.append(apply_reg(chain[-1]))
    if chain[1] != tuple(generator):
        raise InternalCheckError("cyclic chain does not pass through the generator")
    B = Matrix.from_cols(f, chain)
    res = solve(B, apply_other(start))
    if res is None:
        raise InternalCheckError("regular action does not span the enlargement")
    c = res[0]
    if not f.is_zero(c[0]):
        raise InternalCheckError("nilpotent action acquired a constant term")
    return tuple(c[1:])


def psi(q: Quadruple) -> PsiImage:
    """Orbit invariant: the pair of principal ideals of the two enlargements.

    The right side prefers the y-regular encoding and the left side the
    x-regular one; a computed opposite encoding is rewritten whenever its
    leading coefficient permits, so equal orbits print identically.
    """
    f, n = q.field, q.n
    t = _middle_stratum_data(q)

    # right side
    i_prime, ro = extend_cyclic(q)
    if ro is Orientation.Y_REGULAR:
        a = _extract_side_coeffs(f, q.Y.matvec, q.X.matvec, i_prime, q.i, t)
    else:
        a = _extract_side_coeffs(f, q.X.matvec, q.Y.matvec, i_prime, q.i, t)
    if ro is Orientation.X_REGULAR:
        re = reencode_principal(f, t + 1, a)
        if re is not None:
            ro, a = Orientation.Y_REGULAR, re

    # left side: the covector mirror, done on the transposed data
    qt = Quadruple(f, n, q.Y.transpose(), q.X.transpose(), tuple(q.j), tuple(q.i))
    j_prime, lo_t = extend_cyclic(qt)
    # the transpose swaps the roles of x and y, so flip the reported axis
    lo = Orientation.X_REGULAR if lo_t is Orientation.Y_REGULAR else Orientation.Y_REGULAR
    if lo is Orientation.X_REGULAR:
        b = _extract_side_coeffs(f, qt.Y.matvec, qt.X.matvec, j_prime, qt.i, n - 1 - t)
    else:
        b = _extract_side_coeffs(f, qt.X.matvec, qt.Y.matvec, j_prime, qt.i, n - 1 - t)
    if lo is Orientation.Y_REGULAR:
        re = reencode_principal(f, n - t, b)
        if re is not None:
            lo, b = Orientation.X_REGULAR, re

    return PsiImage(f, n, t, ro, tuple(a), lo, tuple(b))
