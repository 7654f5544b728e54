"""Canonical representatives of the middle strata, stabilizers, orbit tests.

A stratum with module dimensions (t, n-1-t) is a single group orbit per
value of the invariant pair (a, b), and each orbit has a distinguished
representative: X carries the a-coefficients as a Toeplitz band in the
upper-left corner and a shift in the lower-right, Y carries a shift in the
upper-left and the b-band in the lower-right, and the few remaining entries
of Y together with the vector i and covector j are forced, row by row, by
the requirement that XY - YX have rank one.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Optional

from .errors import InternalCheckError, PreconditionError, SearchExhaustedError
from .fields import Field, PrimeField
from .hilbert import Orientation, PsiImage, psi
from .linalg import (Matrix, Vec, inverse, is_invertible, nullspace, solve,
                     vec_is_zero)
from .strata import Quadruple, classify, is_in_N


@dataclass(frozen=True)
class CanonicalParams:
    """Orbit coordinates (n, t, a_1..a_t, b_1..b_{n-1-t}) with a_1 b_1 != 1."""

    field: Field
    n: int
    t: int
    a: tuple
    b: tuple

    def __post_init__(self):
        n, t = self.n, self.t
        if not 1 <= t <= n - 2:
            raise PreconditionError(f"t={t} outside [1, {n - 2}]")
        if len(self.a) != t or len(self.b) != n - 1 - t:
            raise PreconditionError("coefficient lists have wrong lengths")
        f = self.field
        if f.mul(self.a[0], self.b[0]) == f.one:
            raise PreconditionError("a_1 * b_1 = 1 parametrizes no orbit")


@dataclass(frozen=True)
class StabilizerReport:
    dim: int
    basis: tuple  # of Matrix, each satisfying all four linear conditions


def canonical_quadruple(p: CanonicalParams) -> Quadruple:
    """The distinguished representative of the orbit with coordinates p."""
    f, n, t = p.field, p.n, p.t
    a, b = p.a, p.b
    s = n - 1 - t
    zero, one = f.zero, f.one

    X = [[zero] * n for _ in range(n)]
    Y = [[zero] * n for _ in range(n)]
    for r in range(t):            # a-band: rows 1..t, columns up to t+1
        for c in range(r + 1, t + 1):
            X[r][c] = a[c - r - 1]
    for r in range(t, n - 1):     # shift in the lower-right block
        X[r][r + 1] = one
    for r in range(t):            # shift in the upper-left block
        Y[r][r + 1] = one
    for r in range(t, n):         # b-band
        for c in range(r + 1, n):
            Y[r][c] = b[c - r - 1]

    # the forced data: row t of the commutator block identity fixes j, and
    # each higher row fixes one entry of i plus one shifted row of Y
    jt = [f.sub(one, f.mul(a[0], b[0]))] + [f.neg(f.mul(a[0], b[l])) for l in range(1, s)]
    itilde = [zero] * t
    itilde[t - 1] = one
    y13 = [[zero] * s for _ in range(t)]  # rows 1..t, columns t+2..n
    for k in range(t - 1, 0, -1):         # 1-based row index, downward
        rk = [zero] * s
        for m in range(1, t - k + 1):
            row = y13[k + m - 1]
            for l in range(s):
                rk[l] = f.add(rk[l], f.mul(a[m - 1], row[l]))
        for l in range(s):
            rk[l] = f.add(rk[l], f.mul(a[t - k], b[l]))
        ik = f.neg(f.div(rk[0], jt[0]))
        shifted = [f.add(rk[l], f.mul(ik, jt[l])) for l in range(s)]
        if not f.is_zero(shifted[0]):
            raise InternalCheckError("rank-one elimination lost consistency")
        itilde[k - 1] = ik
        y13[k - 1] = shifted[1:] + [zero]
    for k in range(t - 1):
        for l in range(s - 1):            # last column of the block stays zero
            Y[k][t + 1 + l] = y13[k][l]

    i = tuple(itilde) + (zero,) * (n - t)
    j = (zero,) * (t + 1) + tuple(jt)
    q = Quadruple(f, n, Matrix.from_rows(f, X), Matrix.from_rows(f, Y), i, j)
    if not is_in_N(q):
        raise InternalCheckError("canonical representative fails membership")
    return q


def stabilizer_dim(q: Quadruple) -> StabilizerReport:
    """Dimension and basis of {Z : ZX = XZ, ZY = YZ, Zi = 0, jZ = 0}."""
    f, n = q.field, q.n
    X, Y, i, j = q.X, q.Y, q.i, q.j
    rows = []

    def var(r, c):
        return r * n + c

    for M in (X, Y):
        for r in range(n):
            for c in range(n):
                row = [f.zero] * (n * n)
                for k in range(n):
                    row[var(r, k)] = f.add(row[var(r, k)], M.rows[k][c])
                    row[var(k, c)] = f.sub(row[var(k, c)], M.rows[r][k])
                rows.append(row)
    for r in range(n):
        row = [f.zero] * (n * n)
        for k in range(n):
            row[var(r, k)] = i[k]
        rows.append(row)
    for c in range(n):
        row = [f.zero] * (n * n)
        for k in range(n):
            row[var(k, c)] = j[k]
        rows.append(row)

    basis = nullspace(Matrix(f, tuple(tuple(r) for r in rows)))
    mats = tuple(Matrix.from_rows(f, [v[r * n:(r + 1) * n] for r in range(n)])
                 for v in basis)
    return StabilizerReport(len(mats), mats)


def conjugate(q: Quadruple, G: Matrix) -> Quadruple:
    """The group action (X, Y, i, j) -> (GXG^-1, GYG^-1, Gi, jG^-1)."""
    if not is_invertible(G):
        raise PreconditionError("conjugator is singular")
    Gi = inverse(G)
    return Quadruple(q.field, q.n, G * q.X * Gi, G * q.Y * Gi,
                     G.matvec(q.i), Gi.covec(q.j))


def _intertwiner_space(q1: Quadruple, q2: Quadruple):
    """Affine space of G with G X1 = X2 G, G Y1 = Y2 G, G i1 = i2, j2 G = j1."""
    f, n = q1.field, q1.n
    rows, rhs = [], []

    def var(r, c):
        return r * n + c

    for M1, M2 in ((q1.X, q2.X), (q1.Y, q2.Y)):
        for r in range(n):
            for c in range(n):
                row = [f.zero] * (n * n)
                for k in range(n):
                    row[var(r, k)] = f.add(row[var(r, k)], M1.rows[k][c])
                    row[var(k, c)] = f.sub(row[var(k, c)], M2.rows[r][k])
                rows.append(row)
                rhs.append(f.zero)
    for r in range(n):
        row = [f.zero] * (n * n)
        for k in range(n):
            row[var(r, k)] = q1.i[k]
        rows.append(row)
        rhs.append(q2.i[r])
    for c in range(n):
        row = [f.zero] * (n * n)
        for k in range(n):
            row[var(k, c)] = q2.j[k]
        rows.append(row)
        rhs.append(q1.j[c])
    return solve(Matrix(f, tuple(tuple(r) for r in rows)), tuple(rhs))


def _verify_conjugator(q1: Quadruple, q2: Quadruple, G: Matrix) -> bool:
    return (G * q1.X == q2.X * G and G * q1.Y == q2.Y * G
            and G.matvec(q1.i) == tuple(q2.i)
            and G.covec(q2.j) == tuple(q1.j))


_RANDOM_TRIES = 32


def orbit_equivalent(q1: Quadruple, q2: Quadruple):
    """Decide whether two middle-stratum quadruples lie on one group orbit.

    Equivalence is tested through the ideal-pair invariant; on a match the
    intertwiner system is solved and its solution space searched for an
    invertible element, which is returned after exact verification.
    """
    if q1.field != q2.field or q1.n != q2.n:
        raise PreconditionError("quadruples live in different spaces")
    for q in (q1, q2):
        lab = classify(q)
        if lab.commuting or lab.r + lab.s != q.n - 1:
            raise PreconditionError(
                f"stratum ({lab.r},{lab.s}) is outside the orbit-classified range")
    if psi(q1) != psi(q2):
        return False, None

    f, n = q1.field, q1.n
    res = _intertwiner_space(q1, q2)
    if res is None:
        raise SearchExhaustedError("matching invariants but no intertwiner at all")
    x0, kernel = res

    def as_matrix(v):
        return Matrix.from_rows(f, [v[r * n:(r + 1) * n] for r in range(n)])

    def candidates():
        yield x0
        for k in kernel:
            yield tuple(f.add(a, b) for a, b in zip(x0, k))
            yield tuple(f.sub(a, b) for a, b in zip(x0, k))
        if isinstance(f, PrimeField) and f.p <= 7:
            # tiny fields: exhaust combinations of up to two basis elements
            for ki in range(len(kernel)):
                for c in range(f.p):
                    yield tuple(f.add(a, f.mul(c, b))
                                for a, b in zip(x0, kernel[ki]))
            for ki in range(len(kernel)):
                for kj in range(ki + 1, len(kernel)):
                    for c1 in range(f.p):
                        for c2 in range(f.p):
                            yield tuple(
                                f.add(a, f.add(f.mul(c1, b1), f.mul(c2, b2)))
                                for a, b1, b2 in zip(x0, kernel[ki], kernel[kj]))
        rng = random.Random(0x0BEEF)
        for _ in range(_RANDOM_TRIES):
            v = list(x0)
            for k in kernel:
                c = (f.from_int(rng.randint(-9, 9)) if not isinstance(f, PrimeField)
                     else rng.randrange(f.p))
                v = [f.add(a, f.mul(c, b)) for a, b in zip(v, k)]
            yield tuple(v)

    for cand in candidates():
        G = as_matrix(cand)
        if is_invertible(G) and _verify_conjugator(q1, q2, G):
            return True, G
    raise SearchExhaustedError("no invertible intertwiner found within the try budget")
