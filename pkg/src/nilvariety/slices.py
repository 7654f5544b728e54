"""Constructors for points that extend a fixed cyclic module block.

Fixing a commuting nilpotent pair (X1, Y1) with cyclic vector i on the
first r coordinates, the quadruples of the form

    X' = [[X1, X3], [0, X2]],   Y' = [[Y1, Y3], [0, Y2]],   (X', Y', i, j')

with XY - YX + i j' = 0 are parametrized by a commuting nilpotent outer pair
(X2, Y2) plus one free covector per row of the module's staircase and one
extra: writing X3 = sum of staircase vectors times covectors alpha(a,b) and
Y3 likewise with beta(a,b), the membership identity fixes j', every beta on
a cell with a right neighbour, and every alpha on a first-column cell with
an upper neighbour, each as an explicit covector expression in data attached
to strictly larger monomials.  The evaluation below walks the determined
cells in descending monomial order of their defining equations, which makes
the recursion non-recursive.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .errors import InternalCheckError, PreconditionError, SearchExhaustedError
from .fields import Field
from .sampling import rand_scalar as _rand_scalar, rand_vec as _rand_covec_n
from .linalg import (Matrix, Vec, basis_vec, commutator, commutator_defect,
                     is_nilpotent, poly_no_const, rank, regular_nilpotent,
                     solve, vec_add, vec_is_zero, vec_scale, vec_sub,
                     zero_vec)
from .strata import (Quadruple, Staircase, classify, monomial_key,
                     right_module, right_monomial_vectors)


@dataclass(frozen=True)
class SliceData:
    """Free data for one slice point.

    alpha/beta map staircase cells to covectors on the outer block; exactly
    the free cells must be supplied (betas off lam_x, alphas off the
    determined first-column set)."""

    field: Field
    n: int
    r: int
    X1: Matrix
    Y1: Matrix
    i: Vec
    X2: Matrix
    Y2: Matrix
    alpha: dict
    beta: dict


@dataclass(frozen=True)
class RegularSliceParams:
    """Slice data specialized to a regular inner block.

    X1 is the r x r regular shift, Y1 = sum_u c_u X1^u, the outer Y2 is the
    regular shift of size n-r with X2 = sum_v d_v Y2^v.  Lists c and d may
    be shorter than r-1 and n-r-1; missing coefficients are zero.  Free
    covectors: alpha_rows[t] for the staircase cells (t, 0) and beta_top for
    the last cell (r-1, 0)."""

    field: Field
    n: int
    r: int
    c: tuple
    d: tuple
    alpha_rows: tuple
    beta_top: Vec


def _determined_alpha_cells(st: Staircase) -> set:
    return {(0, b) for (a, b) in st.lam_y if a == 0}


def _covec_mul(f: Field, u: Vec, M: Matrix) -> Vec:
    return M.covec(u)


def build_slice_point(s: SliceData) -> Quadruple:
    """Assemble the quadruple determined by one set of slice data."""
    f, n, r = s.field, s.n, s.r
    m = n - r
    if not (0 <= r <= n):
        raise PreconditionError("block size out of range")
    if s.X1.nrows != r or s.Y1.nrows != r or s.X2.nrows != m or s.Y2.nrows != m:
        raise PreconditionError("block shapes do not match r and n")
    if len(s.i) != n or any(not f.is_zero(s.i[k]) for k in range(r, n)):
        raise PreconditionError("generator must be supported in the first r coordinates")
    for M, N in ((s.X1, s.Y1), (s.X2, s.Y2)):
        if M.nrows and not (is_nilpotent(M) and is_nilpotent(N)
                            and commutator(M, N).is_zero()):
            raise PreconditionError("diagonal blocks must be commuting nilpotent pairs")

    if m == 0:
        if s.alpha or s.beta:
            raise PreconditionError("no covector data is allowed when the outer block is empty")
        return Quadruple(f, n, s.X1, s.Y1, tuple(s.i), zero_vec(f, n))

    i_r = tuple(s.i[:r])
    if r == 0:
        raise PreconditionError("an empty inner module leaves the covector unconstrained; "
                                "supply r >= 1")
    st = right_module(s.X1, s.Y1, i_r)
    if st.size != r:
        raise PreconditionError("generator is not cyclic for the inner pair")

    free_beta = set(st.cells) - set(st.lam_x)
    det_alpha = _determined_alpha_cells(st)
    free_alpha = set(st.cells) - det_alpha
    if set(s.beta) != free_beta or set(s.alpha) != free_alpha:
        raise PreconditionError(
            f"free covectors must be given exactly on beta:{sorted(free_beta)} "
            f"alpha:{sorted(free_alpha)}")
    for cov in list(s.alpha.values()) + list(s.beta.values()):
        if len(cov) != m:
            raise PreconditionError("covectors must live on the outer block")

    # expansions of the out-of-staircase monomial vectors in the staircase basis
    vectors = right_monomial_vectors(s.X1, s.Y1, i_r, r)
    basis = Matrix.from_cols(f, list(st.basis))

    def expansion(cell):
        v = vectors.get(cell, zero_vec(f, r))
        res = solve(basis, v)
        if res is None:
            raise InternalCheckError("monomial vector escapes the inner module")
        return dict(zip(st.monomials, res[0]))

    # w(c,d): the staircase coordinates of the free covectors' overflow terms
    w = {cell: zero_vec(f, m) for cell in st.cells}
    for (a, b) in st.cells - st.lam_x:
        exp = expansion((a + 1, b))
        for cell, coeff in exp.items():
            if not f.is_zero(coeff):
                w[cell] = vec_add(f, w[cell], vec_scale(f, coeff, s.beta[(a, b)]))
    for (a, b) in st.cells - st.lam_y:
        exp = expansion((a, b + 1))
        for cell, coeff in exp.items():
            if not f.is_zero(coeff):
                w[cell] = vec_sub(f, w[cell], vec_scale(f, coeff, s.alpha[(a, b)]))

    alpha = dict(s.alpha)
    beta = dict(s.beta)
    targets = ([("beta", (a, b), (a + 1, b)) for (a, b) in st.lam_x]
               + [("alpha", cell, (0, cell[1] + 1)) for cell in det_alpha])
    targets.sort(key=lambda item: monomial_key(item[2]), reverse=True)
    for kind, cell, defining in targets:
        a, b = defining
        if kind == "beta":
            val = vec_sub(f, _covec_mul(f, alpha[defining], s.Y2),
                          _covec_mul(f, beta[defining], s.X2))
            if b > 0:
                val = vec_add(f, val, alpha[(a, b - 1)])
            val = vec_sub(f, val, w[defining])
            beta[cell] = val
        else:
            val = vec_sub(f, _covec_mul(f, beta[defining], s.X2),
                          _covec_mul(f, alpha[defining], s.Y2))
            val = vec_add(f, val, w[defining])
            alpha[cell] = val

    j_out = vec_sub(f, _covec_mul(f, beta[(0, 0)], s.X2),
                    _covec_mul(f, alpha[(0, 0)], s.Y2))

    cellvec = dict(zip(st.monomials, st.basis))
    X3 = [[f.zero] * m for _ in range(r)]
    Y3 = [[f.zero] * m for _ in range(r)]
    for cell in st.cells:
        v = cellvec[cell]
        for rr in range(r):
            if f.is_zero(v[rr]):
                continue
            for cc in range(m):
                X3[rr][cc] = f.add(X3[rr][cc], f.mul(v[rr], alpha[cell][cc]))
                Y3[rr][cc] = f.add(Y3[rr][cc], f.mul(v[rr], beta[cell][cc]))

    def assemble(T1, T3, T2):
        rows = []
        for rr in range(r):
            rows.append(tuple(T1.rows[rr]) + tuple(T3[rr]))
        for rr in range(m):
            rows.append((f.zero,) * r + tuple(T2.rows[rr]))
        return Matrix(f, tuple(rows))

    Xp = assemble(s.X1, X3, s.X2)
    Yp = assemble(s.Y1, Y3, s.Y2)
    j_full = (f.zero,) * r + tuple(j_out)
    out = Quadruple(f, n, Xp, Yp, tuple(s.i), j_full)

    if not commutator_defect(Xp, Yp, out.i, out.j).is_zero():
        raise InternalCheckError("slice point violates the membership identity")
    st_out = right_module(Xp, Yp, out.i)
    if st_out.cells != st.cells:
        raise InternalCheckError("slice point changed the inner staircase")
    return out


def regular_slice_point(p: RegularSliceParams) -> Quadruple:
    """Slice point with regular inner shift; lands in the stratum
    (r, n-1-r) whenever c_1 d_1 != 1 and alpha_0 generates the dual of the
    outer block."""
    f, n, r = p.field, p.n, p.r
    m = n - r
    if not 1 <= r <= n:
        raise PreconditionError("block size out of range")
    if len(p.c) > max(r - 1, 0) or len(p.d) > max(m - 1, 0):
        raise PreconditionError("too many inner or outer polynomial coefficients")
    c = tuple(p.c) + (f.zero,) * (max(r - 1, 0) - len(p.c))
    d = tuple(p.d) + (f.zero,) * (max(m - 1, 0) - len(p.d))
    c1 = c[0] if c else f.zero
    d1 = d[0] if d else f.zero
    if f.mul(c1, d1) == f.one:
        raise PreconditionError("c_1 d_1 = 1 voids the stratum conclusion")

    X1 = regular_nilpotent(f, r)
    Y1 = poly_no_const(X1, c)
    i = tuple(basis_vec(f, r, r - 1)) + (f.zero,) * m
    if m == 0:
        return Quadruple(f, n, X1, Y1, i, zero_vec(f, n))

    Y2 = regular_nilpotent(f, m)
    X2 = poly_no_const(Y2, d)
    if len(p.alpha_rows) != r or any(len(al) != m for al in p.alpha_rows):
        raise PreconditionError("alpha_rows must hold r covectors on the outer block")
    if len(p.beta_top) != m:
        raise PreconditionError("beta_top must be a covector on the outer block")

    # the row recursion: beta_{t-1} = -beta_t X2 + alpha_t Y2 + sum c_u alpha_{t-u}
    alpha = {t: tuple(p.alpha_rows[t]) for t in range(r)}
    beta = {r - 1: tuple(p.beta_top)}
    for t in range(r - 1, 0, -1):
        val = vec_sub(f, _covec_mul(f, alpha[t], Y2), _covec_mul(f, beta[t], X2))
        for u in range(1, t + 1):
            val = vec_add(f, val, vec_scale(f, c[u - 1], alpha[t - u]))
        beta[t - 1] = val
    j_out = vec_sub(f, _covec_mul(f, beta[0], X2), _covec_mul(f, alpha[0], Y2))

    vcell = {0: tuple(basis_vec(f, r, r - 1))}
    for t in range(1, r):
        vcell[t] = X1.matvec(vcell[t - 1])
    X3 = [[f.zero] * m for _ in range(r)]
    Y3 = [[f.zero] * m for _ in range(r)]
    for t in range(r):
        v = vcell[t]
        for rr in range(r):
            if f.is_zero(v[rr]):
                continue
            for cc in range(m):
                X3[rr][cc] = f.add(X3[rr][cc], f.mul(v[rr], alpha[t][cc]))
                Y3[rr][cc] = f.add(Y3[rr][cc], f.mul(v[rr], beta[t][cc]))

    rows = []
    for rr in range(r):
        rows.append(tuple(X1.rows[rr]) + tuple(X3[rr]))
    for rr in range(m):
        rows.append((f.zero,) * r + tuple(X2.rows[rr]))
    Xp = Matrix(f, tuple(rows))
    rows = []
    for rr in range(r):
        rows.append(tuple(Y1.rows[rr]) + tuple(Y3[rr]))
    for rr in range(m):
        rows.append((f.zero,) * r + tuple(Y2.rows[rr]))
    Yp = Matrix(f, tuple(rows))
    j_full = (f.zero,) * r + tuple(j_out)
    out = Quadruple(f, n, Xp, Yp, i, j_full)
    if not commutator_defect(Xp, Yp, out.i, out.j).is_zero():
        raise InternalCheckError("regular slice point violates the membership identity")

    alpha0_cyclic = rank(Matrix(f, tuple(
        _iterate_covec(f, alpha[0], Y2, m)))) == m
    if f.mul(c1, d1) != f.one and alpha0_cyclic:
        lab = classify(out)
        if (lab.r, lab.s) != (r, n - 1 - r):
            raise InternalCheckError(
                f"regular slice point landed in ({lab.r},{lab.s}) "
                f"instead of ({r},{n - 1 - r})")
    return out


def _iterate_covec(f, u, M, count):
    out = [tuple(u)]
    for _ in range(count - 1):
        out.append(M.covec(out[-1]))
    return out


_JUMP_TRIES = 64


def stratum_jump_sample(q: Quadruple, seed: int):
    """Resample the complement of the module of q into a boundary stratum.

    Keeps the restriction of (X, Y) to the module of i together with i
    itself, replaces the outer block by a regular shift with a random
    commuting partner and draws the free covectors at random (seeded).
    Returns the first sample whose module dimensions add up to n - 1,
    together with its right dimension t."""
    lab = classify(q)
    r, s = lab.r, lab.s
    n, f = q.n, q.field
    if not 0 < r + s < n - 1:
        raise PreconditionError(
            f"stratum ({r},{s}) admits no jump; need 0 < r+s < n-1")
    rng = random.Random(seed)
    m = n - r

    if r == 0:
        # no inner block: sample commuting outer pairs and a covector with a
        # one-dimensional drop (the top Krylov power must die)
        for _ in range(_JUMP_TRIES):
            X2 = regular_nilpotent(f, n)
            Y2 = poly_no_const(X2, tuple(_rand_scalar(f, rng) for _ in range(n - 1)))
            j = (f.zero,) + _rand_covec_n(f, n - 1, rng)
            cand = Quadruple(f, n, X2, Y2, zero_vec(f, n), j)
            lab2 = classify(cand)
            if lab2.r + lab2.s == n - 1:
                return cand, lab2.r
        raise SearchExhaustedError("resample-exhausted: no boundary stratum hit")

    st = right_module(q.X, q.Y, q.i)
    basis = Matrix.from_cols(f, list(st.basis))

    def restrict(M):
        cols = []
        for v in st.basis:
            res = solve(basis, M.matvec(v))
            if res is None:
                raise InternalCheckError("module is not invariant")
            cols.append(res[0])
        return Matrix.from_cols(f, cols)

    X1, Y1 = restrict(q.X), restrict(q.Y)
    i_slice = tuple(basis_vec(f, r, r - 1)) + (f.zero,) * m  # basis ends at i
    st_inner = right_module(X1, Y1, tuple(i_slice[:r]))
    free_beta = set(st_inner.cells) - set(st_inner.lam_x)
    free_alpha = set(st_inner.cells) - _determined_alpha_cells(st_inner)

    for _ in range(_JUMP_TRIES):
        X2 = regular_nilpotent(f, m)
        Y2 = poly_no_const(X2, tuple(_rand_scalar(f, rng) for _ in range(m - 1))) \
            if m > 1 else Matrix.zeros(f, m, m)
        data = SliceData(f, n, r, X1, Y1, i_slice, X2, Y2,
                         {cell: _rand_covec_n(f, m, rng) for cell in free_alpha},
                         {cell: _rand_covec_n(f, m, rng) for cell in free_beta})
        cand = build_slice_point(data)
        lab2 = classify(cand)
        if lab2.r + lab2.s == n - 1:
            return cand, lab2.r
    raise SearchExhaustedError("resample-exhausted: no boundary stratum hit")
