"""The companion variety of nilpotent pairs whose sum is a rank-one matrix.

Points are (A, B, i, j) with A, B nilpotent and A + B = i*j.  Such pairs are
always simultaneously triangularizable, the generated modules close up under
A alone, and every point deforms along an explicit line to a block canonical
form.  The module dimension r = dim K[A]i is the only discrete invariant.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InternalCheckError, PreconditionError
from .fields import Field
from .linalg import (Matrix, Vec, basis_vec, dot, inverse, is_nilpotent,
                     nullspace, outer, regular_nilpotent, solve, vec_add,
                     vec_is_zero, vec_scale, zero_vec)
from .strata import Quadruple, SpanTracker
from .canonical import stabilizer_dim


@dataclass(frozen=True)
class SQuadruple:
    field: Field
    n: int
    A: Matrix
    B: Matrix
    i: Vec
    j: Vec

    def __post_init__(self):
        n = self.n
        if not (self.A.nrows == self.A.ncols == n and
                self.B.nrows == self.B.ncols == n and
                len(self.i) == n and len(self.j) == n):
            raise PreconditionError("quadruple shapes do not match n")


def squadruple(field: Field, A: Matrix, B: Matrix, i: Vec, j: Vec) -> SQuadruple:
    return SQuadruple(field, A.n, A, B, tuple(i), tuple(j))


def is_in_S(q: SQuadruple) -> bool:
    """True iff A and B are nilpotent and A + B - i*j = 0."""
    return (is_nilpotent(q.A) and is_nilpotent(q.B)
            and (q.A + q.B - outer(q.field, q.i, q.j)).is_zero())


# ---------------------------------------------------------------------------
# triangularization by the two-sided kernel recursion


def _tri_S(A: Matrix, B: Matrix, i: Vec, j: Vec) -> list:
    f = A.field
    m = A.n
    if m == 0:
        return []
    if m == 1:
        return [basis_vec(f, 1, 0)]
    ker = nullspace(B)
    if not ker:
        raise InternalCheckError("nilpotent matrix with trivial kernel")
    v = ker[0]
    jv = dot(f, j, v)

    if f.is_zero(jv):
        # A v = i (j v) - B v = 0 as well: quotient out v, v leads the basis
        if not vec_is_zero(f, A.matvec(v)):
            raise InternalCheckError("kernel vector not shared (input outside the variety?)")
        p = next(k for k, a in enumerate(v) if not f.is_zero(a))
        v = tuple(f.div(a, v[p]) for a in v)
        keep = [k for k in range(m) if k != p]

        def project(u):
            c = u[p]
            return tuple(f.sub(u[k], f.mul(c, v[k])) for k in keep)

        Aq = Matrix.from_cols(f, [project(A.col(l)) for l in keep]) if m > 1 else None
        Bq = Matrix.from_cols(f, [project(B.col(l)) for l in keep]) if m > 1 else None
        cols = [v]
        if m > 1:
            for wbar in _tri_S(Aq, Bq, project(i), tuple(j[k] for k in keep)):
                cols.append(tuple(list(wbar[:p]) + [f.zero] + list(wbar[p:])))
        return cols

    # j v != 0: then i = Av after scaling; restrict to the kernel of a
    # covector killed by A, which absorbs both images; the complement closes
    # the basis at the far end
    v = vec_scale(f, f.inv(jv), v)
    if A.matvec(v) != tuple(i):
        raise InternalCheckError("generator mismatch (input outside the variety?)")
    left_ker = nullspace(A.transpose())
    if not left_ker:
        raise InternalCheckError("nilpotent matrix with trivial left kernel")
    w = left_ker[0]
    C = nullspace(Matrix(f, (tuple(w),)))  # basis of the hyperplane w = 0
    frame = Matrix.from_cols(f, C)

    def restrict_col(u):
        res = solve(frame, u)
        if res is None:
            raise InternalCheckError("image escapes the covector kernel")
        return res[0]

    Ar = Matrix.from_cols(f, [restrict_col(A.matvec(c)) for c in C])
    Br = Matrix.from_cols(f, [restrict_col(B.matvec(c)) for c in C])
    ir = restrict_col(tuple(i))
    jr = tuple(dot(f, j, c) for c in C)
    cols = [frame.matvec(g) for g in _tri_S(Ar, Br, ir, jr)]
    p = next(k for k, a in enumerate(w) if not f.is_zero(a))
    cols.append(basis_vec(f, m, p))
    return cols


def triangularize_S(q: SQuadruple) -> Matrix:
    """Invertible G making both A and B strictly upper triangular."""
    if not is_in_S(q):
        raise PreconditionError("quadruple is not in the variety")
    f = q.field
    G = Matrix.from_cols(f, _tri_S(q.A, q.B, q.i, q.j))
    Gi = inverse(G)
    if not ((Gi * q.A * G).is_upper_triangular(strict=True)
            and (Gi * q.B * G).is_upper_triangular(strict=True)):
        raise InternalCheckError("triangularization postcondition failed")
    return G


# ---------------------------------------------------------------------------
# classification


def _krylov_dim_right(A: Matrix, i: Vec) -> int:
    f = A.field
    tracker = SpanTracker(f, A.n)
    v = tuple(i)
    for _ in range(A.n):
        if not tracker.add_if_independent(v):
            break
        v = A.matvec(v)
    return tracker.dim


def _krylov_dim_left(A: Matrix, j: Vec) -> int:
    return _krylov_dim_right(A.transpose(), tuple(j))


def classify_S(q: SQuadruple):
    """(dim K[A]i, dim j K[A]); single-matrix closures suffice since A + B
    kills the generated module."""
    if not is_in_S(q):
        raise PreconditionError("quadruple is not in the variety")
    return _krylov_dim_right(q.A, q.i), _krylov_dim_left(q.A, q.j)


def trace_pairing_check(q: SQuadruple, maxlen: int) -> bool:
    """Exhaustively test j w(A,B) i = 0 over all words w of length <= maxlen
    (including the empty word)."""
    f = q.field
    level = [tuple(q.i)]
    if not f.is_zero(dot(f, q.j, level[0])):
        return False
    for _ in range(maxlen):
        nxt = []
        for v in level:
            for M in (q.A, q.B):
                u = M.matvec(v)
                if not f.is_zero(dot(f, q.j, u)):
                    return False
                nxt.append(u)
        level = nxt
    return True


# ---------------------------------------------------------------------------
# canonical forms, deformation, stabilizers


def s_canonical(field: Field, n: int, r: int, Aprime: Matrix = None) -> SQuadruple:
    """Block form: A = [[J_r, A'], [0, J_{n-r}]], i and j the unit vectors in
    positions r and r+1, B = i*j - A."""
    if not 0 <= r <= n - 1:
        raise PreconditionError("r must lie in [0, n-1]")
    f = field
    m = n - r
    if Aprime is None:
        Aprime = Matrix.zeros(f, r, m)
    if Aprime.nrows != r or Aprime.ncols != m:
        raise PreconditionError("corner block has the wrong shape")
    rows = []
    Jr = regular_nilpotent(f, r)
    Jm = regular_nilpotent(f, m)
    for k in range(r):
        rows.append(tuple(Jr.rows[k]) + tuple(Aprime.rows[k]))
    for k in range(m):
        rows.append((f.zero,) * r + tuple(Jm.rows[k]))
    A = Matrix(f, tuple(rows))
    i = basis_vec(f, n, r - 1) if r >= 1 else zero_vec(f, n)
    j = basis_vec(f, n, r)
    B = outer(f, i, j) - A
    q = SQuadruple(f, n, A, B, i, j)
    if not is_in_S(q):
        raise InternalCheckError("canonical block form fails membership")
    return q


def s_witness(field: Field, n: int, r: int) -> SQuadruple:
    """(L, i_r j_r - L, i_r, j_r) with L the full regular shift; lies in the
    stratum pair (r, n-r) exactly."""
    f = field
    L = regular_nilpotent(f, n)
    i = basis_vec(f, n, r - 1) if r >= 1 else zero_vec(f, n)
    j = basis_vec(f, n, r) if r <= n - 1 else zero_vec(f, n)
    return SQuadruple(f, n, L, outer(f, i, j) - L, i, j)


def _s_adapted_frame(q: SQuadruple):
    """Triangularizing basis in which i is the r-th basis vector and j is
    supported on the last s dual coordinates (r, s the module dimensions).

    Built like the adapted basis of the main variety: Krylov chain of the
    right module first, a triangularized middle block inside the kernel of
    the left module, then columns dual to the left Krylov covectors."""
    f, n = q.field, q.n
    A = q.A
    r = _krylov_dim_right(A, q.i)
    s = _krylov_dim_left(A, q.j)

    chain = []
    if r:
        v = tuple(q.i)
        chain = [v]
        for _ in range(r - 1):
            chain.append(A.matvec(chain[-1]))
        chain.reverse()  # A^{r-1} i first, i last

    if s:
        urows = [tuple(q.j)]
        for _ in range(s - 1):
            urows.append(A.covec(urows[-1]))
        urows.reverse()  # j A^{s-1} first, j last
        U = Matrix(f, tuple(urows))
        ker_u = nullspace(U)
    else:
        U = None
        ker_u = [basis_vec(f, n, k) for k in range(n)]

    tracker = SpanTracker(f, n)
    for e in chain:
        if not tracker.add_if_independent(e):
            raise InternalCheckError("right Krylov chain is dependent")
    W = [w for w in ker_u if tracker.add_if_independent(w)]
    if len(W) != n - s - r:
        raise InternalCheckError("right module escapes the left-module kernel")

    middle = []
    if W:
        frame = Matrix.from_cols(f, chain + W)

        def quotient_matrix(M):
            cols = []
            for w in W:
                res = solve(frame, M.matvec(w))
                if res is None:
                    raise InternalCheckError("kernel of the left module is not invariant")
                cols.append(tuple(res[0][r:]))
            return Matrix.from_cols(f, cols)

        Aq = quotient_matrix(A)
        from .strata import _common_kernel_triangularize
        for wbar in _common_kernel_triangularize(Aq, Matrix.zeros(f, len(W), len(W))):
            u = zero_vec(f, n)
            for c, w in zip(wbar, W):
                u = tuple(f.add(a, f.mul(c, b)) for a, b in zip(u, w))
            middle.append(u)

    tail = []
    for t in range(s):
        rhs = tuple(f.one if k == s - 1 - t else f.zero for k in range(s))
        res = solve(U, rhs)
        if res is None:
            raise InternalCheckError("left Krylov covectors are dependent")
        tail.append(res[0])

    G = Matrix.from_cols(f, chain + middle + tail)
    Gi = inverse(G)
    if not ((Gi * q.A * G).is_upper_triangular(strict=True)
            and (Gi * q.B * G).is_upper_triangular(strict=True)):
        raise InternalCheckError("adapted frame is not triangularizing")
    return G, Gi, r, s


def s_deform(q: SQuadruple, tau, r: int = None) -> SQuadruple:
    """Point on the line from the canonical shift data to q, at parameter tau.

    In an adapted triangularizing frame the curve is
    A(tau) = tau A + (1-tau) L, i(tau), j(tau) interpolating towards the
    unit vectors in positions r and r+1, with B(tau) = i(tau)j(tau) - A(tau);
    the result is mapped back through the frame.  tau = 1 returns q itself.
    The target r defaults to dim K[A]i and may be raised for degenerate
    points whose support permits it."""
    if not is_in_S(q):
        raise PreconditionError("quadruple is not in the variety")
    f, n = q.field, q.n
    G, Gi, r0, s0 = _s_adapted_frame(q)
    r_target = r0 if r is None else r
    if not r0 <= r_target <= n - s0:
        raise PreconditionError(
            f"deformation target r={r_target} incompatible with module "
            f"dimensions ({r0},{s0})")

    A0 = Gi * q.A * G
    i0 = Gi.matvec(q.i)
    j0 = G.covec(q.j)
    L = regular_nilpotent(f, n)
    i_r = basis_vec(f, n, r_target - 1) if r_target >= 1 else zero_vec(f, n)
    j_r = basis_vec(f, n, r_target) if r_target <= n - 1 else zero_vec(f, n)

    one_m = f.sub(f.one, tau)
    A1 = A0.scale(tau) + L.scale(one_m)
    i1 = vec_add(f, vec_scale(f, tau, i0), vec_scale(f, one_m, i_r))
    j1 = vec_add(f, vec_scale(f, tau, j0), vec_scale(f, one_m, j_r))
    B1 = outer(f, i1, j1) - A1
    if not is_nilpotent(B1):
        raise InternalCheckError("deformed partner failed nilpotency in the frame")

    out = SQuadruple(f, n, G * A1 * Gi, G * B1 * Gi,
                     G.matvec(i1), Gi.covec(j1))
    if not is_in_S(out):
        raise InternalCheckError("deformed point left the variety")
    return out


def s_stabilizer_dim(q: SQuadruple) -> int:
    """Dimension of {Z : ZA = AZ, ZB = BZ, Zi = 0, jZ = 0}."""
    carrier = Quadruple(q.field, q.n, q.A, q.B, tuple(q.i), tuple(q.j))
    return stabilizer_dim(carrier).dim
