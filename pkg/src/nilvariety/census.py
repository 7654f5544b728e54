"""Exhaustive finite-field censuses and point-count dimension slopes.

Counts are exact integers obtained by full enumeration at small size: pairs
of nilpotent matrices are scanned with the (i, j) part folded in through the
closed-form count of solutions of an outer-product equation, and stratified
runs classify each rank-one commutator pair once (the whole scalar family of
(i, j) solutions shares its module dimensions).  The inner loops run on
int64 numpy arrays mod q, which is exact since all residues stay far below
the overflow threshold.

Parallel runs partition the outer matrix loop into disjoint chunks with one
private histogram per worker, merged by addition at the end, so parallel and
serial runs emit identical records.
"""

from __future__ import annotations

import csv
import io
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from decimal import Decimal, getcontext
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Iterable, Optional

import numpy as np

from .errors import PreconditionError
from .fields import GF, is_prime
from .linalg import Matrix, rank as exact_rank

MAX_EXHAUSTIVE_N = 3
_ENUM_CHUNK = 200_000


@dataclass(frozen=True)
class CensusRecord:
    """One histogram row; r/s/commuting are None on unstratified rows."""

    variety: str
    n: int
    q: int
    r: Optional[int]
    s: Optional[int]
    commuting: Optional[bool]
    count: int


def _record_sort_key(rec: CensusRecord):
    return (rec.variety, rec.n, rec.q,
            rec.commuting is None, bool(rec.commuting),
            rec.r is None, -1 if rec.r is None else rec.r,
            -1 if rec.s is None else rec.s)


def _check_args(n: int, q: int):
    if not 1 <= n <= MAX_EXHAUSTIVE_N:
        raise PreconditionError(
            f"exhaustive censuses are guarded to n <= {MAX_EXHAUSTIVE_N}")
    if not is_prime(q):
        raise PreconditionError(f"{q} is not prime")


# ---------------------------------------------------------------------------
# vectorized mod-q kernels (n <= 3)


@lru_cache(maxsize=None)
def all_vectors(n: int, q: int) -> np.ndarray:
    """All q^n vectors over F_q, lexicographic, shape (q^n, n)."""
    idx = np.arange(q ** n, dtype=np.int64)
    cols = [(idx // q ** (n - 1 - k)) % q for k in range(n)]
    return np.stack(cols, axis=1)


def _nilpotent_mask(M: np.ndarray, n: int, q: int) -> np.ndarray:
    """Characteristic polynomial equals x^n: all coefficient sums vanish."""
    if n == 1:
        return (M[:, 0, 0] % q) == 0
    tr = (M[:, 0, 0] + M[:, 1, 1] + (M[:, 2, 2] if n == 3 else 0)) % q
    if n == 2:
        det = (M[:, 0, 0] * M[:, 1, 1] - M[:, 0, 1] * M[:, 1, 0]) % q
        return (tr == 0) & (det == 0)
    m2 = (M[:, 0, 0] * M[:, 1, 1] - M[:, 0, 1] * M[:, 1, 0]
          + M[:, 0, 0] * M[:, 2, 2] - M[:, 0, 2] * M[:, 2, 0]
          + M[:, 1, 1] * M[:, 2, 2] - M[:, 1, 2] * M[:, 2, 1]) % q
    det = (M[:, 0, 0] * (M[:, 1, 1] * M[:, 2, 2] - M[:, 1, 2] * M[:, 2, 1])
           - M[:, 0, 1] * (M[:, 1, 0] * M[:, 2, 2] - M[:, 1, 2] * M[:, 2, 0])
           + M[:, 0, 2] * (M[:, 1, 0] * M[:, 2, 1] - M[:, 1, 1] * M[:, 2, 0])) % q
    return (tr == 0) & (m2 == 0) & (det == 0)


@lru_cache(maxsize=None)
def nilpotent_matrices(n: int, q: int) -> np.ndarray:
    """All nilpotent n x n matrices over F_q in lexicographic order."""
    total = q ** (n * n)
    found = []
    for lo in range(0, total, _ENUM_CHUNK):
        idx = np.arange(lo, min(lo + _ENUM_CHUNK, total), dtype=np.int64)
        ent = [(idx // q ** (n * n - 1 - k)) % q for k in range(n * n)]
        M = np.stack(ent, axis=1).reshape(-1, n, n)
        found.append(M[_nilpotent_mask(M, n, q)])
    return np.concatenate(found) if found else np.empty((0, n, n), dtype=np.int64)


def _batch_rank(M: np.ndarray, q: int) -> np.ndarray:
    """Rank of each matrix in a batch with min(shape) <= 3, by minor scan."""
    if M.shape[1] > M.shape[2]:
        M = M.transpose(0, 2, 1)
    m, a, b = M.shape
    M = M % q
    ranks = M.any(axis=(1, 2)).astype(np.int64)
    if a >= 2:
        hit = np.zeros(m, dtype=bool)
        for r0, r1 in combinations(range(a), 2):
            for c0, c1 in combinations(range(b), 2):
                d = (M[:, r0, c0] * M[:, r1, c1] - M[:, r0, c1] * M[:, r1, c0]) % q
                hit |= d != 0
        ranks += hit
    if a >= 3:
        hit = np.zeros(m, dtype=bool)
        for rr in combinations(range(a), 3):
            for cc in combinations(range(b), 3):
                d = (M[:, rr[0], cc[0]] * (M[:, rr[1], cc[1]] * M[:, rr[2], cc[2]]
                                           - M[:, rr[1], cc[2]] * M[:, rr[2], cc[1]])
                     - M[:, rr[0], cc[1]] * (M[:, rr[1], cc[0]] * M[:, rr[2], cc[2]]
                                             - M[:, rr[1], cc[2]] * M[:, rr[2], cc[0]])
                     + M[:, rr[0], cc[2]] * (M[:, rr[1], cc[0]] * M[:, rr[2], cc[1]]
                                             - M[:, rr[1], cc[1]] * M[:, rr[2], cc[0]])) % q
                hit |= d != 0
        ranks += hit
    return ranks


@lru_cache(maxsize=None)
def _inv_table(q: int) -> np.ndarray:
    return np.array([0] + [pow(v, q - 2, q) for v in range(1, q)], dtype=np.int64)


def _rank1_factor(R: np.ndarray, q: int):
    """Split a batch of rank-one matrices as outer products i * j."""
    k, n, _ = R.shape
    ar = np.arange(k)
    rowidx = R.any(axis=2).argmax(axis=1)
    j = R[ar, rowidx]
    colidx = (j != 0).argmax(axis=1)
    piv = j[ar, colidx]
    ipiv = _inv_table(q)[piv]
    i = (R[ar, :, colidx] * ipiv[:, None]) % q
    return i, j


def _right_dims(X: np.ndarray, Yb: np.ndarray, ib: np.ndarray, q: int, n: int):
    """dim of the span of the straightened monomial vectors, batch over pairs."""
    batched = Yb.ndim == 3

    def ax(v):  # X v
        return v @ X.T % q

    def ay(v):  # Y v
        if batched:
            return np.einsum('kij,kj->ki', Yb, v) % q
        return v @ Yb.T % q

    cols = [ib % q]
    if n >= 2:
        xi, yi = ax(cols[0]), ay(cols[0])
        cols += [xi, yi]
    if n >= 3:
        cols += [ax(xi), ax(yi), ay(yi)]
    return _batch_rank(np.stack(cols, axis=2), q)


def _left_dims(X: np.ndarray, Yb: np.ndarray, jb: np.ndarray, q: int, n: int):
    batched = Yb.ndim == 3

    def ax(u):  # u X
        return u @ X % q

    def ay(u):  # u Y
        if batched:
            return np.einsum('ki,kij->kj', u, Yb) % q
        return u @ Yb % q

    rows = [jb % q]
    if n >= 2:
        jx, jy = ax(rows[0]), ay(rows[0])
        rows += [jx, jy]
    if n >= 3:
        rows += [ax(jx), ay(jx), ay(jy)]
    return _batch_rank(np.stack(rows, axis=1), q)


# ---------------------------------------------------------------------------
# the closed-form inner loop


def count_ij_solutions(C: Matrix, q: int) -> int:
    """Number of pairs (i, j) over F_q with i*j = -C: all of them when C = 0,
    one scalar family when C has rank one, none otherwise."""
    if not is_prime(q):
        raise PreconditionError(f"{q} is not prime")
    n = C.n
    rk = exact_rank(C)
    if rk == 0:
        return 2 * q ** n - 1
    if rk == 1:
        return q - 1
    return 0


# ---------------------------------------------------------------------------
# the N census


def _n_worker(args):
    n, q, stratified, lo, hi = args
    mats = nilpotent_matrices(n, q)
    vecs = all_vectors(n, q)
    full_ij = 2 * q ** n - 1
    commuting_detail = stratified and q <= 3
    hist = Counter()
    base = n + 1
    for xi in range(lo, hi):
        X = mats[xi]
        C = (X @ mats - mats @ X) % q
        ranks = _batch_rank(C, q)
        n_comm = int((ranks == 0).sum())
        rank1 = ranks == 1
        if not stratified:
            hist[(None, None, True)] += n_comm * full_ij
            hist[(None, None, False)] += int(rank1.sum()) * (q - 1)
            continue
        if rank1.any():
            Ys = mats[rank1]
            iv, jv = _rank1_factor((-C[rank1]) % q, q)
            rdim = _right_dims(X, Ys, iv, q, n)
            sdim = _left_dims(X, Ys, jv, q, n)
            bc = np.bincount(rdim * base + sdim, minlength=base * base)
            for code in np.nonzero(bc)[0]:
                hist[(int(code) // base, int(code) % base, False)] += int(bc[code]) * (q - 1)
        if commuting_detail:
            for yi in np.nonzero(ranks == 0)[0]:
                Yc = mats[yi]
                rdim = _right_dims(X, Yc, vecs, q, n)    # j = 0 family
                sdim = _left_dims(X, Yc, vecs, q, n)     # i = 0 family
                for rv, cnt in zip(*np.unique(rdim, return_counts=True)):
                    hist[(int(rv), 0, True)] += int(cnt)
                for sv, cnt in zip(*np.unique(sdim, return_counts=True)):
                    hist[(0, int(sv), True)] += int(cnt)
                hist[(0, 0, True)] -= 1                  # (i, j) = (0, 0) counted twice
        else:
            hist[(None, None, True)] += n_comm * full_ij
    return hist


def _parallel_hist(worker, n, q, stratified, total, jobs):
    if jobs <= 1:
        return worker((n, q, stratified, 0, total))
    bounds = np.linspace(0, total, 4 * jobs + 1, dtype=int)
    args = [(n, q, stratified, int(lo), int(hi))
            for lo, hi in zip(bounds[:-1], bounds[1:]) if lo < hi]
    hist = Counter()
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        for part in pool.map(worker, args):
            hist.update(part)
    return hist


def enumerate_N(n: int, q: int, stratified: bool = False, jobs: int = 1):
    """Census of the almost-commuting variety: all nilpotent pairs, with the
    (i, j) solutions counted in closed form and, when stratified, classified
    through one representative per scalar family."""
    _check_args(n, q)
    mats = nilpotent_matrices(n, q)  # warm the cache before forking
    hist = _parallel_hist(_n_worker, n, q, stratified, len(mats), jobs)
    records = [CensusRecord("N", n, q, r, s, c, cnt)
               for (r, s, c), cnt in hist.items() if cnt]
    return sorted(records, key=_record_sort_key)


# ---------------------------------------------------------------------------
# the S census


def _s_worker(args):
    n, q, stratified, lo, hi = args
    mats = nilpotent_matrices(n, q)
    vecs = all_vectors(n, q)
    nv = len(vecs)
    outer_flat = (vecs[:, None, :, None] * vecs[None, :, None, :]).reshape(-1, n, n) % q
    hist = Counter()
    base = n + 1
    for ai in range(lo, hi):
        A = mats[ai]
        B = (outer_flat - A) % q
        nil = _nilpotent_mask(B, n, q)
        if not stratified:
            hist[(None, None, None)] += int(nil.sum())
            continue
        rdim = _right_dims(A, A, vecs, q, n)   # dim K[A]i per i (Y-slot unused: pass A)
        sdim = _left_dims(A, A, vecs, q, n)
        # single-matrix closures: recompute with Y = A gives the same span
        comm = ((A @ outer_flat - outer_flat @ A) % q == 0).all(axis=(1, 2))
        codes = ((rdim[:, None] * base + sdim[None, :]).reshape(-1) * 2
                 + comm.astype(np.int64))
        sel = codes[nil]
        bc = np.bincount(sel, minlength=base * base * 2)
        for code in np.nonzero(bc)[0]:
            rs, cm = divmod(int(code), 2)
            hist[(rs // base, rs % base, bool(cm))] += int(bc[code])
    return hist


def enumerate_S(n: int, q: int, stratified: bool = False, jobs: int = 1):
    """Census of the rank-one-sum variety: nilpotent A, every (i, j), with
    B = i*j - A kept when nilpotent."""
    _check_args(n, q)
    mats = nilpotent_matrices(n, q)
    hist = _parallel_hist(_s_worker, n, q, stratified, len(mats), jobs)
    records = [CensusRecord("S", n, q, r, s, c, cnt)
               for (r, s, c), cnt in hist.items() if cnt]
    return sorted(records, key=_record_sort_key)


def iter_S_points(n: int, q: int):
    """Yield every member (A, B, i, j) over F_q as an exact quadruple."""
    from .svariety import SQuadruple

    _check_args(n, q)
    f = GF(q)
    mats = nilpotent_matrices(n, q)
    vecs = all_vectors(n, q)
    nv = len(vecs)
    outer_flat = (vecs[:, None, :, None] * vecs[None, :, None, :]).reshape(-1, n, n) % q
    for A in mats:
        B = (outer_flat - A) % q
        nil = _nilpotent_mask(B, n, q)
        Am = Matrix.from_rows(f, [[int(x) for x in row] for row in A])
        for flat in np.nonzero(nil)[0]:
            ii, jj = divmod(int(flat), nv)
            Bm = Matrix.from_rows(f, [[int(x) for x in row] for row in B[flat]])
            yield SQuadruple(f, n, Am, Bm,
                             tuple(int(x) for x in vecs[ii]),
                             tuple(int(x) for x in vecs[jj]))


# ---------------------------------------------------------------------------
# commuting nilpotent pairs (the pair count, not the quadruple count)


def count_commuting_nilpotent_pairs(n: int, q: int) -> int:
    """Exact number of commuting nilpotent pairs over F_q, by bucketing the
    first matrix into conjugacy types and enumerating one centralizer per
    type."""
    _check_args(n, q)
    mats = nilpotent_matrices(n, q)
    if n == 1:
        return 1
    sig1 = _batch_rank(mats, q)
    sig2 = _batch_rank(np.matmul(mats, mats) % q, q)
    sigs = sig1 * (n + 1) + sig2
    total = 0
    f = GF(q)
    for sig, cnt in zip(*np.unique(sigs, return_counts=True)):
        rep = mats[int(np.nonzero(sigs == sig)[0][0])]
        if not rep.any():
            total += int(cnt) * len(mats)
            continue
        basis = _centralizer_basis(f, rep, n)
        d = len(basis)
        coeffs = all_vectors(d, q)
        flat = np.array([b.reshape(-1) for b in basis], dtype=np.int64)
        members = (coeffs @ flat % q).reshape(-1, n, n)
        total += int(cnt) * int(_nilpotent_mask(members, n, q).sum())
    return total


def _centralizer_basis(f, M: np.ndarray, n: int):
    rows = []
    Mi = [[int(x) for x in row] for row in M]
    for r in range(n):
        for c in range(n):
            row = [0] * (n * n)
            for k in range(n):
                row[r * n + k] = (row[r * n + k] + Mi[k][c]) % f.p
                row[k * n + c] = (row[k * n + c] - Mi[r][k]) % f.p
            rows.append(row)
    from .linalg import nullspace

    basis = nullspace(Matrix.from_rows(f, rows))
    return [np.array(v, dtype=np.int64).reshape(n, n) for v in basis]


# ---------------------------------------------------------------------------
# slope fitting


@dataclass(frozen=True)
class SlopeEstimate:
    variety: str
    n: int
    pairs: tuple          # ((q, count), ...) sorted by q
    slope: Fraction
    residuals: tuple      # floats, one per point


def dimension_slope(records: Iterable[CensusRecord]) -> SlopeEstimate:
    """Least-squares slope of log(count) against log(q).

    Counts are summed per q; the fit runs on 50-digit decimal logarithms,
    far beyond what the acceptance bands need."""
    records = list(records)
    if not records:
        raise PreconditionError("no records to fit")
    keys = {(rec.variety, rec.n) for rec in records}
    if len(keys) != 1:
        raise PreconditionError(f"records mix varieties or sizes: {sorted(keys)}")
    variety, n = next(iter(keys))
    totals = Counter()
    for rec in records:
        totals[rec.q] += rec.count
    if len(totals) < 2:
        raise PreconditionError("need counts at >= 2 distinct q to fit a slope")
    pairs = tuple(sorted(totals.items()))
    if any(c <= 0 for _, c in pairs):
        raise PreconditionError("cannot fit zero counts")
    getcontext().prec = 50
    xs = [Decimal(q).ln() for q, _ in pairs]
    ys = [Decimal(c).ln() for _, c in pairs]
    k = len(xs)
    xbar = sum(xs) / k
    ybar = sum(ys) / k
    sxx = sum((x - xbar) ** 2 for x in xs)
    sxy = sum((x - xbar) * (y - ybar) for x, y in zip(xs, ys))
    slope = Fraction(sxy) / Fraction(sxx)
    inter = Fraction(ybar) - slope * Fraction(xbar)
    residuals = tuple(float(Fraction(y) - (inter + slope * Fraction(x)))
                      for x, y in zip(xs, ys))
    return SlopeEstimate(variety, n, pairs, slope, residuals)


# ---------------------------------------------------------------------------
# CSV interchange

_CSV_HEADER = ["variety", "n", "q", "r", "s", "commuting", "count"]


def write_csv(records: Iterable[CensusRecord], stream) -> None:
    w = csv.writer(stream)
    w.writerow(_CSV_HEADER)
    for rec in sorted(records, key=_record_sort_key):
        w.writerow([rec.variety, rec.n, rec.q,
                    "" if rec.r is None else rec.r,
                    "" if rec.s is None else rec.s,
                    "" if rec.commuting is None else str(rec.commuting).lower(),
                    str(rec.count)])


def records_to_csv(records: Iterable[CensusRecord]) -> str:
    buf = io.StringIO()
    write_csv(records, buf)
    return buf.getvalue()


def read_csv(stream) -> list:
    rd = csv.reader(stream)
    header = next(rd)
    if header != _CSV_HEADER:
        raise PreconditionError(f"unexpected CSV header {header}")
    out = []
    for row in rd:
        if not row:
            continue
        variety, n, q, r, s, comm, count = row
        out.append(CensusRecord(
            variety, int(n), int(q),
            None if r == "" else int(r),
            None if s == "" else int(s),
            None if comm == "" else comm == "true",
            int(count)))
    return out


def filter_records(records: Iterable[CensusRecord], spec: str) -> list:
    """Filter by a comma-separated key=value list, e.g. "n=3,variety=N,r=1"."""
    records = list(records)
    if not spec:
        return records
    conds = {}
    for part in spec.split(","):
        part = part.strip()
        if not part:
            continue
        if "=" not in part:
            raise PreconditionError(f"bad filter clause {part!r}")
        key, val = (x.strip() for x in part.split("=", 1))
        if key not in _CSV_HEADER:
            raise PreconditionError(f"unknown filter key {key!r}")
        conds[key] = val
    out = []
    for rec in records:
        ok = True
        for key, val in conds.items():
            actual = getattr(rec, key)
            if key in ("n", "q", "r", "s", "count"):
                ok = actual is not None and actual == int(val)
            elif key == "commuting":
                ok = actual is not None and actual == (val.lower() == "true")
            else:
                ok = actual == val
            if not ok:
                break
        if ok:
            out.append(rec)
    return out
