"""Seeded random generators shared by the resamplers and the test suite.

Over a prime field entries are uniform residues; over the rationals they are
small integers, which keeps fraction growth in long pipelines manageable.
"""

from __future__ import annotations

import random

from .canonical import CanonicalParams
from .fields import Field, PrimeField
from .linalg import Matrix, Vec, is_invertible, poly_no_const


def rand_scalar(field: Field, rng: random.Random):
    if isinstance(field, PrimeField):
        return rng.randrange(field.p)
    return field.from_int(rng.randint(-9, 9))


def rand_nonzero_scalar(field: Field, rng: random.Random):
    while True:
        c = rand_scalar(field, rng)
        if not field.is_zero(c):
            return c


def rand_vec(field: Field, n: int, rng: random.Random) -> Vec:
    return tuple(rand_scalar(field, rng) for _ in range(n))


def rand_matrix(field: Field, nrows: int, ncols: int, rng: random.Random) -> Matrix:
    return Matrix.from_rows(field, [[rand_scalar(field, rng) for _ in range(ncols)]
                                    for _ in range(nrows)])


def rand_invertible(field: Field, n: int, rng: random.Random) -> Matrix:
    while True:
        G = rand_matrix(field, n, n, rng)
        if is_invertible(G):
            return G


def rand_strictly_upper(field: Field, n: int, rng: random.Random) -> Matrix:
    rows = [[rand_scalar(field, rng) if c > r else field.zero for c in range(n)]
            for r in range(n)]
    return Matrix.from_rows(field, rows)


def rand_nilpotent(field: Field, n: int, rng: random.Random) -> Matrix:
    from .linalg import inverse

    G = rand_invertible(field, n, rng)
    return G * rand_strictly_upper(field, n, rng) * inverse(G)


def rand_commuting_nilpotent_pair(field: Field, n: int, rng: random.Random):
    """X nilpotent at random, Y a random constant-free polynomial in X."""
    X = rand_nilpotent(field, n, rng)
    Y = poly_no_const(X, [rand_scalar(field, rng) for _ in range(n - 1)])
    return X, Y


def rand_canonical_params(field: Field, n: int, rng: random.Random) -> CanonicalParams:
    """Uniformly seeded orbit coordinates with a_1 b_1 != 1."""
    t = rng.randint(1, n - 2)
    while True:
        a = rand_vec(field, t, rng)
        b = rand_vec(field, n - 1 - t, rng)
        if field.mul(a[0], b[0]) != field.one:
            return CanonicalParams(field, n, t, a, b)
