"""Exact scalar arithmetic over the rationals and over prime fields.

Scalars are carried as plain Python values: ``fractions.Fraction`` over the
rationals and canonical residues (ints in ``[0, p)``) over a prime field.
A :class:`Field` instance supplies the operations, so matrices and vectors
can store raw values without per-element wrappers.  Every operation is
exact; there are no tolerances anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import PreconditionError

#: witnesses that make Miller-Rabin deterministic for any 64-bit integer
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin primality test (valid for n < 3.3e24)."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


class Field:
    """Common interface for the two scalar domains."""

    kind: str

    # -- arithmetic on raw scalar values -------------------------------
    def add(self, a, b):
        raise NotImplementedError

    def sub(self, a, b):
        raise NotImplementedError

    def mul(self, a, b):
        raise NotImplementedError

    def neg(self, a):
        raise NotImplementedError

    def inv(self, a):
        raise NotImplementedError

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    # -- constants and conversions --------------------------------------
    @property
    def zero(self):
        raise NotImplementedError

    @property
    def one(self):
        raise NotImplementedError

    def from_int(self, k: int):
        raise NotImplementedError

    def is_zero(self, a) -> bool:
        return a == self.zero

    def parse(self, text: str):
        """Inverse of :meth:`fmt`."""
        raise NotImplementedError

    def fmt(self, a) -> str:
        """Serialize a scalar: decimal string, or ``a/b`` with b > 0, gcd 1."""
        return str(a)

    def to_json(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class RationalField(Field):
    kind: str = "Q"

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return 1 / Fraction(a)

    @property
    def zero(self):
        return Fraction(0)

    @property
    def one(self):
        return Fraction(1)

    def from_int(self, k: int):
        return Fraction(k)

    def parse(self, text: str):
        return Fraction(text)

    def to_json(self) -> dict:
        return {"kind": "Q"}


@dataclass(frozen=True)
class PrimeField(Field):
    p: int
    kind: str = "Fp"

    def __post_init__(self):
        if not is_prime(self.p):
            raise PreconditionError(f"modulus {self.p} is not prime")

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def mul(self, a, b):
        return (a * b) % self.p

    def neg(self, a):
        return (-a) % self.p

    def inv(self, a):
        a %= self.p
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return pow(a, self.p - 2, self.p)

    @property
    def zero(self):
        return 0

    @property
    def one(self):
        return 1 % self.p

    def from_int(self, k: int):
        return k % self.p

    def parse(self, text: str):
        return int(text) % self.p

    def to_json(self) -> dict:
        return {"kind": "Fp", "p": self.p}

    def elements(self):
        return range(self.p)


QQ = RationalField()


def GF(p: int) -> PrimeField:
    return PrimeField(p)


def field_from_json(obj: dict) -> Field:
    kind = obj.get("kind")
    if kind == "Q":
        return QQ
    if kind == "Fp":
        if "p" not in obj:
            raise PreconditionError("prime field spec requires 'p'")
        return PrimeField(int(obj["p"]))
    raise PreconditionError(f"unknown field kind {kind!r}")
