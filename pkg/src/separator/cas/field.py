"""Coefficient fields: exact rationals and small prime fields."""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

from gmpy2 import mpq

RATIONAL_TYPES = (int, Fraction, type(mpq()))


class Field:
    characteristic = 0
    name = "?"

    def __call__(self, value):
        raise NotImplementedError

    def norm(self, value):
        return value

    def inv(self, value):
        raise NotImplementedError

    def __repr__(self):
        return self.name


class RationalField(Field):
    """QQ with values stored as GMP rationals (always lowest terms)."""

    characteristic = 0
    name = "QQ"
    _mpq = type(mpq())

    def __call__(self, value):
        if isinstance(value, self._mpq):
            return value
        return mpq(value)

    def inv(self, value):
        if value == 0:
            raise ZeroDivisionError("inverse of zero")
        return 1 / mpq(value)

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash("QQ")


class PrimeField(Field):
    """GF(p) for small p; elements are ints in [0, p)."""

    def __init__(self, p: int):
        if p < 2 or p >= 1 << 16 or any(p % d == 0 for d in range(2, int(p**0.5) + 1)):
            raise ValueError(f"GF(p) needs a prime p < 2^16, got {p}")
        self.characteristic = p
        self.p = p
        self.name = f"GF({p})"

    def __call__(self, value) -> int:
        if not isinstance(value, int) and isinstance(value, RATIONAL_TYPES):
            den = value.denominator % self.p
            if den == 0:
                raise ZeroDivisionError(f"denominator {value.denominator} vanishes mod {self.p}")
            return int(value.numerator) * pow(int(den), -1, self.p) % self.p
        return int(value) % self.p

    def norm(self, value):
        return value % self.p

    def inv(self, value):
        value %= self.p
        if value == 0:
            raise ZeroDivisionError("inverse of zero")
        return pow(value, -1, self.p)

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("GF", self.p))


QQ = RationalField()


@lru_cache(maxsize=None)
def GF(p: int) -> PrimeField:
    return PrimeField(p)
