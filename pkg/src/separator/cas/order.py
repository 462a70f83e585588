"""Monomial orders, given as sort keys on exponent tuples (larger key = larger monomial).

Keys are flat tuples of integers, so negating every entry reverses the order.
"""
from __future__ import annotations

from dataclasses import dataclass


def _grevlex(exp):
    return (sum(exp),) + tuple(-e for e in reversed(exp))


@dataclass(frozen=True)
class MonomialOrder:
    kind: str
    split: int = 0

    def __post_init__(self):
        if self.kind not in ("lex", "grevlex", "block"):
            raise ValueError(f"unknown monomial order {self.kind!r}")

    def key(self, exp):
        if self.kind == "grevlex":
            return _grevlex(exp)
        if self.kind == "lex":
            return exp
        k = self.split
        return _grevlex(exp[:k]) + _grevlex(exp[k:])

    def __str__(self):
        return f"block({self.split})" if self.kind == "block" else self.kind


lex = MonomialOrder("lex")
grevlex = MonomialOrder("grevlex")


def block(split: int) -> MonomialOrder:
    """Elimination order: the first ``split`` variables dominate, grevlex inside each block."""
    return MonomialOrder("block", split)
