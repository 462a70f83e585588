"""Resource bounds for Groebner computations and the Undecided signal."""
from __future__ import annotations

import contextvars
import os
from contextlib import contextmanager
from dataclasses import dataclass


class Undecided(Exception):
    """A decision procedure could not reach a verdict; ``reason`` says why."""

    def __init__(self, reason: str):
        self.reason = reason
        super().__init__(reason)


class BudgetExceeded(Undecided):
    pass


@dataclass(frozen=True)
class Budget:
    max_steps: int = 3_000_000
    max_basis: int = 3000
    max_degree: int = 80


_current: contextvars.ContextVar[Budget | None] = contextvars.ContextVar("separator_budget", default=None)


def current_budget() -> Budget:
    b = _current.get()
    if b is not None:
        return b
    env = os.environ.get("SEP_BUDGET")
    if env:
        return Budget(max_steps=int(env))
    return Budget()


@contextmanager
def using_budget(budget: Budget):
    token = _current.set(budget)
    try:
        yield budget
    finally:
        _current.reset(token)
