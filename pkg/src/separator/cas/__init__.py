"""Exact polynomial arithmetic and Groebner bases."""
from .budget import Budget, BudgetExceeded, Undecided, current_budget, using_budget
from .field import GF, QQ, Field, PrimeField, RationalField
from .groebner import Ideal, buchberger, eliminate, ideal_quotient, is_unit_ideal, normal_form
from .order import MonomialOrder, block, grevlex, lex
from .poly import Poly, PolyRing, divmod_exact, format_poly

__all__ = [
    "Budget", "BudgetExceeded", "Undecided", "current_budget", "using_budget",
    "GF", "QQ", "Field", "PrimeField", "RationalField",
    "Ideal", "buchberger", "eliminate", "ideal_quotient", "is_unit_ideal", "normal_form",
    "MonomialOrder", "block", "grevlex", "lex",
    "Poly", "PolyRing", "divmod_exact", "format_poly",
]
