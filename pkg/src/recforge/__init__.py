"""Perrin-style primality tests built from integer polynomials and
forbidden-factor circular words, with fast modular evaluation and
pseudoprime search."""

from recforge.poly import IntPoly
from recforge.seqcore import (
    BudgetExceeded,
    TestSpec,
    exact_term,
    newton_initial_terms,
    numerator_for,
    series_terms,
    spec_from_denominator,
)
from recforge.modeval import charpoly_of, passes_test, trace_term_mod

__all__ = [
    "BudgetExceeded",
    "IntPoly",
    "TestSpec",
    "charpoly_of",
    "exact_term",
    "newton_initial_terms",
    "numerator_for",
    "passes_test",
    "series_terms",
    "spec_from_denominator",
    "trace_term_mod",
]

__version__ = "0.1.0"
