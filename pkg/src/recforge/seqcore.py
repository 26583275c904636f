"""Trace sequences of integer polynomials and the tests built from them.

A denominator ``Q(x) = 1 - e1 x + e2 x^2 - ... + (-1)^k ek x^k`` determines
the power sums ``a(n) = sum(alpha_i ** n)`` of its reciprocal roots.  The
roots themselves are never computed: everything is derived from the
coefficients ``e_i`` with exact integer arithmetic.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from recforge.poly import IntPoly, format_poly

log = logging.getLogger(__name__)

EXACT_TERM_LIMIT = 100_000


class BudgetExceeded(ValueError):
    """Raised when a request would exceed a configured computation budget."""


@dataclass(frozen=True)
class TestSpec:
    """A Perrin-style test: a prime ``p`` always satisfies ``a(p) = e1 (mod p)``."""

    __test__ = False  # keep pytest from collecting this class

    label: str
    e: tuple[int, ...]
    denominator: IntPoly
    numerator: IntPoly
    initial_terms: tuple[int, ...]
    notes: tuple[str, ...] = field(default=(), compare=False)

    @property
    def k(self) -> int:
        return len(self.e)

    @property
    def target(self) -> int:
        return self.e[0]

    @property
    def recurrence(self) -> tuple[int, ...]:
        """Coefficients ``r_i`` with ``a(n) = sum r_i a(n - i)``, i = 1..k."""
        return tuple(c if i % 2 == 0 else -c for i, c in enumerate(self.e))

    def recurrence_text(self) -> str:
        parts = []
        for i, r in enumerate(self.recurrence, start=1):
            if r == 0:
                continue
            term = f"a(n-{i})" if abs(r) == 1 else f"{abs(r)}*a(n-{i})"
            if not parts:
                parts.append(term if r > 0 else f"-{term}")
            else:
                parts.append(("+ " if r > 0 else "- ") + term)
        rhs = " ".join(parts) if parts else "0"
        return f"a(n) = {rhs}  (n >= {self.k})"

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "q": self.denominator.to_json(),
            "p": self.numerator.to_json(),
            "e": [str(c) for c in self.e],
            "initial": [str(c) for c in self.initial_terms],
            "target": str(self.target),
        }

    @classmethod
    def from_json(cls, data: dict) -> TestSpec:
        spec = spec_from_denominator(IntPoly.from_json(data["q"]), data.get("label", ""))
        for key, got in (("p", spec.numerator.to_json()),
                         ("e", [str(c) for c in spec.e]),
                         ("initial", [str(c) for c in spec.initial_terms])):
            if key in data and [str(int(v)) for v in data[key]] != got:
                raise ValueError(f"field {key!r} inconsistent with q")
        if "target" in data and int(data["target"]) != spec.target:
            raise ValueError("field 'target' inconsistent with q")
        return spec

    def describe(self) -> str:
        return "\n".join([
            f"label:    {self.label}",
            f"Q(x):     {self.denominator}",
            f"P(x):     {self.numerator}",
            f"e:        {list(self.e)}",
            f"initial:  {list(self.initial_terms)}",
            f"recur:    {self.recurrence_text()}",
            f"target:   a(p) = {self.target} (mod p)",
        ])


def numerator_for(Q: IntPoly) -> IntPoly:
    """Numerator ``k*Q(x) - x*Q'(x)`` of the power-sum generating function."""
    if Q.is_zero() or Q[0] != 1:
        raise ValueError("denominator must have constant term 1")
    k = Q.degree
    if not k:
        raise ValueError("denominator must have degree >= 1")
    return Q * k - Q.derivative().shift(1)


def newton_initial_terms(e: Sequence[int], count: int) -> list[int]:
    """Power sums a(0)..a(count-1) from elementary symmetric values via Newton's identities."""
    if count < 1:
        raise ValueError("count must be >= 1")
    k = len(e)
    a = [k]
    for n in range(1, count):
        s = 0
        for i in range(1, min(n, k + 1)):
            s += (e[i - 1] if i % 2 else -e[i - 1]) * a[n - i]
        if n <= k:
            s += (n * e[n - 1]) if n % 2 else -(n * e[n - 1])
        a.append(s)
    return a


def _coerce_poly(Q: IntPoly | Iterable[int]) -> tuple[IntPoly, list[str]]:
    notes = []
    if isinstance(Q, IntPoly):
        return Q, notes
    raw = [int(c) for c in Q]
    poly = IntPoly(tuple(raw))
    if len(raw) > len(poly):
        notes.append(f"trimmed {len(raw) - len(poly)} trailing zero coefficient(s) of Q")
    return poly, notes


def spec_from_denominator(Q: IntPoly | Iterable[int], label: str = "") -> TestSpec:
    """Build the test for denominator ``Q`` (constant term 1, degree >= 1)."""
    Q, notes = _coerce_poly(Q)
    if Q.is_zero():
        raise ValueError("zero polynomial is not a valid denominator")
    if Q[0] != 1:
        raise ValueError(f"denominator constant term must be 1, got {Q[0]}")
    if Q.degree < 1:
        raise ValueError("denominator must have degree >= 1")
    for note in notes:
        log.info("%s: %s", label or "spec", note)
    k = Q.degree
    e = tuple(Q[i] if i % 2 == 0 else -Q[i] for i in range(1, k + 1))
    if not label:
        label = "e=(" + ",".join(str(c) for c in e) + ")"
    return TestSpec(
        label=label,
        e=e,
        denominator=Q,
        numerator=numerator_for(Q),
        initial_terms=tuple(newton_initial_terms(e, k)),
        notes=tuple(notes),
    )


def spec_from_e(e: Sequence[int], label: str = "") -> TestSpec:
    """Convenience constructor from ``e1..ek`` (``ek`` nonzero)."""
    if not e or e[-1] == 0:
        raise ValueError("e must be non-empty with nonzero last entry")
    q = [1] + [c if i % 2 == 0 else -c for i, c in enumerate(e, start=1)]
    return spec_from_denominator(IntPoly(tuple(q)), label)


def series_terms(spec: TestSpec, N: int) -> list[int]:
    """a(0)..a(N) by formal power-series division of P by Q."""
    P, Q = spec.numerator, spec.denominator
    k = spec.k
    out: list[int] = []
    for n in range(N + 1):
        s = P[n]
        for i in range(1, min(n, k) + 1):
            s -= Q[i] * out[n - i]
        out.append(s)
    return out


def exact_term(spec: TestSpec, n: int, limit: int = EXACT_TERM_LIMIT) -> int:
    """a(n) exactly, by running the recurrence. Refuses ``n > limit``."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n > limit:
        raise BudgetExceeded(f"exact term index {n} exceeds budget {limit}")
    k = spec.k
    if n < k:
        return spec.initial_terms[n]
    rec = spec.recurrence
    window = list(spec.initial_terms)
    for _ in range(n - k + 1):
        nxt = 0
        for i, r in enumerate(rec, start=1):
            if r:
                nxt += r * window[-i]
        window.append(nxt)
        del window[0]
    return window[-1]


def exact_terms(spec: TestSpec, N: int, limit: int = EXACT_TERM_LIMIT) -> list[int]:
    """a(0)..a(N) by the recurrence (same budget as :func:`exact_term`)."""
    if N > limit:
        raise BudgetExceeded(f"exact term index {N} exceeds budget {limit}")
    out = list(spec.initial_terms[: N + 1])
    rec = spec.recurrence
    for n in range(len(out), N + 1):
        out.append(sum(r * out[n - i] for i, r in enumerate(rec, start=1) if r))
    return out


# Named tests. Perrin uses A(n) = A(n-2) + A(n-3), which matches A001608 and
# the pseudoprime 271441.
_NAMED_Q = {
    "perrin": (1, 0, -1, -1),
    "lucas": (1, -1, -1),
    "pell": (1, -2, -1),
    "dbz": (1, -1, -1, 0, -1, 0, 0, -4),
    "t2": (1, -1, -2),
    "t3": (1, -2, -2),
    "t4": (1, 0, 2, 2),
    "t5": (1, -1, -2, -1),
}
_ALIASES = {"t1": "pell", "companion-pell": "pell", "db-z": "dbz"}


def named_spec(name: str) -> TestSpec:
    key = name.lower()
    key = _ALIASES.get(key, key)
    if key not in _NAMED_Q:
        raise KeyError(f"unknown test {name!r}; choose from {sorted(_NAMED_Q) + sorted(_ALIASES)}")
    return spec_from_denominator(IntPoly(_NAMED_Q[key]), key)


def named_tests() -> list[str]:
    return list(_NAMED_Q)


__all__ = [
    "BudgetExceeded",
    "EXACT_TERM_LIMIT",
    "TestSpec",
    "exact_term",
    "exact_terms",
    "format_poly",
    "named_spec",
    "named_tests",
    "newton_initial_terms",
    "numerator_for",
    "series_terms",
    "spec_from_denominator",
    "spec_from_e",
]
