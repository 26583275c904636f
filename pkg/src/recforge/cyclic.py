"""Tests from circular words that avoid a set of forbidden factors.

The number of circular words of length n avoiding the factors equals
``trace(T^n)`` for the sliding-window transfer matrix ``T``: a closed walk of
length n is exactly an n-periodic word, and the windows it visits are the
cyclic windows of that word.  The characteristic polynomial of ``T``,
with the zero eigenvalues stripped, reversed is the denominator of an
ordinary trace-sequence test.
"""

from __future__ import annotations

import itertools
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from recforge.poly import IntPoly
from recforge.seqcore import BudgetExceeded, TestSpec, spec_from_denominator

log = logging.getLogger(__name__)

MAX_STATES = 4096
MAX_BRUTE_WORDS = 1 << 20

Word = tuple[int, ...]


def _parse_word(w: str | Sequence[int], s: int) -> Word:
    if isinstance(w, str):
        w = w.strip()
        if not w or not w.isdigit():
            raise ValueError(f"forbidden word {w!r} must be a non-empty digit string")
        word = tuple(int(ch) for ch in w)
    else:
        word = tuple(int(ch) for ch in w)
        if not word:
            raise ValueError("forbidden words must be non-empty")
    bad = [ch for ch in word if not 0 <= ch < s]
    if bad:
        raise ValueError(f"letter {bad[0]} outside alphabet 0..{s - 1}")
    return word


def _contains(word: Word, factor: Word) -> bool:
    m = len(factor)
    return any(word[i : i + m] == factor for i in range(len(word) - m + 1))


@dataclass(frozen=True)
class PatternSystem:
    s: int
    forbidden: tuple[Word, ...]
    notes: tuple[str, ...] = field(default=(), compare=False)

    @classmethod
    def make(cls, s: int, forbidden: Iterable[str | Sequence[int]]) -> PatternSystem:
        """Validate, dedupe and drop words that contain another forbidden word."""
        if s < 2:
            raise ValueError("alphabet size must be >= 2")
        words = sorted({_parse_word(w, s) for w in forbidden}, key=lambda w: (len(w), w))
        if not words:
            raise ValueError("forbidden set must be non-empty")
        kept: list[Word] = []
        notes = []
        for w in words:
            sub = next((u for u in kept if _contains(w, u)), None)
            if sub is None:
                kept.append(w)
            else:
                notes.append(f"dropped {_fmt(w)}: contains forbidden {_fmt(sub)}")
        for n in notes:
            log.info(n)
        return cls(s, tuple(sorted(kept)), tuple(notes))

    @property
    def L(self) -> int:
        return max(len(w) for w in self.forbidden)

    def reduced_alphabet(self) -> list[int]:
        singles = {w[0] for w in self.forbidden if len(w) == 1}
        return [c for c in range(self.s) if c not in singles]

    def label(self) -> str:
        return f"s={self.s}/avoid=" + ",".join(_fmt(w) for w in self.forbidden)

    def to_json(self) -> dict:
        return {"s": self.s, "forbidden": [_fmt(w) for w in self.forbidden]}


def _fmt(w: Word) -> str:
    return "".join(str(c) for c in w) if all(c < 10 for c in w) else "-".join(map(str, w))


def parse_pattern_text(text: str) -> PatternSystem:
    """Read ``alphabet s`` then one forbidden digit string per line, or the JSON form."""
    stripped = text.strip()
    if stripped.startswith("{"):
        data = json.loads(stripped)
        return PatternSystem.make(int(data["s"]), data["forbidden"])
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise ValueError("empty pattern file")
    head = lines[0].split()
    if len(head) != 2 or head[0] != "alphabet":
        raise ValueError(f"first line must be 'alphabet <s>', got {lines[0]!r}")
    return PatternSystem.make(int(head[1]), lines[1:])


def load_patterns(path: str | Path) -> PatternSystem:
    return parse_pattern_text(Path(path).read_text(encoding="utf-8"))


@dataclass(frozen=True)
class TransferMatrix:
    states: tuple[Word, ...]
    rows: tuple[tuple[int, ...], ...]

    @property
    def dim(self) -> int:
        return len(self.rows)

    def edges(self) -> list[tuple[Word, Word]]:
        return [(self.states[i], self.states[j])
                for i, row in enumerate(self.rows) for j, v in enumerate(row) if v]


def build_transfer(ps: PatternSystem, max_states: int = MAX_STATES) -> TransferMatrix:
    """Transfer matrix on allowed (L-1)-windows, states in lexicographic order."""
    letters = ps.reduced_alphabet()
    long_words = [w for w in ps.forbidden if len(w) > 1]
    if not letters:
        return TransferMatrix((), ())
    if not long_words:
        # only single letters forbidden: one state, one loop per surviving letter
        return TransferMatrix(((),), ((len(letters),),))
    L = ps.L
    if len(letters) ** (L - 1) > max_states:
        raise BudgetExceeded(f"{len(letters)}^{L - 1} states exceeds budget {max_states}")

    def clean(w: Word) -> bool:
        return not any(_contains(w, f) for f in long_words)

    states = tuple(w for w in itertools.product(letters, repeat=L - 1) if clean(w))
    index = {w: i for i, w in enumerate(states)}
    rows = []
    for u in states:
        row = [0] * len(states)
        for c in letters:
            v = u[1:] + (c,)
            if v in index and clean(u + (c,)):
                row[index[v]] = 1
        rows.append(tuple(row))
    return TransferMatrix(states, tuple(rows))


def _matmul(A: Sequence[Sequence[int]], B: Sequence[Sequence[int]]) -> list[list[int]]:
    cols = list(zip(*B))
    return [[sum(a * b for a, b in zip(row, col) if a) for col in cols] for row in A]


def _identity(d: int) -> list[list[int]]:
    return [[int(i == j) for j in range(d)] for i in range(d)]


def matrix_power(T: TransferMatrix, n: int) -> list[list[int]]:
    result, base = _identity(T.dim), [list(r) for r in T.rows]
    while n:
        if n & 1:
            result = _matmul(result, base)
        n >>= 1
        if n:
            base = _matmul(base, base)
    return result


def circular_count(ps: PatternSystem, n: int, T: TransferMatrix | None = None) -> int:
    """trace(T^n), the number of circular words of length n avoiding the factors."""
    if n < 1:
        raise ValueError("n must be >= 1")
    T = build_transfer(ps) if T is None else T
    if T.dim == 0:
        return 0
    P = matrix_power(T, n)
    return sum(P[i][i] for i in range(T.dim))


def brute_circular_count(ps: PatternSystem, n: int, max_words: int = MAX_BRUTE_WORDS) -> int:
    """Count words of length n over 0..s-1 with no forbidden word in any cyclic window."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if ps.s**n > max_words:
        raise BudgetExceeded(f"{ps.s}^{n} words exceeds brute-force budget {max_words}")
    alphabet = "".join(chr(48 + c) for c in range(ps.s))
    pats = ["".join(chr(48 + c) for c in w) for w in ps.forbidden]
    total = 0
    for letters in itertools.product(alphabet, repeat=n):
        w = "".join(letters)
        ok = True
        for p in pats:
            reps = -(-len(p) // n) + 1
            if p in (w * reps)[: n + len(p) - 1]:
                ok = False
                break
        total += ok
    return total


def charpoly_trace_newton(T: TransferMatrix) -> IntPoly:
    """Characteristic polynomial from the power sums tr(T^i), i = 1..dim."""
    d = T.dim
    if d < 1:
        raise ValueError("matrix has no states")
    p = []
    M = [list(r) for r in T.rows]
    P = M
    for i in range(1, d + 1):
        p.append(sum(P[j][j] for j in range(d)))
        if i < d:
            P = _matmul(P, M)
    e = [1]
    for n in range(1, d + 1):
        s = sum((-1) ** (i - 1) * e[n - i] * p[i - 1] for i in range(1, n + 1))
        q, r = divmod(s, n)
        if r:
            raise ArithmeticError("non-integral elementary symmetric value")
        e.append(q)
    # y^d - e1 y^(d-1) + e2 y^(d-2) - ...
    return IntPoly(tuple((-1) ** (d - j) * e[d - j] for j in range(d + 1)))


class NoTestError(ValueError):
    """The automaton yields no nonconstant characteristic polynomial."""


def spec_from_patterns(ps: PatternSystem, label: str = "") -> TestSpec:
    """Trace-sequence test whose terms are trace(T^n) for n >= 1."""
    T = build_transfer(ps)
    if T.dim == 0:
        raise NoTestError(f"{ps.label()}: every word is forbidden, automaton is empty")
    chi = charpoly_trace_newton(T)
    z = next(i for i, c in enumerate(chi.coeffs) if c)
    trimmed = IntPoly(chi.coeffs[z:])
    if trimmed.degree == 0:
        raise NoTestError(f"{ps.label()}: transfer matrix is nilpotent, no test exists")
    notes = [f"removed zero root of multiplicity {z}"] if z else []
    spec = spec_from_denominator(trimmed.reversed(), label or ps.label())
    return TestSpec(spec.label, spec.e, spec.denominator, spec.numerator,
                    spec.initial_terms, tuple(ps.notes) + tuple(notes))


__all__ = [
    "NoTestError",
    "PatternSystem",
    "TransferMatrix",
    "brute_circular_count",
    "build_transfer",
    "charpoly_trace_newton",
    "circular_count",
    "load_patterns",
    "matrix_power",
    "parse_pattern_text",
    "spec_from_patterns",
]
