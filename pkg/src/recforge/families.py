"""Explicit infinite pseudoprime families and the identities behind them."""

from __future__ import annotations

import heapq
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from recforge.hunt import is_prime_u64
from recforge.modeval import MAX_MODULUS, passes_test, trace_term_mod
from recforge.seqcore import EXACT_TERM_LIMIT, BudgetExceeded, TestSpec, exact_terms, named_spec

U64_LIMIT = MAX_MODULUS - 1


@dataclass(frozen=True)
class FamilySpec:
    """Members ``c * b**(a + d*i) [* b2**j]`` for ``i >= i0`` (and ``j >= j0``)."""

    c: int
    b: int
    a: int = 0
    d: int = 1
    i0: int = 0
    b2: int | None = None
    j0: int = 0

    def __post_init__(self):
        if self.c < 1 or self.b < 2 or self.a < 0 or self.d < 1 or self.i0 < 0 or self.j0 < 0:
            raise ValueError(f"invalid family parameters: {self}")
        if self.b2 is not None and self.b2 < 2:
            raise ValueError("second base must be >= 2")
        if self.first() < 2:
            raise ValueError("family members must be >= 2")

    def member(self, i: int, j: int = 0) -> int:
        n = self.c * self.b ** (self.a + self.d * i)
        if self.b2 is not None:
            n *= self.b2**j
        return n

    def first(self) -> int:
        return self.member(self.i0, self.j0)

    def to_json(self) -> dict:
        out = {"c": self.c, "b": self.b, "a": self.a, "d": self.d, "i0": self.i0}
        if self.b2 is not None:
            out["b2"] = self.b2
            out["j0"] = self.j0
        return out

    @classmethod
    def from_json(cls, data: dict) -> FamilySpec:
        return cls(**{k: int(v) for k, v in data.items() if v is not None})

    def __str__(self) -> str:
        exp = _exponent_text(self.a, self.d, "i")
        body = f"{self.b}^{exp}" if self.c == 1 else f"{self.c}*{self.b}^{exp}"
        bounds = f"i>={self.i0}"
        if self.b2 is not None:
            body += f"*{self.b2}^j"
            bounds += f", j>={self.j0}"
        return f"{{{body} | {bounds}}}"


def _exponent_text(a: int, d: int, var: str) -> str:
    step = var if d == 1 else f"{d}{var}"
    if a == 0:
        return step if d == 1 else f"({step})"
    return f"({a}+{step})"


def members(family: FamilySpec, cap: int) -> list[int]:
    """Members <= cap in ascending order, never beyond 2^63 - 1."""
    if cap < 2:
        raise ValueError("cap must be >= 2")
    cap = min(cap, U64_LIMIT)
    if family.b2 is None:
        out = []
        i = family.i0
        while (n := family.member(i)) <= cap:
            out.append(n)
            i += 1
        return out
    # two independent exponents: walk a heap so output stays ascending
    start = (family.i0, family.j0)
    heap = [(family.member(*start), *start)]
    out = []
    while heap:
        n, i, j = heapq.heappop(heap)
        if n > cap:
            break
        if not out or out[-1] != n:
            out.append(n)
        heapq.heappush(heap, (family.member(i + 1, j), i + 1, j))
        if i == family.i0:
            heapq.heappush(heap, (family.member(i, j + 1), i, j + 1))
    return out


@dataclass
class FamilyReport:
    test: str
    family: FamilySpec
    cap: int
    members: list[int]
    composite: list[bool]
    passes: list[bool]
    notes: list[str] = field(default_factory=list)

    @property
    def all_pass(self) -> bool:
        return all(self.composite) and all(self.passes)

    def failures(self) -> list[int]:
        return [n for n, c, p in zip(self.members, self.composite, self.passes) if not (c and p)]

    def to_json(self) -> dict:
        out = {
            "test": self.test,
            "family": self.family.to_json(),
            "cap": str(self.cap),
            "members": [str(n) for n in self.members],
            "all_pass": self.all_pass,
        }
        if self.notes:
            out["notes"] = list(self.notes)
        return out


def _check_member(spec: TestSpec, n: int) -> tuple[bool, bool]:
    return not is_prime_u64(n), passes_test(spec, n)


def verify_family(spec: TestSpec, family: FamilySpec, cap: int, workers: int = 1) -> FamilyReport:
    """Certify every member <= cap composite and check that it passes ``spec``.

    Caps at or beyond 2^63 are clamped; the clamp and an empty member list
    are both recorded as ``cap-truncated`` notes.
    """
    notes = []
    if cap >= MAX_MODULUS:
        notes.append(f"cap-truncated: cap {cap} clamped to 2^63-1")
    mem = members(family, cap)
    if not mem:
        notes.append(f"cap-truncated: first member {family.first()} exceeds cap {min(cap, U64_LIMIT)}")
    elif family.b2 is None:
        nxt = family.member(family.i0 + len(mem))
        if nxt > U64_LIMIT and cap > U64_LIMIT:
            notes.append(f"cap-truncated: next member {nxt} exceeds 2^63-1")
    if workers > 1 and len(mem) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            checks = list(pool.map(lambda n: _check_member(spec, n), mem))
    else:
        checks = [_check_member(spec, n) for n in mem]
    return FamilyReport(
        test=spec.label,
        family=family,
        cap=cap,
        members=mem,
        composite=[c for c, _ in checks],
        passes=[p for _, p in checks],
        notes=notes,
    )


def builtin_catalog() -> list[tuple[TestSpec, list[FamilySpec]]]:
    """The five tests with explicit families, each with every published family."""
    F = FamilySpec
    return [
        (named_spec("t1"), [F(c=1, b=2, i0=3, b2=3, j0=0)]),
        (named_spec("t2"), [F(c=1, b=2, i0=2)]),
        (named_spec("t3"), [
            F(c=1, b=3, i0=2),
            F(c=2, b=3, i0=1),
            F(c=11, b=81, i0=1),
            F(c=23, b=3, d=5, i0=1),
            F(c=29, b=3, a=4, d=12, i0=0),
            F(c=31, b=3, d=16, i0=1),
        ]),
        (named_spec("t4"), [
            F(c=1, b=2, i0=2),
            F(c=3, b=2, d=4, i0=2),
            F(c=11, b=2, d=18, i0=2),
            F(c=13, b=2, a=17, d=20, i0=2),
        ]),
        (named_spec("t5"), [
            F(c=1, b=3, i0=2),
            F(c=5, b=3, a=6, d=10, i0=0),
            F(c=5, b=3, a=8, d=10, i0=0),
            F(c=7, b=3, a=4, d=6, i0=0),
        ]),
    ]


@dataclass
class IdentityVerdict:
    name: str
    checked: int
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def __bool__(self) -> bool:
        return self.ok

    def fail(self, msg: str) -> None:
        if len(self.failures) < 20:
            self.failures.append(msg)


def _sign(n: int) -> int:
    # (-1)^(n+1)
    return 1 if n % 2 else -1


def check_pell_identities(N: int) -> IdentityVerdict:
    """Doubling/tripling identities of the Companion Pell numbers, exactly, for 1 <= n <= N.

    With ``b = a - 2`` and n even, the tripling rule expands to
    ``b(3n) = b(n) (b(n) + 3)^2``.  The often-quoted form
    ``b(n) (b(n)^2 + 6 b(n) + 12)`` is wrong already at n = 2
    (b(6) = 196, not 208); see :func:`printed_tripling_form`.
    """
    if 3 * N > EXACT_TERM_LIMIT:
        raise BudgetExceeded(f"N={N} needs terms beyond index {EXACT_TERM_LIMIT}")
    a = exact_terms(named_spec("pell"), 3 * N)
    b = [x - 2 for x in a]
    v = IdentityVerdict("pell", N)
    for n in range(1, N + 1):
        s = _sign(n)
        if a[2 * n] != a[n] ** 2 + 2 * s:
            v.fail(f"a(2n) = a(n)^2 + 2(-1)^(n+1) fails at n={n}")
        if a[3 * n] != a[n] ** 3 + 3 * s * a[n]:
            v.fail(f"a(3n) = a(n)^3 + 3(-1)^(n+1) a(n) fails at n={n}")
        if n % 2 == 0:
            if b[2 * n] != b[n] * (b[n] + 4):
                v.fail(f"b(2n) = b(n)(b(n)+4) fails at n={n}")
            if b[3 * n] != b[n] * (b[n] + 3) ** 2:
                v.fail(f"b(3n) = b(n)(b(n)+3)^2 fails at n={n}")
    return v


T4_B_INITIAL = (-4, -8, -40)
T4_C_INITIAL = (-4, -4, -20, -24, -56, -76)


def check_cfinite_derived(N: int) -> IdentityVerdict:
    """Derived recurrences for ``b(n) = a(2n) - a(n)^2`` and ``c(n) = b(n) / 2^floor(n/2)``
    of the fourth family test, exactly, for 1 <= n <= N."""
    if 2 * N > EXACT_TERM_LIMIT:
        raise BudgetExceeded(f"N={N} needs terms beyond index {EXACT_TERM_LIMIT}")
    a = exact_terms(named_spec("t4"), 2 * N)
    v = IdentityVerdict("t4-cfinite", N)
    b = [None] + [a[2 * n] - a[n] ** 2 for n in range(1, N + 1)]
    c: list[int | None] = [None]
    for n in range(1, N + 1):
        q, r = divmod(b[n], 1 << (n // 2))
        if r:
            v.fail(f"b({n}) not divisible by 2^{n // 2}")
        c.append(q)
    for n, want in enumerate(T4_B_INITIAL, start=1):
        if n <= N and b[n] != want:
            v.fail(f"b({n}) = {b[n]}, expected {want}")
    for n, want in enumerate(T4_C_INITIAL, start=1):
        if n <= N and c[n] != want:
            v.fail(f"c({n}) = {c[n]}, expected {want}")
    for n in range(4, N + 1):
        if b[n] != 2 * b[n - 1] + 4 * b[n - 3]:
            v.fail(f"b(n) = 2b(n-1) + 4b(n-3) fails at n={n}")
    for n in range(7, N + 1):
        if c[n] != 2 * c[n - 2] + 4 * c[n - 4] + 2 * c[n - 6]:
            v.fail(f"c(n) = 2c(n-2) + 4c(n-4) + 2c(n-6) fails at n={n}")
    for n in range(1, N + 1):
        if a[2 * n] != a[n] ** 2 + (1 << (n // 2)) * c[n]:
            v.fail(f"a(2n) = a(n)^2 + 2^floor(n/2) c(n) fails at n={n}")
    return v


def printed_tripling_form(n: int) -> tuple[int, int]:
    """(b(3n), b(n)(b(n)^2 + 6b(n) + 12)) for the Companion Pell numbers."""
    a = exact_terms(named_spec("pell"), 3 * n)
    bn, b3n = a[n] - 2, a[3 * n] - 2
    return b3n, bn * (bn**2 + 6 * bn + 12)


def pell_closure(limit: int) -> IdentityVerdict:
    """Induction steps of the Companion Pell family, by modular evaluation.

    For even n <= limit with n | b(n): 2n | b(2n); if also 6 | n: 3n | b(3n).
    """
    spec = named_spec("pell")
    v = IdentityVerdict("pell-closure", 0)

    def divides(n: int) -> bool:
        return (trace_term_mod(spec, n, n) - 2) % n == 0

    for n in range(2, limit + 1, 2):
        if divides(n):
            v.checked += 1
            if not divides(2 * n):
                v.fail(f"doubling closure fails at n={n}")
            if n % 6 == 0 and not divides(3 * n):
                v.fail(f"tripling closure fails at n={n}")
    return v


__all__ = [
    "FamilyReport",
    "FamilySpec",
    "IdentityVerdict",
    "builtin_catalog",
    "check_cfinite_derived",
    "check_pell_identities",
    "members",
    "pell_closure",
    "printed_tripling_form",
    "verify_family",
]
