"""Fast self-checks: identities, oracle agreement and the prime congruence."""

from __future__ import annotations

import dataclasses
import random
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from recforge import cyclic, families, hunt, modeval
from recforge.seqcore import TestSpec, exact_term, named_spec, named_tests, series_terms

PUBLISHED_INITIAL = {
    "pell": (2, 6),
    "dbz": (1, 3, 4, 11, 16, 30, 78),
    "t2": (1, 5),
    "t3": (2, 8),
    "t4": (0, -4, -6),
    "t5": (1, 5, 10),
}


@dataclass
class CheckResult:
    name: str
    ok: bool
    detail: str
    seconds: float


def corrupt_initial(spec: TestSpec, index: int = -1, delta: int = 1) -> TestSpec:
    """Copy of ``spec`` with one initial term shifted (fault-injection hook)."""
    terms = list(spec.initial_terms)
    terms[index] += delta
    return dataclasses.replace(spec, initial_terms=tuple(terms))


def _specs(fault: bool) -> dict[str, TestSpec]:
    specs = {name: named_spec(name) for name in named_tests()}
    if fault:
        specs["perrin"] = corrupt_initial(specs["perrin"])
    return specs


def _published(specs):
    bad = []
    for name, want in PUBLISHED_INITIAL.items():
        got = tuple(series_terms(specs[name], len(want))[1:])
        if got != want:
            bad.append(f"{name}: {got} != {want}")
    return not bad, "; ".join(bad) or f"{len(PUBLISHED_INITIAL)} tests match"


def _series_vs_recurrence(specs):
    bad = [name for name, s in specs.items()
           if any(series_terms(s, 200)[n] != exact_term(s, n) for n in range(201))]
    return not bad, f"mismatch in {bad}" if bad else "n <= 200 agree"


def _congruence(specs):
    primes = [int(p) for p in hunt.base_primes(500)]
    bad = [(name, p) for name, s in specs.items() for p in primes if not modeval.passes_test(s, p)]
    return not bad, f"first failures {bad[:3]}" if bad else f"{len(primes)} primes x {len(specs)} tests"


def _oracle(specs):
    rng = random.Random(7)
    names = sorted(specs)
    bad = []
    for _ in range(100):
        s = specs[rng.choice(names)]
        n = rng.randrange(0, 1500)
        m = rng.randrange(2, 1 << 63)
        if modeval.trace_term_mod(s, n, m) != exact_term(s, n) % m:
            bad.append((s.label, n, m))
    # kernel path against the Python path
    s = specs["dbz"]
    ns = np.arange(2, 3000, dtype=np.int64)
    fast = modeval.passes_batch(s, ns)
    slow = np.array([(exact_term(s, int(n)) - s.target) % int(n) == 0 for n in ns])
    if not np.array_equal(fast, slow):
        bad.append(("kernel", "dbz"))
    return not bad, f"failures {bad[:3]}" if bad else "100 random triples + kernel sweep agree"


def _identities(specs):
    v1, v2 = families.check_pell_identities(300), families.check_cfinite_derived(300)
    fails = v1.failures + v2.failures
    return not fails, "; ".join(fails[:3]) or "pell + derived recurrences hold to 300"


def _cyclic(specs):
    ps = cyclic.PatternSystem.make(2, ["000", "11"])
    T = cyclic.build_transfer(ps)
    counts = [cyclic.circular_count(ps, n, T) for n in range(1, 11)]
    brute = [cyclic.brute_circular_count(ps, n) for n in range(2, 13)]
    trace = [cyclic.circular_count(ps, n, T) for n in range(2, 13)]
    chi = cyclic.charpoly_trace_newton(T)
    spec = cyclic.spec_from_patterns(ps)
    perrin = specs["perrin"]
    ok = (counts == [0, 2, 3, 2, 5, 5, 7, 10, 12, 17] and brute == trace
          and chi.coeffs == (-1, -1, 0, 1)
          and spec.denominator == perrin.denominator
          and spec.initial_terms == perrin.initial_terms)
    return ok, "{000,11} -> y^3 - y - 1, counts and brute force agree" if ok else f"counts={counts}"


def _perrin_search(specs):
    report = hunt.find_pseudoprimes(specs["perrin"], (2, 10**6))
    ok = report.hits == (271441, 904631)
    return ok, f"hits {list(report.hits)}"


def _catalog(specs):
    bad = []
    for spec, fams in families.builtin_catalog():
        for fam in fams:
            rep = families.verify_family(spec, fam, 10**12)
            if not rep.all_pass:
                bad.append(f"{spec.label} {fam}")
    return not bad, f"failing {bad}" if bad else "all catalog families to 1e12"


CHECKS: list[tuple[str, Callable]] = [
    ("published-initial-terms", _published),
    ("series-vs-recurrence", _series_vs_recurrence),
    ("prime-congruence", _congruence),
    ("oracle-equivalence", _oracle),
    ("identities", _identities),
    ("cyclic-pipeline", _cyclic),
    ("perrin-search-1e6", _perrin_search),
    ("family-catalog", _catalog),
]


def run_selftest(inject_fault: bool = False) -> list[CheckResult]:
    specs = _specs(inject_fault)
    out = []
    for name, fn in CHECKS:
        t = time.perf_counter()
        try:
            ok, detail = fn(specs)
        except Exception as exc:  # a crashing check is a failed check
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        out.append(CheckResult(name, bool(ok), detail, time.perf_counter() - t))
    return out
