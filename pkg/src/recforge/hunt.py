"""Sieving, primality certification and pseudoprime search."""

from __future__ import annotations

import itertools
import logging
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterator

import numpy as np

from recforge.modeval import passes_batch, passes_test
from recforge.seqcore import BudgetExceeded, TestSpec, spec_from_e

log = logging.getLogger(__name__)

DEFAULT_CHUNK = 1 << 16
DEFAULT_BUDGET_MB = 512
MAX_RANK_SPECS = 100_000

# Strong-probable-prime bases that are deterministic for every n < 3.3e24.
MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def budget_mb() -> int:
    raw = os.environ.get("RECFORGE_BUDGET_MB")
    if not raw:
        return DEFAULT_BUDGET_MB
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"RECFORGE_BUDGET_MB must be an integer, got {raw!r}") from None
    if value < 1:
        raise ValueError("RECFORGE_BUDGET_MB must be positive")
    return value


def sieve_limit() -> int:
    """Largest N the bit-packed primality table may cover (2^32 at the default budget)."""
    return budget_mb() * (1 << 20) * 8


def is_prime_u64(n: int) -> bool:
    if n < 2:
        return False
    for p in MR_WITNESSES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in MR_WITNESSES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def base_primes(limit: int) -> np.ndarray:
    """All primes <= limit (plain sieve, meant for limit ~ sqrt(N))."""
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if flags[p]:
            flags[p * p :: p] = False
    return np.flatnonzero(flags).astype(np.int64)


def segment_primality(lo: int, hi: int, primes: np.ndarray) -> np.ndarray:
    """Boolean primality of lo..hi inclusive; ``primes`` must cover sqrt(hi)."""
    flags = np.ones(hi - lo + 1, dtype=bool)
    if lo < 2:
        flags[: 2 - lo] = False
    for p in primes:
        p = int(p)
        if p * p > hi:
            break
        start = max(p * p, -(-lo // p) * p)
        flags[start - lo :: p] = False
    return flags


class PrimalityTable:
    """Bit-packed primality of 0..N with O(1) lookup."""

    def __init__(self, N: int, bits: np.ndarray):
        self.N = N
        self._bits = bits

    def is_prime(self, n: int) -> bool:
        if not 0 <= n <= self.N:
            raise IndexError(f"{n} outside table range [0, {self.N}]")
        return bool((self._bits[n >> 3] >> (7 - (n & 7))) & 1)

    __contains__ = is_prime

    def flags(self, lo: int = 0, hi: int | None = None) -> np.ndarray:
        hi = self.N if hi is None else hi
        return np.unpackbits(self._bits, count=self.N + 1)[lo : hi + 1].astype(bool)

    def primes(self) -> np.ndarray:
        return np.flatnonzero(self.flags()).astype(np.int64)

    def count(self) -> int:
        return int(np.unpackbits(self._bits, count=self.N + 1).sum())


def sieve_composites(N: int, segment: int = 1 << 20) -> PrimalityTable:
    """Segmented Eratosthenes over 0..N, packed to one bit per integer."""
    if N < 2:
        raise ValueError("sieve needs N >= 2")
    if N > sieve_limit():
        raise BudgetExceeded(
            f"sieve bound {N} exceeds budget {sieve_limit()} (RECFORGE_BUDGET_MB={budget_mb()})"
        )
    primes = base_primes(math.isqrt(N))
    segment -= segment % 8
    parts = []
    for lo in range(0, N + 1, segment):
        hi = min(lo + segment - 1, N)
        parts.append(np.packbits(segment_primality(lo, hi, primes)))
    return PrimalityTable(N, np.concatenate(parts))


@dataclass(frozen=True)
class SearchRange:
    lo: int
    hi: int

    def __post_init__(self):
        if not 2 <= self.lo <= self.hi:
            raise ValueError(f"need 2 <= lo <= hi, got [{self.lo}, {self.hi}]")

    def chunks(self, size: int = DEFAULT_CHUNK) -> list[tuple[int, int]]:
        return [(a, min(a + size - 1, self.hi)) for a in range(self.lo, self.hi + 1, size)]


@dataclass(frozen=True)
class PseudoprimeReport:
    label: str
    lo: int
    hi: int
    hits: tuple[int, ...]
    composites_tested: int
    primes_skipped: int
    elapsed_ms: int

    def to_json(self, stable: bool = False) -> dict:
        out = {
            "label": self.label,
            "lo": self.lo,
            "hi": self.hi,
            "hits": [str(h) for h in self.hits],
            "composites_tested": self.composites_tested,
        }
        if not stable:
            out["elapsed_ms"] = self.elapsed_ms
        return out


def _scan_chunk(spec: TestSpec, lo: int, hi: int, primes: np.ndarray):
    prime = segment_primality(lo, hi, primes)
    ns = np.arange(lo, hi + 1, dtype=np.int64)
    composite = ~prime & (ns >= 4)
    cands = ns[composite]
    hits = cands[passes_batch(spec, cands)]
    return [int(h) for h in hits], int(cands.size), int(prime.sum())


def _read_checkpoint(path: Path) -> int | None:
    try:
        text = path.read_text(encoding="utf-8").strip()
    except FileNotFoundError:
        return None
    return int(text) if text else None


def find_pseudoprimes(
    spec: TestSpec,
    rng: SearchRange | tuple[int, int],
    workers: int = 1,
    *,
    chunk: int = DEFAULT_CHUNK,
    progress: Callable[[int, int, int], None] | None = None,
    checkpoint: str | os.PathLike | None = None,
) -> PseudoprimeReport:
    """Every composite n in the range with ``a(n) = e1 (mod n)``, ascending.

    Chunks are scanned by ``workers`` threads (the kernel releases the GIL)
    and merged in range order, so the report does not depend on ``workers``.
    ``progress(done, total, bound)`` fires once per finished chunk.  With a
    ``checkpoint`` path, the upper bound of the longest fully scanned prefix is
    written after every chunk; an existing file makes the scan resume after it
    (the report then starts at the resume point).
    """
    if not isinstance(rng, SearchRange):
        rng = SearchRange(*rng)
    if workers < 1:
        raise ValueError("workers must be >= 1")
    if rng.hi > sieve_limit():
        raise BudgetExceeded(f"search bound {rng.hi} exceeds sieve budget {sieve_limit()}")
    ckpt = Path(checkpoint) if checkpoint is not None else None
    if ckpt is not None:
        done_to = _read_checkpoint(ckpt)
        if done_to is not None and done_to >= rng.lo:
            if done_to >= rng.hi:
                log.info("checkpoint %s already covers [%d, %d]", ckpt, rng.lo, rng.hi)
                return PseudoprimeReport(spec.label, rng.hi + 1, rng.hi, (), 0, 0, 0)
            log.info("resuming after %d from %s", done_to, ckpt)
            rng = SearchRange(done_to + 1, rng.hi)

    start = time.perf_counter()
    primes = base_primes(math.isqrt(rng.hi))
    pieces = rng.chunks(chunk)
    results: list = [None] * len(pieces)
    finished = 0
    prefix = 0

    def _record(i, res):
        nonlocal finished, prefix
        results[i] = res
        finished += 1
        while prefix < len(pieces) and results[prefix] is not None:
            prefix += 1
        if ckpt is not None and prefix:
            ckpt.write_text(f"{pieces[prefix - 1][1]}\n", encoding="utf-8")
        if progress is not None:
            progress(finished, len(pieces), pieces[i][1])

    if workers == 1:
        for i, (a, b) in enumerate(pieces):
            _record(i, _scan_chunk(spec, a, b, primes))
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futs = {pool.submit(_scan_chunk, spec, a, b, primes): i for i, (a, b) in enumerate(pieces)}
            for fut in as_completed(futs):
                _record(futs[fut], fut.result())

    hits = tuple(itertools.chain.from_iterable(r[0] for r in results))
    return PseudoprimeReport(
        label=spec.label,
        lo=rng.lo,
        hi=rng.hi,
        hits=hits,
        composites_tested=sum(r[1] for r in results),
        primes_skipped=sum(r[2] for r in results),
        elapsed_ms=round((time.perf_counter() - start) * 1000),
    )


def score(spec: TestSpec, bound: int, workers: int = 1) -> tuple[int, int | None]:
    """(number of pseudoprimes <= bound, smallest one or None)."""
    report = find_pseudoprimes(spec, (2, bound), workers)
    return len(report.hits), (report.hits[0] if report.hits else None)


@dataclass(frozen=True)
class EnumBox:
    k_max: int
    c_max: int

    def __post_init__(self):
        if self.k_max < 1 or self.c_max < 1:
            raise ValueError("EnumBox needs k_max >= 1 and c_max >= 1")

    def size(self) -> int:
        w = 2 * self.c_max + 1
        return sum(w ** (k - 1) * 2 * self.c_max for k in range(1, self.k_max + 1))


def enumerate_specs(box: EnumBox) -> Iterator[TestSpec]:
    """Every e-vector with k <= k_max, |e_i| <= c_max, e_k != 0.

    Ordered by k, then lexicographically within each k.
    """
    rng = range(-box.c_max, box.c_max + 1)
    last = [c for c in rng if c]
    for k in range(1, box.k_max + 1):
        for head in itertools.product(rng, repeat=k - 1):
            for tail in last:
                yield spec_from_e((*head, tail))


@dataclass(frozen=True)
class RankEntry:
    label: str
    e: tuple[int, ...]
    hits: int
    smallest: int | None

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "e": [str(c) for c in self.e],
            "hits": self.hits,
            "smallest": None if self.smallest is None else str(self.smallest),
        }


def _rank_key(entry: RankEntry):
    smallest = math.inf if entry.smallest is None else entry.smallest
    return (entry.hits, -smallest, entry.label)


def rank_tests(
    box: EnumBox | list[TestSpec], bound: int, top: int, workers: int = 1
) -> list[RankEntry]:
    """Score every spec in the box up to ``bound`` and keep the ``top`` best.

    Best means fewest pseudoprimes, then the largest smallest pseudoprime,
    then label order.
    """
    if top < 1:
        raise ValueError("top must be >= 1")
    if isinstance(box, EnumBox):
        if box.size() > MAX_RANK_SPECS:
            raise BudgetExceeded(f"box has {box.size()} specs, limit is {MAX_RANK_SPECS}")
        specs = enumerate_specs(box)
    else:
        specs = iter(box)
    entries = []
    for spec in specs:
        count, smallest = score(spec, bound, workers)
        entries.append(RankEntry(spec.label, spec.e, count, smallest))
    entries.sort(key=_rank_key)
    return entries[:top]


__all__ = [
    "EnumBox",
    "MR_WITNESSES",
    "PrimalityTable",
    "PseudoprimeReport",
    "RankEntry",
    "SearchRange",
    "enumerate_specs",
    "find_pseudoprimes",
    "is_prime_u64",
    "passes_test",
    "rank_tests",
    "score",
    "segment_primality",
    "sieve_composites",
    "sieve_limit",
]
