"""Evaluate a(n) mod m by powering y in Z_m[y] / chi(y).

``chi(y) = y^k Q(1/y)`` is the characteristic polynomial of the recurrence.
Writing ``y^n = sum_j r_j y^j (mod chi)`` gives ``a(n) = sum_j r_j a(j)``, so a
single residue costs O(k^2 log n) multiplications, independent of the
neighbouring n.  That matters for pseudoprime hunts where every candidate
carries its own modulus.

Two code paths share this contract:

* :func:`trace_term_mod` uses Python integers, so double-width products are
  exact for any ``m < 2**63``.
* :func:`passes_batch` is a numba kernel for the many-candidates case.  It
  needs ``m < 2**32`` (products fit in uint64) and defers reductions when
  ``2k m^2 < 2**63``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from recforge.poly import IntPoly
from recforge.seqcore import TestSpec

MAX_MODULUS = 1 << 63
KERNEL_MODULUS = 1 << 32
_I64 = 1 << 63


def charpoly_of(spec: TestSpec) -> IntPoly:
    """Monic ``y^k - e1 y^(k-1) + ... + (-1)^k ek`` (ascending coefficients)."""
    return spec.denominator.reversed(spec.k)


@dataclass(frozen=True)
class EvalContext:
    """Per-(spec, m) residues, built once and shared read-only."""

    k: int
    m: int
    rec: tuple[int, ...]
    initial: tuple[int, ...]
    target: int

    @classmethod
    def build(cls, spec: TestSpec, m: int) -> EvalContext:
        _check_modulus(m)
        return cls(
            k=spec.k,
            m=m,
            rec=tuple(r % m for r in spec.recurrence),
            initial=tuple(a % m for a in spec.initial_terms),
            target=spec.target % m,
        )

    def _reduce(self, prod: list[int]) -> list[int]:
        # fold y^d (d >= k) down using y^k = sum rec_i y^(k-i)
        k, m, rec = self.k, self.m, self.rec
        for d in range(len(prod) - 1, k - 1, -1):
            t = prod[d] % m
            if t:
                for i in range(1, k + 1):
                    prod[d - i] += t * rec[i - 1]
        return [c % m for c in prod[:k]]

    def mul(self, u: list[int], v: list[int]) -> list[int]:
        prod = [0] * (2 * self.k - 1)
        for i, a in enumerate(u):
            if a:
                for j, b in enumerate(v):
                    prod[i + j] += a * b
        return self._reduce(prod)

    def times_y(self, u: list[int]) -> list[int]:
        return self._reduce([0] + u)

    def power_of_y(self, n: int, chain: str = "ltr") -> list[int]:
        """Coefficients of ``y^n mod chi`` over Z_m."""
        one = [1 % self.m] + [0] * (self.k - 1)
        if chain == "ltr":
            r = one
            for bit in bin(n)[2:]:
                r = self.mul(r, r)
                if bit == "1":
                    r = self.times_y(r)
            return r
        if chain == "rtl":
            r, base = one, self.times_y(one)
            while n:
                if n & 1:
                    r = self.mul(r, base)
                n >>= 1
                if n:
                    base = self.mul(base, base)
            return r
        raise ValueError(f"unknown chain {chain!r}")

    def term(self, n: int, chain: str = "ltr") -> int:
        if n < self.k:
            return self.initial[n]
        r = self.power_of_y(n, chain)
        return sum(c * a for c, a in zip(r, self.initial)) % self.m


def _check_modulus(m: int) -> None:
    if not 2 <= m < MAX_MODULUS:
        raise ValueError(f"modulus must satisfy 2 <= m < 2^63, got {m}")


def trace_term_mod(spec: TestSpec, n: int, m: int, chain: str = "ltr") -> int:
    """a(n) mod m."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    return EvalContext.build(spec, m).term(n, chain)


def passes_test(spec: TestSpec, n: int) -> bool:
    """True iff ``a(n) = e1 (mod n)``."""
    if n < 2:
        raise ValueError("passes_test needs n >= 2")
    ctx = EvalContext.build(spec, n)
    return ctx.term(n) == ctx.target


# --- numba batch kernel ------------------------------------------------------


@njit(nogil=True, cache=True)
def _reduce_into(prod, r, rec, k, m, lazy):
    for d in range(2 * k - 2, k - 1, -1):
        t = prod[d] % m
        if t != 0:
            for i in range(1, k + 1):
                if lazy:
                    prod[d - i] += t * rec[i - 1]
                else:
                    prod[d - i] = (prod[d - i] + (t * rec[i - 1]) % m) % m
    for j in range(k):
        r[j] = prod[j] % m


@njit(nogil=True, cache=True)
def _trace_mod_kernel(n, m, rec, init, k, lazy, r, prod):
    if n < k:
        return init[n]
    for j in range(k):
        r[j] = np.uint64(0)
    r[0] = np.uint64(1) % m
    nbits = 0
    t = n
    while t > 0:
        nbits += 1
        t >>= np.uint64(1)
    for b in range(nbits - 1, -1, -1):
        for j in range(2 * k - 1):
            prod[j] = np.uint64(0)
        for i in range(k):
            ri = r[i]
            if ri != 0:
                for j in range(k):
                    if lazy:
                        prod[i + j] += ri * r[j]
                    else:
                        prod[i + j] = (prod[i + j] + (ri * r[j]) % m) % m
        _reduce_into(prod, r, rec, k, m, lazy)
        if (n >> np.uint64(b)) & np.uint64(1):
            top = r[k - 1]
            for j in range(k - 1, 0, -1):
                r[j] = r[j - 1]
            r[0] = np.uint64(0)
            if top != 0:
                for i in range(1, k + 1):
                    r[k - i] = (r[k - i] + (top * rec[i - 1]) % m) % m
    acc = np.uint64(0)
    for j in range(k):
        acc = (acc + (r[j] * init[j]) % m) % m
    return acc


@njit(nogil=True, cache=True)
def _passes_batch_kernel(ns, rec_signed, init_signed, target_signed, lazy):
    k = rec_signed.shape[0]
    out = np.zeros(ns.shape[0], dtype=np.bool_)
    rec = np.empty(k, dtype=np.uint64)
    init = np.empty(k, dtype=np.uint64)
    r = np.empty(k, dtype=np.uint64)
    prod = np.empty(2 * k - 1, dtype=np.uint64)
    for idx in range(ns.shape[0]):
        n = ns[idx]
        for i in range(k):
            rec[i] = np.uint64(rec_signed[i] % n)
            init[i] = np.uint64(init_signed[i] % n)
        tgt = np.uint64(target_signed % n)
        val = _trace_mod_kernel(np.uint64(n), np.uint64(n), rec, init, k, lazy, r, prod)
        out[idx] = val == tgt
    return out


def kernel_ready(spec: TestSpec, hi: int) -> bool:
    """Whether the batch kernel can evaluate ``spec`` at every n <= hi."""
    if hi >= KERNEL_MODULUS:
        return False
    vals = (*spec.recurrence, *spec.initial_terms, spec.target)
    return all(-_I64 <= v < _I64 for v in vals)


def passes_batch(spec: TestSpec, ns: np.ndarray) -> np.ndarray:
    """Vectorized :func:`passes_test` over an int64 array of candidates (each n >= 2)."""
    ns = np.ascontiguousarray(ns, dtype=np.int64)
    if ns.size == 0:
        return np.zeros(0, dtype=bool)
    lo, hi = int(ns.min()), int(ns.max())
    if lo < 2:
        raise ValueError("passes_batch needs n >= 2")
    if not kernel_ready(spec, hi):
        return np.array([passes_test(spec, int(n)) for n in ns], dtype=bool)
    lazy = 2 * spec.k * hi * hi < _I64
    return _passes_batch_kernel(
        ns,
        np.array(spec.recurrence, dtype=np.int64),
        np.array(spec.initial_terms, dtype=np.int64),
        np.int64(spec.target),
        lazy,
    )


__all__ = [
    "EvalContext",
    "KERNEL_MODULUS",
    "MAX_MODULUS",
    "charpoly_of",
    "kernel_ready",
    "passes_batch",
    "passes_test",
    "trace_term_mod",
]
