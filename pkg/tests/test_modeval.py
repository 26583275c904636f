import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from sympy import primerange

from recforge.modeval import (
    EvalContext,
    _trace_mod_kernel,
    charpoly_of,
    kernel_ready,
    passes_batch,
    passes_test,
    trace_term_mod,
)
from recforge.poly import IntPoly
from recforge.seqcore import exact_term, named_spec, spec_from_e


def test_charpoly(pell, perrin):
    assert charpoly_of(pell) == IntPoly.of(-1, -2, 1)
    assert charpoly_of(perrin) == IntPoly.of(-1, -1, 0, 1)
    assert charpoly_of(spec_from_e((7,))) == IntPoly.of(-7, 1)


def test_trace_examples(perrin, pell, dbz):
    assert trace_term_mod(perrin, 271441, 271441) == 0
    assert trace_term_mod(pell, 8, 8) == 2
    assert trace_term_mod(dbz, 1531398, 1531398) == 1
    for spec in (perrin, pell, dbz):
        assert trace_term_mod(spec, 1, 97) == spec.target % 97


def test_passes_examples(pell):
    assert passes_test(pell, 7)
    assert not passes_test(pell, 6)
    assert passes_test(named_spec("t2"), 4)


def test_rejects_small_modulus(pell):
    with pytest.raises(ValueError):
        trace_term_mod(pell, 5, 1)
    with pytest.raises(ValueError):
        trace_term_mod(pell, 5, 1 << 63)
    with pytest.raises(ValueError):
        passes_test(pell, 1)


def test_negative_target_normalized():
    spec = spec_from_e((-2,))
    # a(n) = (-2)^n; a(p) = -2 (mod p) for primes
    assert passes_test(spec, 7)
    assert passes_test(spec, 2)


def test_prime_congruence_on_corpus(corpus):
    primes = list(primerange(2, 2001))
    for spec in corpus:
        bad = [p for p in primes if not passes_test(spec, p)]
        assert not bad, (spec.label, bad[:5])


def test_batch_kernel_agrees_with_exact(corpus):
    ns = np.arange(2, 1500, dtype=np.int64)
    for spec in corpus:
        want = np.array([(exact_term(spec, int(n)) - spec.target) % int(n) == 0 for n in ns])
        assert np.array_equal(passes_batch(spec, ns), want), spec.label


def test_batch_kernel_non_lazy_path(dbz):
    # moduli near 2^32 force per-product reduction
    ns = np.array([(1 << 32) - 5, (1 << 32) - 17, 3_000_000_019], dtype=np.int64)
    assert 2 * dbz.k * int(ns.max()) ** 2 >= 1 << 63
    assert kernel_ready(dbz, int(ns.max()))
    got = passes_batch(dbz, ns)
    assert list(got) == [passes_test(dbz, int(n)) for n in ns]


def test_batch_falls_back_beyond_kernel_range(pell):
    ns = np.array([8 * 3**20, 16 * 3**21], dtype=np.int64)
    assert not kernel_ready(pell, int(ns.max()))
    assert passes_batch(pell, ns).all()


def test_raw_kernel_residues(dbz):
    k = dbz.k
    for n, m in [(0, 97), (6, 97), (3000, 1_000_003), (2999, (1 << 32) - 1)]:
        rec = np.array([r % m for r in dbz.recurrence], dtype=np.uint64)
        init = np.array([a % m for a in dbz.initial_terms], dtype=np.uint64)
        lazy = 2 * k * m * m < (1 << 63)
        got = _trace_mod_kernel(np.uint64(n), np.uint64(m), rec, init, k, lazy,
                                np.empty(k, np.uint64), np.empty(2 * k - 1, np.uint64))
        assert int(got) == exact_term(dbz, n) % m


specs = st.lists(st.integers(-5, 5), min_size=1, max_size=6).filter(lambda e: e[-1] != 0).map(spec_from_e)


@settings(max_examples=150, deadline=None)
@given(specs, st.integers(0, 3000), st.integers(2, (1 << 63) - 1))
def test_oracle_equivalence(spec, n, m):
    assert trace_term_mod(spec, n, m) == exact_term(spec, n) % m


@settings(max_examples=100, deadline=None)
@given(specs, st.integers(0, 10**12), st.integers(2, 1 << 31), st.integers(1, 1 << 31))
def test_modulus_compatibility(spec, n, m1, m2):
    assert trace_term_mod(spec, n, m1 * m2) % m1 == trace_term_mod(spec, n, m1)


@settings(max_examples=100, deadline=None)
@given(specs, st.integers(0, 10**15), st.integers(2, (1 << 63) - 1))
def test_chain_independence(spec, n, m):
    assert trace_term_mod(spec, n, m, "ltr") == trace_term_mod(spec, n, m, "rtl")


def test_context_is_immutable(pell):
    ctx = EvalContext.build(pell, 101)
    with pytest.raises(Exception):
        ctx.m = 7
    assert ctx.rec == (2, 1)
    assert EvalContext.build(spec_from_e((-3, 4)), 10).rec == (7, 6)
