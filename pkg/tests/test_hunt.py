import json

import numpy as np
import pytest
from hypothesis import given, strategies as st
from sympy import isprime

from recforge.hunt import (
    EnumBox,
    RankEntry,
    SearchRange,
    enumerate_specs,
    find_pseudoprimes,
    is_prime_u64,
    rank_tests,
    score,
    segment_primality,
    base_primes,
    sieve_composites,
    sieve_limit,
)
from recforge.seqcore import BudgetExceeded, exact_term, named_spec, spec_from_e


def brute_pseudoprimes(spec, bound):
    return [n for n in range(4, bound + 1)
            if not isprime(n) and (exact_term(spec, n) - spec.target) % n == 0]


def test_sieve_small():
    table = sieve_composites(30)
    assert table.primes().tolist() == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
    assert 29 in table and 30 not in table


def test_sieve_rejects_tiny_and_oversized(monkeypatch):
    with pytest.raises(ValueError):
        sieve_composites(1)
    monkeypatch.setenv("RECFORGE_BUDGET_MB", "1")
    assert sieve_limit() == 1 << 23
    with pytest.raises(BudgetExceeded):
        sieve_composites((1 << 23) + 1)


def test_sieve_million_agrees_with_miller_rabin():
    table = sieve_composites(10**6)
    assert table.count() == 78498
    flags = table.flags()
    mr = np.array([is_prime_u64(n) for n in range(10**6 + 1)])
    assert np.array_equal(flags, mr)


def test_segment_around_published_neighbour():
    lo, hi = 1_500_000, 1_600_000
    seg = segment_primality(lo, hi, base_primes(2000))
    assert all(seg[n - lo] == is_prime_u64(n) for n in range(lo, hi + 1))
    assert seg[1531399 - lo] == isprime(1531399)


@pytest.mark.parametrize("n, want", [
    (0, False), (1, False), (2, True), (3, True), (4, False), (271441, False),
    (2**61 - 1, True), (2**64 - 59, True), (3215031751, False),
    (3825123056546413051, False), (18446744073709551557 * 1, True),
])
def test_is_prime_u64(n, want):
    assert is_prime_u64(n) is want


@given(st.integers(0, 2**64 - 1))
def test_is_prime_u64_matches_sympy(n):
    assert is_prime_u64(n) == isprime(n)


def test_pell_small_search(pell):
    assert find_pseudoprimes(pell, (2, 10)).hits == (4, 8)


def test_pell_score_matches_brute_force(pell):
    brute = brute_pseudoprimes(pell, 100)
    assert brute == [4, 8, 16, 24, 32, 48, 64, 72, 96]
    assert score(pell, 100) == (9, 4)


@pytest.mark.parametrize("e", [(0, -1, 1), (1, -1), (2, 2), (-1, 2), (3, -1, 2)])
def test_search_matches_brute_force(e):
    spec = spec_from_e(e)
    assert list(find_pseudoprimes(spec, (2, 3000), chunk=512).hits) == brute_pseudoprimes(spec, 3000)


def test_dbz_score_below_million(dbz):
    assert score(dbz, 10**5) == (0, None)


def test_report_counts(pell):
    rep = find_pseudoprimes(pell, (2, 100))
    assert rep.composites_tested == 74
    assert rep.primes_skipped == 25
    data = rep.to_json(stable=True)
    assert set(data) == {"label", "lo", "hi", "hits", "composites_tested"}
    assert "elapsed_ms" in rep.to_json()


def test_hits_are_composite_and_pass(perrin):
    rep = find_pseudoprimes(spec_from_e((1,)), (2, 500))
    assert all(not is_prime_u64(n) for n in rep.hits)
    assert list(rep.hits) == sorted(set(rep.hits))


@pytest.mark.parametrize("workers", [1, 2, 8])
def test_worker_count_independence(workers, perrin):
    base = find_pseudoprimes(spec_from_e((2, 2)), (2, 300_000), 1, chunk=10_000)
    rep = find_pseudoprimes(spec_from_e((2, 2)), (2, 300_000), workers, chunk=10_000)
    assert json.dumps(rep.to_json(stable=True)) == json.dumps(base.to_json(stable=True))


def test_monotone_prefix():
    spec = spec_from_e((1, -1))
    small = find_pseudoprimes(spec, (2, 20_000)).hits
    big = find_pseudoprimes(spec, (2, 60_000)).hits
    assert big[: len(small)] == small
    assert all(h > 20_000 for h in big[len(small):])


def test_progress_and_checkpoint(tmp_path, pell):
    ckpt = tmp_path / "ckpt.txt"
    seen = []
    rep = find_pseudoprimes(pell, (2, 5000), chunk=1000, checkpoint=ckpt,
                            progress=lambda d, t, b: seen.append((d, t, b)))
    assert [s[0] for s in seen] == [1, 2, 3, 4, 5]
    assert ckpt.read_text().strip() == "5000"
    # resume: everything already scanned
    again = find_pseudoprimes(pell, (2, 5000), chunk=1000, checkpoint=ckpt)
    assert again.hits == ()
    # partial checkpoint: only the tail is scanned
    ckpt.write_text("2999\n")
    tail = find_pseudoprimes(pell, (2, 5000), chunk=1000, checkpoint=ckpt)
    assert tail.lo == 3000
    assert tail.hits == tuple(h for h in rep.hits if h >= 3000)


def test_search_range_validation():
    with pytest.raises(ValueError):
        SearchRange(1, 10)
    with pytest.raises(ValueError):
        SearchRange(10, 5)
    assert SearchRange(2, 10).chunks(4) == [(2, 5), (6, 9), (10, 10)]


def test_search_budget(monkeypatch, pell):
    monkeypatch.setenv("RECFORGE_BUDGET_MB", "1")
    with pytest.raises(BudgetExceeded):
        find_pseudoprimes(pell, (2, 10**8))


def test_enumerate_specs():
    assert [s.e for s in enumerate_specs(EnumBox(1, 1))] == [(-1,), (1,)]
    assert len(list(enumerate_specs(EnumBox(2, 1)))) == 8
    assert EnumBox(2, 1).size() == 8
    assert (2, -1) in {s.e for s in enumerate_specs(EnumBox(2, 2))}
    assert all(s.e[-1] != 0 for s in enumerate_specs(EnumBox(3, 2)))
    with pytest.raises(ValueError):
        EnumBox(0, 1)


def test_rank_self_consistent():
    board = rank_tests(EnumBox(2, 2), 10**4, 3)
    assert len(board) == 3
    for entry in board:
        assert (entry.hits, entry.smallest) == score(spec_from_e(entry.e), 10**4)
    keys = [(e.hits, -(e.smallest or float("inf")), e.label) for e in board]
    assert keys == sorted(keys)


def test_rank_single_spec_and_pell_row():
    pell = named_spec("pell")
    assert rank_tests([pell], 100, 1) == [RankEntry("pell", (2, -1), 9, 4)]
    full = rank_tests(EnumBox(2, 2), 10**4, 100)
    row = next(e for e in full if e.e == (2, -1))
    assert row.smallest == 4
    assert all(not is_prime_u64(score(spec_from_e(e.e), 10**4)[1] or 4) for e in full)


def test_rank_budget():
    with pytest.raises(BudgetExceeded):
        rank_tests(EnumBox(8, 5), 100, 1)
