import pytest
from hypothesis import given, strategies as st

from recforge.poly import IntPoly

coeffs = st.lists(st.integers(-10**30, 10**30), max_size=8)


def test_canonical_form_trims_trailing_zeros():
    assert IntPoly((1, 2, 0, 0)).coeffs == (1, 2)
    assert IntPoly((0, 0)).coeffs == ()
    assert IntPoly().degree is None
    assert IntPoly.of(0, 0, 3).degree == 2


def test_rejects_non_integers():
    with pytest.raises(TypeError):
        IntPoly((1.5,))
    with pytest.raises(TypeError):
        IntPoly((True,))


def test_reversal_and_json():
    q = IntPoly.of(1, 0, -1, -1)
    assert q.reversed(3).coeffs == (-1, -1, 0, 1)
    assert IntPoly.from_json(q.to_json()) == q
    assert q.to_json() == ["1", "0", "-1", "-1"]
    assert IntPoly.from_json('["1", "-2", "-1"]') == IntPoly.of(1, -2, -1)


def test_str():
    assert str(IntPoly.of(7, -6, -5, 0, -3)) == "7 - 6x - 5x^2 - 3x^4"
    assert str(IntPoly()) == "0"


@given(coeffs)
def test_eval_at_zero_is_constant_term(c):
    p = IntPoly(tuple(c))
    assert p(0) == (p.coeffs[0] if p.coeffs else 0)


@given(coeffs, coeffs, st.integers(-50, 50))
def test_ring_homomorphism(a, b, x):
    p, q = IntPoly(tuple(a)), IntPoly(tuple(b))
    assert (p * q)(x) == p(x) * q(x)
    assert (p + q)(x) == p(x) + q(x)
    assert (p - q)(x) == p(x) - q(x)


@given(coeffs)
def test_no_trailing_zeros_stored(c):
    p = IntPoly(tuple(c))
    assert not p.coeffs or p.coeffs[-1] != 0
