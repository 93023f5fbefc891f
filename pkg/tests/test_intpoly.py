import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from intersective_lab.errors import NonIntegralQuotient, ZeroPolynomialError
from intersective_lab.intpoly import IntPoly

X2 = IntPoly([0, 0, 1])
X2M1 = IntPoly([-1, 0, 1])


def naive_eval(coeffs, x):
    return sum(c * x**i for i, c in enumerate(coeffs))


def test_evaluate_examples():
    assert X2.evaluate(3) == 9
    assert X2M1.evaluate(1) == 0
    assert IntPoly([0, 1, 0, 3]).evaluate(-2) == -26  # 3x^3 + x at -2


def test_evaluate_matches_naive_power_loop():
    rng = random.Random(1)
    for _ in range(200):
        coeffs = [rng.randint(-50, 50) for _ in range(rng.randint(1, 7))]
        x = rng.randint(-30, 30)
        assert IntPoly(coeffs).evaluate(x) == naive_eval(coeffs, x)


def test_normalization_and_degree():
    assert IntPoly([1, 2, 0, 0]).coeffs == (1, 2)
    z = IntPoly([0, 0])
    assert z.is_zero() and z.degree() == -1
    p = IntPoly([5, 0, 7])
    assert p.degree() == len(p.coeffs) - 1


def test_derivative():
    assert IntPoly([0, 0, 0, 1]).derivative().coeffs == (0, 0, 3)
    assert IntPoly([7]).derivative().is_zero()
    assert X2M1.derivative().coeffs == (0, 2)


def test_content():
    assert IntPoly([3, 4, 2]).content() == 2  # 2x^2+4x+3: gcd(2,4), a_0 excluded
    assert X2.content() == 1
    assert IntPoly([5, 0, 9, 6]).content() == 3
    with pytest.raises(ZeroPolynomialError):
        IntPoly([7]).content()
    with pytest.raises(ZeroPolynomialError):
        IntPoly([]).content()


def test_shift_scale_divide_examples():
    assert X2.shift_scale_divide(0, 3, 9).coeffs == (0, 0, 1)
    assert X2.shift_scale_divide(0, 1, 1) == X2
    got = X2M1.shift_scale_divide(-5, 6, 6)
    assert got.coeffs == (4, -10, 6)
    for x in range(1, 21):
        assert 6 * got.evaluate(x) == X2M1.evaluate(-5 + 6 * x)


def test_shift_scale_divide_cross_eval():
    rng = random.Random(2)
    for _ in range(100):
        h = IntPoly([rng.randint(-9, 9) for _ in range(rng.randint(2, 6))])
        if h.is_zero():
            continue
        r, d = rng.randint(-10, 10), rng.randint(1, 6)
        out = h.shift_scale_divide(r, d, 1)
        for x in range(-3, 4):
            assert out.evaluate(x) == h.evaluate(r + d * x)


def test_shift_scale_divide_non_integral():
    with pytest.raises(NonIntegralQuotient) as ei:
        X2.shift_scale_divide(0, 3, 2)
    assert ei.value.index == 2


def test_coeff_stats():
    assert X2.coeff_stats() == (1, 1)
    assert IntPoly([4, -10, 6]).coeff_stats() == (6, 20)
    assert IntPoly([0, 1, 0, -2]).coeff_stats() == (-2, 3)
    with pytest.raises(ZeroPolynomialError):
        IntPoly([]).coeff_stats()


small_polys = st.lists(st.integers(-30, 30), min_size=1, max_size=6).filter(
    lambda cs: any(cs)
)


@settings(max_examples=60, deadline=None)
@given(small_polys)
def test_identity_shift(cs):
    h = IntPoly(cs)
    assert h.shift_scale_divide(0, 1, 1) == h


@settings(max_examples=60, deadline=None)
@given(small_polys, st.integers(-8, 8), st.integers(1, 5), st.integers(-8, 8), st.integers(1, 5))
def test_composition_associative(cs, r1, d1, r2, d2):
    h = IntPoly(cs)
    nested = h.shift_scale_divide(r1, d1, 1).shift_scale_divide(r2, d2, 1)
    single = h.shift_scale_divide(r1 + d1 * r2, d1 * d2, 1)
    assert nested == single


@settings(max_examples=60, deadline=None)
@given(small_polys, st.integers(-8, 8), st.integers(1, 6))
def test_leading_coefficient_scaling(cs, r, d):
    h = IntPoly(cs)
    k = h.degree()
    b, _ = h.shift_scale_divide(r, d, 1).coeff_stats()
    assert b == h.leading() * d**k


def test_second_difference_via_taylor_shift():
    # p(x0+1) - 2 p(x0) + p(x0-1) = 2 * sum of even-index Taylor coefficients >= 2
    rng = random.Random(3)
    for _ in range(50):
        p = IntPoly([rng.randint(-20, 20) for _ in range(rng.randint(2, 6))])
        if p.is_zero():
            continue
        x0 = rng.randint(-15, 15)
        q = p.shift_scale_divide(x0, 1, 1)  # q(t) = p(x0 + t)
        lhs = p.evaluate(x0 + 1) - 2 * p.evaluate(x0) + p.evaluate(x0 - 1)
        rhs = 2 * sum(c for i, c in enumerate(q.coeffs) if i >= 2 and i % 2 == 0)
        assert lhs == rhs
