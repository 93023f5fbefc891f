import cmath
import math
import random

import pytest

from intersective_lab.arcs_fourier import TorusPoint
from intersective_lab.errors import NotCoprime
from intersective_lab.expsum import (
    PhaseSumSpec,
    cancellation_scan,
    complete_sum,
    fitted_C,
    main_term_check,
    normalized_S,
    phase_sum,
)
from intersective_lab.intersective import AuxFamily
from intersective_lab.intpoly import IntPoly
from intersective_lab.numutil import _egcd

X2 = IntPoly([0, 0, 1])
X3 = IntPoly([0, 0, 0, 1])
X3PX = IntPoly([0, 1, 0, 1])


def naive_full_sum(g, a, q):
    return sum(cmath.exp(2j * math.pi * ((a * g.evaluate(s)) % q) / q) for s in range(q))


def test_complete_sum_examples():
    r = complete_sum(X2, 1, 3, 1)
    assert cmath.isclose(r.value, 1j * math.sqrt(3), abs_tol=1e-12)
    assert abs(abs(r.value) - math.sqrt(3)) < 1e-12
    assert complete_sum(X3, 1, 1, 1).value == 1
    r5 = complete_sum(X2, 1, 5, 1)
    assert abs(abs(r5.value) - math.sqrt(5)) < 1e-12


def test_complete_sum_not_coprime():
    with pytest.raises(NotCoprime):
        complete_sum(X2, 2, 4, 1)


def test_trivial_bound_invariant():
    rng = random.Random(15)
    for _ in range(60):
        g = IntPoly([rng.randint(-9, 9) for _ in range(rng.randint(2, 5))])
        if g.degree() < 1:
            continue
        q = rng.randint(1, 60)
        a = rng.choice([a for a in range(1, q + 1) if math.gcd(a, q) == 1])
        r = complete_sum(g, a, q, rng.choice([1, 5, None]))
        assert abs(r.value) <= r.trivial_bound + 1e-6


def test_conjugation_symmetry():
    rng = random.Random(16)
    for _ in range(40):
        q = rng.randint(2, 80)
        a = rng.choice([a for a in range(1, q) if math.gcd(a, q) == 1])
        g = IntPoly([rng.randint(-5, 5) for _ in range(4)] + [1])
        r1 = complete_sum(g, a, q, None)
        r2 = complete_sum(g, q - a, q, None)
        assert cmath.isclose(r2.value, r1.value.conjugate(), abs_tol=1e-9)


def test_crt_multiplicativity_full_sums():
    rng = random.Random(17)
    pairs = [(3, 4), (5, 7), (8, 9), (11, 13), (16, 25), (27, 32), (49, 81)]
    for q1, q2 in pairs:
        q = q1 * q2
        a = rng.choice([a for a in range(1, q) if math.gcd(a, q) == 1])
        g = IntPoly([rng.randint(-4, 4), rng.randint(-4, 4), rng.randint(1, 4)])
        _, q2_inv, _ = _egcd(q2 % q1, q1)
        _, q1_inv, _ = _egcd(q1 % q2, q2)
        left = complete_sum(g, a, q, 1).value
        right = (
            complete_sum(g, (a * q2_inv) % q1 if q1 > 1 else 1, q1, 1).value
            * complete_sum(g, (a * q1_inv) % q2 if q2 > 1 else 1, q2, 1).value
        )
        assert cmath.isclose(left, right, abs_tol=1e-8)


def test_phase_exactness_invariance():
    # adding q x^j to g cannot change the sum: phases are exact residues
    rng = random.Random(18)
    for _ in range(30):
        q = rng.randint(2, 50)
        a = rng.choice([a for a in range(1, q) if math.gcd(a, q) == 1])
        g = IntPoly([rng.randint(-9, 9) for _ in range(4)] + [1])
        j = rng.randint(0, 4)
        shifted = IntPoly(
            [c + (q if i == j else 0) for i, c in enumerate(g.coeffs)]
        )
        assert complete_sum(g, a, q, None).value == complete_sum(shifted, a, q, None).value


def test_phase_sum_examples():
    spec = PhaseSumSpec.for_poly(X2, 4, 16, 1, TorusPoint.rational(0, 1))
    assert cmath.isclose(phase_sum(spec), 4.0)
    spec = PhaseSumSpec.for_poly(X2, 3, 9, 1, TorusPoint.rational(1, 2))
    assert cmath.isclose(phase_sum(spec), -1.0, abs_tol=1e-12)
    spec = PhaseSumSpec.for_poly(X2, 3, 9, 1, TorusPoint.rational(1, 4), weighted=True)
    assert cmath.isclose(phase_sum(spec), 4 + 8j, abs_tol=1e-12)


def test_phase_sum_trivial_bound():
    fam = AuxFamily(X2, bound=50)
    rng = random.Random(19)
    for _ in range(20):
        gamma = TorusPoint(None, rng.random())
        spec = PhaseSumSpec.for_family(fam, 1, 10_000, 5, gamma, weighted=True)
        from intersective_lab.expsum import profile_for
        prof = profile_for(spec.g, 5)
        dg = spec.g.derivative()
        bound = sum(abs(dg.evaluate(m)) for m in range(1, spec.M + 1) if prof.in_W(m))
        assert abs(phase_sum(spec)) <= bound + 1e-6
    at_zero = phase_sum(PhaseSumSpec.for_family(fam, 1, 10_000, 5, TorusPoint.rational(0, 1), weighted=True))
    prof = profile_for(fam.aux_poly(1), 5)
    exact = sum(2 * m for m in range(1, 101) if prof.in_W(m))
    assert cmath.isclose(at_zero, exact)


def test_normalized_S_near_one_at_zero():
    fam = AuxFamily(X2, bound=50)
    M = 1000
    spec = PhaseSumSpec.for_family(fam, 1, M * M, 1, TorusPoint.rational(0, 1), weighted=True)
    val = normalized_S(spec)
    assert abs(val.imag) < 1e-9
    assert abs(val.real - 1.0) <= 2.0 / M + 1e-9


def test_normalized_S_requires_family():
    spec = PhaseSumSpec.for_poly(X2, 10, 100, 1, TorusPoint.rational(0, 1))
    with pytest.raises(ValueError):
        normalized_S(spec)


def test_normalized_S_minor_below_major_peak():
    # |S(gamma)| on a minor-arc point sits below the gamma = 0 major peak
    fam = AuxFamily(X2, bound=50)
    N = 10**6
    major = abs(
        normalized_S(
            PhaseSumSpec.for_family(fam, 1, N, 3, TorusPoint.rational(0, 1), weighted=True)
        )
    )
    rng = random.Random(27)
    for _ in range(10):
        gamma = TorusPoint(None, rng.uniform(0.05, 0.95))
        minor = abs(
            normalized_S(PhaseSumSpec.for_family(fam, 1, N, 3, gamma, weighted=True))
        )
        assert minor < major


def test_unsieved_scan_gauss_bound():
    # full quadratic sums: |S| = sqrt(q) for odd q, sqrt(2q) if 4 | q, 0 if q = 2 mod 4
    rows = cancellation_scan(X2, 100, 1)
    for r in rows:
        assert r.ratio_sqrt <= math.sqrt(2) + 1e-9
        if r.q % 2 == 1 and r.q > 1:
            assert abs(r.ratio_sqrt - 1.0) < 1e-9
        elif r.q % 4 == 2:
            assert r.max_abs < 1e-9
    assert rows[0].q == 1 and rows[0].max_abs == 1.0


def test_scan_row_matches_complete_sum():
    rows = cancellation_scan(X3, 30, None)
    for row in rows:
        if row.q < 2:
            continue
        best = max(
            abs(complete_sum(X3, a, row.q, None).value)
            for a in range(1, row.q)
            if math.gcd(a, row.q) == 1
        )
        assert abs(best - row.max_abs) < 1e-8


def test_scan_threads_deterministic():
    r1 = cancellation_scan(X3, 60, 60, squarefree_only=True, threads=1)
    r8 = cancellation_scan(X3, 60, 60, squarefree_only=True, threads=8)
    assert r1 == r8
    assert fitted_C(r1) == fitted_C(r8)


def test_main_term_closed_form_case():
    fam = AuxFamily(X2, bound=50)
    res = main_term_check(fam, 1, 1, 1, 1, 10**6)
    M = 1000
    assert abs(res.direct - M * (M + 1)) < 1e-6
    assert abs(res.predicted - M * M) < 1e-6
    assert abs(res.rel_error - M / 10**6) < 1e-9


def test_main_term_examples():
    fam = AuxFamily(X2, bound=50)
    assert main_term_check(fam, 1, 1, 4, 3, 10**6).rel_error < 0.1
    fam2 = AuxFamily(X3PX, bound=50)
    assert main_term_check(fam2, 1, 2, 5, 5, 10**6).rel_error < 0.1


def test_main_term_not_coprime():
    fam = AuxFamily(X2, bound=50)
    with pytest.raises(NotCoprime):
        main_term_check(fam, 1, 2, 4, 3, 10**4)


def test_dirichlet_threshold_diagnostic():
    from intersective_lab.expsum import dirichlet_threshold_Z

    z = dirichlet_threshold_Z(10**6)
    assert math.isclose(math.log(z), math.log(math.log(10**6)) ** 3)
    assert dirichlet_threshold_Z(10**7) > z
