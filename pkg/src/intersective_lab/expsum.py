"""Complete exponential sums over sieved residues and weighted phase sums.

The complete sum  S(a, q) = sum_{s in [0,q) cap W^q(g;Y)} e(a g(s) / q)
exhibits square-root cancellation once the residues where g' degenerates are
sieved out; the weighted phase sum

    S(gamma) = sum_{m <= M, m in W(g;Y)} g'(m) e(g(m) gamma)

has trivial bound w(Y) * N and is the object the arc analysis normalizes.
Phases are always computed from exact integer residues mod q; floats enter
only in the final unit-circle evaluation.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np

from .arcs_fourier import TorusPoint
from .errors import NotCoprime
from .intersective import AuxFamily
from .intpoly import IntPoly
from .numutil import int_nth_root, is_squarefree, omega
from .residue_sieve import SieveProfile, expected_density


@lru_cache(maxsize=128)
def _cached_profile(coeffs: tuple[int, ...], y_floor: int) -> SieveProfile:
    return SieveProfile.build(IntPoly(coeffs), y_floor)


def profile_for(g: IntPoly, Y: Optional[float], q: int = 0) -> SieveProfile:
    """Profile for cutoff Y; Y=None is the all-primes-<=q sentinel."""
    y = math.floor(Y) if Y is not None else q
    return _cached_profile(g.coeffs, max(0, y))


@dataclass(frozen=True)
class ExpSumResult:
    value: complex
    trivial_bound: float
    ratio_sqrt: float
    ratio_weyl: float
    a: int
    q: int
    Y: Optional[float]
    admissible: int


def complete_sum(g: IntPoly, a: int, q: int, Y: Optional[float]) -> ExpSumResult:
    """Exact-phase sum of e(a g(s)/q) over s in [0, q) cap W^q(g; Y)."""
    if q < 1:
        raise ValueError("q must be >= 1")
    if math.gcd(a, q) != 1:
        raise NotCoprime(f"gcd({a}, {q}) != 1")
    prof = profile_for(g, Y, q)
    relevant = [pd for pd in prof.per_prime.values() if q % pd.modulus == 0]
    residues = []
    for s in range(q):
        if any(s % pd.modulus in pd.bad for pd in relevant):
            continue
        residues.append((a * g.evaluate_mod(s, q)) % q)
    two_pi = 2.0 * math.pi
    value = complex(
        math.fsum(math.cos(two_pi * r / q) for r in residues),
        math.fsum(math.sin(two_pi * r / q) for r in residues),
    )
    k = max(1, g.degree())
    mag = abs(value)
    return ExpSumResult(
        value=value,
        trivial_bound=float(len(residues)),
        ratio_sqrt=mag / math.sqrt(q),
        ratio_weyl=mag / q ** (1.0 - 1.0 / k),
        a=a,
        q=q,
        Y=Y,
        admissible=len(residues),
    )


@dataclass(frozen=True)
class PhaseSumSpec:
    """Weighted phase sum description; build via for_family or for_poly.

    For family-based specs M = floor((N / b_d)^(1/k)) exactly.
    """

    g: IntPoly
    N: int
    M: int
    Y: float
    gamma: TorusPoint
    weighted: bool
    fam: Optional[AuxFamily] = None
    d: Optional[int] = None

    @classmethod
    def for_family(
        cls,
        fam: AuxFamily,
        d: int,
        N: int,
        Y: float,
        gamma: TorusPoint,
        weighted: bool = True,
    ) -> "PhaseSumSpec":
        rec = fam.aux_record(d)
        M = int_nth_root(N // rec.b, fam.k)
        return cls(rec.poly, N, max(1, M), Y, gamma, weighted, fam, d)

    @classmethod
    def for_poly(
        cls, g: IntPoly, M: int, N: int, Y: float, gamma: TorusPoint, weighted: bool = False
    ) -> "PhaseSumSpec":
        return cls(g, N, M, Y, gamma, weighted)


def phase_sum(spec: PhaseSumSpec) -> complex:
    """Direct summation over m = 1..M with the W(g; Y) membership filter."""
    prof = profile_for(spec.g, spec.Y)
    dg = spec.g.derivative()
    gamma = spec.gamma
    if gamma.frac is not None:
        a, q = gamma.frac.numerator, gamma.frac.denominator
    else:
        a, q = 0, 1
    off = gamma.offset if gamma.frac is not None else gamma.value()
    reals, imags = [], []
    two_pi = 2.0 * math.pi
    for m in range(1, spec.M + 1):
        if not prof.in_W(m):
            continue
        hm = spec.g.evaluate(m)
        ph = ((hm * a) % q) / q + hm * off
        w = float(dg.evaluate(m)) if spec.weighted else 1.0
        ang = two_pi * math.fmod(ph, 1.0)
        reals.append(w * math.cos(ang))
        imags.append(w * math.sin(ang))
    return complex(math.fsum(reals), math.fsum(imags))


def normalized_S(spec: PhaseSumSpec) -> complex:
    """phase_sum / (w_d(Y) N): the trivial bound scales the sum to O(1)."""
    if not spec.weighted or spec.fam is None:
        raise ValueError("normalized_S needs a weighted, family-based spec")
    w = expected_density(profile_for(spec.g, spec.Y))
    return phase_sum(spec) / (w * spec.N)


@dataclass(frozen=True)
class ScanRow:
    q: int
    omega: int
    max_abs: float
    ratio_sqrt: float
    ratio_weyl: float
    admissible: int


def _scan_row(g: IntPoly, prof: SieveProfile, k: int, q: int) -> ScanRow:
    relevant = [pd for pd in prof.per_prime.values() if q % pd.modulus == 0]
    mask = np.ones(q, dtype=bool)
    for pd in relevant:
        for b in pd.bad:
            mask[b::pd.modulus] = False
    if q < (1 << 31):
        cs = np.array([c % q for c in g.coeffs], dtype=np.int64)
        s = np.arange(q, dtype=np.int64)
        acc = np.zeros(q, dtype=np.int64)
        for c in cs[::-1]:
            acc = (acc * s + c) % q
        res = acc
    else:
        res = np.array([g.evaluate_mod(s, q) for s in range(q)], dtype=object)
    counts = np.bincount(res[mask].astype(np.int64), minlength=q)
    if q == 1:
        m = float(counts.sum())
        return ScanRow(1, 0, m, m, m, int(mask.sum()))
    F = np.fft.fft(counts.astype(np.float64))
    mags = np.abs(F)
    coprime = np.gcd(np.arange(q), q) == 1
    coprime[0] = False
    max_abs = float(mags[coprime].max())
    return ScanRow(
        q,
        omega(q),
        max_abs,
        max_abs / math.sqrt(q),
        max_abs / q ** (1.0 - 1.0 / k),
        int(mask.sum()),
    )


def cancellation_scan(
    g: IntPoly,
    q_max: int,
    Y: Optional[float],
    squarefree_only: bool = False,
    threads: int = 1,
) -> list[ScanRow]:
    """max_a |S(a, q)| over a coprime to q, for each q <= q_max.

    Per q, the exact residues a*g(s) mod q reduce to a histogram whose DFT
    gives |S(a, q)| for every a at once (magnitudes are conjugation
    symmetric).  Rows are merged in ascending q, so the result is
    deterministic regardless of the worker count.
    """
    k = max(1, g.degree())
    prof = profile_for(g, Y, q_max)
    qs = [q for q in range(1, q_max + 1) if not squarefree_only or is_squarefree(q)]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            rows = list(ex.map(lambda q: _scan_row(g, prof, k, q), qs))
    else:
        rows = [_scan_row(g, prof, k, q) for q in qs]
    return rows


def fitted_C(rows: list[ScanRow]) -> float:
    """max over rows with omega >= 1 of (max|S|/sqrt(q))^(1/omega)."""
    vals = [r.ratio_sqrt ** (1.0 / r.omega) for r in rows if r.omega >= 1]
    return max(vals) if vals else 0.0


def dirichlet_threshold_Z(N: int) -> float:
    """Z = exp((log log N)^3), the rational-approximation quality threshold
    separating the close-approximation and generic regimes in minor-arc
    analysis.  A scan diagnostic knob only; nothing in the library gates on
    it at desk scale."""
    if N < 3:
        raise ValueError("N must be >= 3")
    return math.exp(math.log(math.log(N)) ** 3)


@dataclass(frozen=True)
class MainTermResult:
    direct: complex
    predicted: complex
    rel_error: float


def main_term_check(
    fam: AuxFamily, d: int, a: int, q: int, Y: float, N: int
) -> MainTermResult:
    """Beta = 0 instance of the main-term factorization.

    direct    = sum_{m <= M, m in W} h_d'(m) e(a h_d(m) / q)
    predicted = (w_qc / q) * S(a, q) * (h_d(M) - h_d(0)),
    where w_qc multiplies (1 - j_p/p^gamma) over p <= Y with p^gamma not
    dividing q, and h_d(M) - h_d(0) is the exact integral of h_d' over [0, M].
    The error is measured relative to the trivial bound w(Y) * N.
    """
    if math.gcd(a, q) != 1:
        raise NotCoprime(f"gcd({a}, {q}) != 1")
    rec = fam.aux_record(d)
    spec = PhaseSumSpec.for_family(fam, d, N, Y, TorusPoint.rational(a, q), weighted=True)
    direct = phase_sum(spec)
    prof = profile_for(rec.poly, Y)
    w_qc = 1.0
    for pd in prof.per_prime.values():
        if q % pd.modulus != 0:
            w_qc *= 1.0 - pd.j / pd.modulus
    cs = complete_sum(rec.poly, a, q, Y)
    integral = float(rec.poly.evaluate(spec.M) - rec.poly.evaluate(0))
    predicted = (w_qc / q) * cs.value * integral
    w_full = expected_density(prof)
    rel = abs(direct - predicted) / (w_full * N)
    return MainTermResult(direct, predicted, rel)
