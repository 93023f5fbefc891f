"""Admissible residues: where the derivative g' survives modulo prime powers.

For each prime p, gamma(g; p) is the least exponent with g' not identically
zero as a function mod p^gamma, j(g; p) counts the roots of g' at that
modulus, and

    W(g; Y)   = { n : g'(n) != 0 (mod p^gamma) for all p <= Y },
    W_q(g; Y) = same, but only primes with p^gamma | q,
    w(Y)      = prod_{p <= Y} (1 - j(g;p) / p^gamma(g;p)).

Restricting exponential sums to these residues is what restores square-root
cancellation for degree >= 3.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import ZeroDerivative
from .intpoly import IntPoly
from .numutil import primes_up_to

WHEEL_CAP = 10**8


def _vanishes_identically(f: IntPoly, m: int) -> bool:
    """Does f(n) = 0 (mod m) for every integer n?

    Exact via Newton's forward differences: f vanishes on Z mod m iff
    m | Delta^i f(0) for i = 0..deg f.  (Coefficient vanishing would be
    wrong: x^p - x kills every residue mod p with nonzero coefficients.)
    """
    vals = [f.evaluate(i) % m for i in range(f.degree() + 1)]
    for _ in range(len(vals)):
        if vals[0] % m:
            return False
        vals = [(b - a) % m for a, b in zip(vals, vals[1:])]
    return True


def gamma_exponent(g: IntPoly, p: int) -> int:
    """Least gamma >= 1 with g' not identically zero mod p^gamma."""
    dg = g.derivative()
    if dg.is_zero():
        raise ZeroDerivative("g is constant")
    gamma = 1
    while _vanishes_identically(dg, p**gamma):
        gamma += 1
    return gamma


def _bad_residues(dg: IntPoly, m: int) -> tuple[int, ...]:
    if m < (1 << 31):
        cs = np.array([c % m for c in dg.coeffs], dtype=np.int64)
        s = np.arange(m, dtype=np.int64)
        acc = np.zeros(m, dtype=np.int64)
        for c in cs[::-1]:
            acc = (acc * s + c) % m
        return tuple(int(r) for r in np.nonzero(acc == 0)[0])
    return tuple(s for s in range(m) if dg.evaluate_mod(s, m) == 0)


def root_count(g: IntPoly, p: int) -> tuple[int, tuple[int, ...]]:
    """(j, bad): count and sorted residues s mod p^gamma with g'(s) = 0."""
    m = p ** gamma_exponent(g, p)
    bad = _bad_residues(g.derivative(), m)
    return len(bad), bad


@dataclass(frozen=True)
class PrimeData:
    gamma: int
    modulus: int  # p^gamma
    j: int
    bad: frozenset[int]


@dataclass(frozen=True)
class SieveProfile:
    """Per-prime data for all p <= Y, plus membership machinery."""

    g: IntPoly
    Y: float
    per_prime: dict[int, PrimeData]

    @classmethod
    def build(cls, g: IntPoly, Y: float) -> "SieveProfile":
        dg = g.derivative()
        data = {}
        for p in primes_up_to(Y):
            gamma = gamma_exponent(g, p)
            m = p**gamma
            bad = _bad_residues(dg, m)
            data[p] = PrimeData(gamma, m, len(bad), frozenset(bad))
        return cls(g, Y, data)

    def in_W(self, n: int) -> bool:
        for pd in self.per_prime.values():
            if n % pd.modulus in pd.bad:
                return False
        return True

    def in_Wq(self, q: int, n: int) -> bool:
        for pd in self.per_prime.values():
            if q % pd.modulus == 0 and n % pd.modulus in pd.bad:
                return False
        return True

    def period(self) -> int:
        """L = prod p^gamma; in_W is L-periodic."""
        L = 1
        for pd in self.per_prime.values():
            L *= pd.modulus
        return L


def in_W(profile: SieveProfile, n: int) -> bool:
    return profile.in_W(n)


def in_Wq(profile: SieveProfile, q: int, n: int) -> bool:
    return profile.in_Wq(q, n)


def expected_density(profile: SieveProfile, exact: bool = False):
    """w(Y) = prod (1 - j_p / p^gamma_p), as float or exact Fraction."""
    w = Fraction(1)
    for pd in profile.per_prime.values():
        w *= Fraction(pd.modulus - pd.j, pd.modulus)
    return w if exact else float(w)


@dataclass(frozen=True)
class SieveCount:
    count: int
    main_term: float
    rel_error: float
    method: str
    period: int


def sieve_count(profile: SieveProfile, X: int, method: str = "auto") -> SieveCount:
    """Exact |[1, X] cap W(g; Y)| with the main term X * w(Y).

    Methods:
      wheel -- admissibility per residue class over one full period L
               (needs L <= min(X, 1e8)); full periods times X // L plus the
               boundary segment.
      mark  -- boolean segment over [1, X], bad residues struck per prime
               (the per-prime filtering used when L is out of reach).
      loop  -- literal per-n membership loop; slow oracle path.
    """
    Y = profile.Y
    if Y > math.e and math.log(X) < math.log(Y) * math.log(math.log(Y)):
        warnings.warn(
            f"X={X} is small for Y={Y}: log X < log Y log log Y; "
            "the main-term approximation may be poor",
            stacklevel=2,
        )
    L = profile.period()
    if method == "auto":
        method = "wheel" if L <= min(X, WHEEL_CAP) else "mark"
    if method == "wheel":
        if L > min(X, WHEEL_CAP):
            raise ValueError(f"wheel needs period L={L} <= min(X, {WHEEL_CAP})")
        adm = np.ones(L, dtype=bool)
        for pd in profile.per_prime.values():
            for b in pd.bad:
                adm[b::pd.modulus] = False
        full, rem = divmod(X, L)
        count = full * int(adm.sum()) + int(adm[1 : rem + 1].sum())
    elif method == "mark":
        adm = np.ones(X, dtype=bool)  # index i <-> n = i + 1
        for pd in profile.per_prime.values():
            m = pd.modulus
            for b in pd.bad:
                start = b if b >= 1 else m
                adm[start - 1 :: m] = False
        count = int(adm.sum())
    elif method == "loop":
        count = sum(1 for n in range(1, X + 1) if profile.in_W(n))
    else:
        raise ValueError(f"unknown method {method!r}")
    main = X * expected_density(profile)
    rel = abs(count - main) / main if main > 0 else math.inf
    return SieveCount(count, main, rel, method, L)
