"""Torus points, Farey major/minor arcs, and Fourier mass of finite sets.

The major arc M_{a,q}(N, K) is the torus neighborhood ||gamma - a/q|| <= K/N;
the major arcs M(N, K, Q) take the union over reduced a/q with q <= Q, and
the minor arcs are the complement.  For A inside [1, N] with density sigma,
g = 1_A - sigma 1_[N] carries the balanced Fourier mass; by Parseval its
total L^2 mass is |A| (1 - sigma).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional

import numpy as np

from .errors import SetOutOfRange


@dataclass(frozen=True)
class TorusPoint:
    """Point of R/Z: an exact reduced rational plus a float offset.

    frac is None for float-only points, in which case offset holds the whole
    value.  Keeping the rational part exact makes evaluation at arc centers
    drift-free.
    """

    frac: Optional[Fraction]
    offset: float = 0.0

    @classmethod
    def rational(cls, a: int, q: int, offset: float = 0.0) -> "TorusPoint":
        if q < 1:
            raise ValueError("denominator must be >= 1")
        return cls(Fraction(a % q, q), offset)

    @classmethod
    def from_float(cls, x: float) -> "TorusPoint":
        return cls(None, x - math.floor(x))

    def value(self) -> float:
        v = (float(self.frac) if self.frac is not None else 0.0) + self.offset
        return v - math.floor(v)

    def exact(self) -> Fraction:
        """Exact value in [0, 1); float offsets are binary rationals, so exact."""
        v = (self.frac if self.frac is not None else Fraction(0)) + Fraction(self.offset)
        return v - math.floor(v)

    def norm(self) -> float:
        """||gamma||: distance to the nearest integer."""
        v = self.value()
        return min(v, 1.0 - v)

    def is_rational(self) -> bool:
        return self.frac is not None and self.offset == 0.0


@dataclass(frozen=True)
class ArcSpec:
    N: int
    K: float
    Q: float

    def __post_init__(self):
        if self.N < 1 or self.K < 1 or self.Q < 1:
            raise ValueError("ArcSpec needs N >= 1, K >= 1, Q >= 1")


def classify(gamma: TorusPoint, spec: ArcSpec) -> Optional[tuple[int, int]]:
    """(a, q) of the major arc containing gamma, or None on the minor arcs.

    Returns the reduced fraction of *smallest denominator* within K/N (ties
    cannot occur on a closed interval of positive length), found by
    Stern-Brocot descent on exact rationals; gamma = 0 classifies as (1, 1).
    """
    t = Fraction(spec.K) / spec.N
    v = gamma.exact()
    if min(v, 1 - v) <= t:
        return (1, 1)
    f = _simplest_in_interval(v - t, v + t)
    if f.denominator <= spec.Q:
        return (f.numerator, f.denominator)
    return None


def _simplest_in_interval(lo: Fraction, hi: Fraction) -> Fraction:
    """Smallest-denominator fraction in the closed interval [lo, hi], 0 <= lo <= hi."""
    n = math.ceil(lo)
    if n <= hi:
        return Fraction(n)
    f = math.floor(lo)
    return f + 1 / _simplest_in_interval(1 / (hi - f), 1 / (lo - f))


def arc_list(spec: ArcSpec) -> list[tuple[int, int]]:
    """All reduced (a, q) with 1 <= a <= q <= Q; (1, 1) stands for the 0 arc."""
    Q = math.floor(spec.Q)
    out = [(1, 1)]
    for q in range(2, Q + 1):
        out.extend((a, q) for a in range(1, q) if math.gcd(a, q) == 1)
    return out


def _csum(reals: Iterable[float], imags: Iterable[float]) -> complex:
    return complex(math.fsum(reals), math.fsum(imags))


def fourier_set(A: Iterable[int], gamma: TorusPoint) -> complex:
    """1_A-hat(gamma) = sum_{n in A} e(n gamma), compensated summation.

    Phases for the rational part come from exact residues n*a mod q.
    """
    elems = list(A)
    if gamma.frac is not None:
        a, q = gamma.frac.numerator, gamma.frac.denominator
        off = gamma.offset
        phases = [((n * a) % q) / q + n * off for n in elems]
    else:
        phases = [n * gamma.offset for n in elems]
    two_pi = 2.0 * math.pi
    return _csum(
        (math.cos(two_pi * ph) for ph in phases),
        (math.sin(two_pi * ph) for ph in phases),
    )


def interval_transform(N: int, gamma: TorusPoint) -> complex:
    """sum_{n=1}^{N} e(n gamma) in closed form (geometric / Dirichlet kernel)."""
    v = gamma.value()
    if v == 0.0:
        return complex(N)
    s = math.sin(math.pi * v)
    ratio = math.sin(math.pi * N * v) / s
    return cmath.exp(1j * math.pi * (N + 1) * v) * ratio


def g_hat(A: Iterable[int], N: int, gamma: TorusPoint) -> complex:
    """Fourier transform of g = 1_A - sigma 1_[N] at gamma."""
    elems = sorted(set(A))
    if elems and (elems[0] < 1 or elems[-1] > N):
        raise SetOutOfRange(f"A must lie in [1, {N}]")
    sigma = len(elems) / N
    return fourier_set(elems, gamma) - sigma * interval_transform(N, gamma)


def _g_hat_grid(A: np.ndarray, N: int, nodes: np.ndarray) -> np.ndarray:
    """|g-hat| at an array of float torus points (vectorized, node-chunked)."""
    phase = np.empty(nodes.size, dtype=np.complex128)
    chunk = max(1, (1 << 22) // max(1, A.size))
    for lo in range(0, nodes.size, chunk):
        blk = nodes[lo : lo + chunk]
        phase[lo : lo + blk.size] = np.exp(2j * np.pi * np.outer(blk, A)).sum(axis=1)
    v = np.mod(nodes, 1.0)
    s = np.sin(np.pi * v)
    safe = np.where(s == 0.0, 1.0, s)
    ratio = np.sin(np.pi * N * v) / safe
    interval = np.exp(1j * np.pi * (N + 1) * v) * ratio
    interval = np.where(v == 0.0, complex(N), interval)
    sigma = len(A) / N
    return np.abs(phase - sigma * interval)


def arc_l2_mass(
    A: Iterable[int], N: int, a: int, q: int, K: float, oversample: int = 32
) -> float:
    """Trapezoid quadrature of |g-hat|^2 over [a/q - K/N, a/q + K/N].

    oversample * ceil(2K) + 1 uniform nodes; g-hat is a trigonometric
    polynomial of degree <= N, so node spacing <= 1/(oversample*N) controls
    the error.
    """
    if math.gcd(a, q) != 1:
        raise ValueError("a/q must be reduced")
    elems = np.array(sorted(set(A)), dtype=np.int64)
    if elems.size and (elems[0] < 1 or elems[-1] > N):
        raise SetOutOfRange(f"A must lie in [1, {N}]")
    n_nodes = oversample * math.ceil(2 * K) + 1
    c = a / q
    nodes = np.linspace(c - K / N, c + K / N, n_nodes)
    vals = _g_hat_grid(elems, N, nodes) ** 2
    step = (nodes[-1] - nodes[0]) / (n_nodes - 1)
    return float((vals.sum() - 0.5 * (vals[0] + vals[-1])) * step)


def circle_l2_mass(A: Iterable[int], N: int, oversample: int = 32) -> float:
    """Whole-circle quadrature of |g-hat|^2 on a uniform oversample*N grid.

    The periodic rectangle rule on G = oversample*N >= N+1 nodes integrates
    the degree-<=N trigonometric polynomial |g-hat|^2 exactly, recovering
    Parseval's |A|(1 - sigma) up to roundoff; evaluated with one FFT.
    """
    elems = np.array(sorted(set(A)), dtype=np.int64)
    if elems.size and (elems[0] < 1 or elems[-1] > N):
        raise SetOutOfRange(f"A must lie in [1, {N}]")
    G = oversample * N
    x = np.zeros(G, dtype=np.float64)
    np.add.at(x, elems % G, 1.0)
    sigma = elems.size / N
    np.add.at(x, np.arange(1, N + 1) % G, -sigma)
    F = np.fft.fft(x)
    return float(np.mean(np.abs(F) ** 2))


def parseval_total(A: Iterable[int], N: int) -> float:
    """Exact Parseval value |A| (1 - sigma) for g = 1_A - sigma 1_[N]."""
    size = len(set(A))
    return size * (1 - size / N)
