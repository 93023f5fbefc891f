"""Additive energy of frequency sets on the torus, counted exactly.

E_{2m}(S; delta) counts ordered 2m-tuples whose alternating m-vs-m sum has
torus norm at most delta.  For rational frequencies the count is exact
integer arithmetic (delta = 0 equality on a common denominator; rational
delta by exact comparison); float frequencies fall back to float windows.
The histogram of m-fold sums turns the 2m-fold loop into a
meet-in-the-middle pairing.
"""

from __future__ import annotations

import math
from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

from .arcs_fourier import TorusPoint, fourier_set
from .errors import PreconditionViolated, TooLarge

WORK_GUARD = 10**9

Freq = Union[TorusPoint, Fraction, int, float]


def _as_torus(x: Freq) -> TorusPoint:
    if isinstance(x, TorusPoint):
        return x
    if isinstance(x, (Fraction, int)):
        f = Fraction(x)
        return TorusPoint.rational(f.numerator % f.denominator, f.denominator)
    return TorusPoint.from_float(x)


@dataclass(frozen=True)
class FreqSet:
    """Distinct torus frequencies with the tuple order m and tolerance delta."""

    elems: tuple[TorusPoint, ...]
    m: int
    delta: Union[Fraction, float]

    @classmethod
    def build(cls, elems: Iterable[Freq], m: int, delta: Union[Fraction, float] = 0) -> "FreqSet":
        pts = tuple(_as_torus(x) for x in elems)
        if len({p.exact() for p in pts}) != len(pts):
            raise ValueError("frequencies must be distinct as torus points")
        if m < 1:
            raise ValueError("m must be >= 1")
        if delta < 0:
            raise ValueError("delta must be >= 0")
        return cls(pts, m, delta)

    def rational_values(self) -> list[Fraction] | None:
        if all(p.is_rational() for p in self.elems):
            return [p.exact() for p in self.elems]
        return None


def _fold_sums(values: Sequence, m: int) -> dict:
    """Histogram of m-fold sums mod 1 over ordered tuples."""
    hist = {values[0] * 0: 1}
    for _ in range(m):
        new: dict = {}
        for v, c in hist.items():
            for x in values:
                key = (v + x) % 1
                new[key] = new.get(key, 0) + c
        hist = new
    return hist


def _window_pair_count(hist: dict, delta) -> int:
    """sum over (u, v) pairs with ||u - v|| <= delta of hist[u] * hist[v]."""
    keys = sorted(hist)
    counts = [hist[k] for k in keys]
    prefix = [0]
    for c in counts:
        prefix.append(prefix[-1] + c)
    total = prefix[-1]

    def count_in(lo, hi) -> int:  # closed [lo, hi] within one period
        return prefix[bisect_right(keys, hi)] - prefix[bisect_left(keys, lo)]

    if delta * 2 >= 1:
        return total * total
    out = 0
    for u, cu in zip(keys, counts):
        lo, hi = u - delta, u + delta
        if lo < 0:
            inside = count_in(0, hi) + count_in(lo + 1, keys[-1] if keys else 0)
        elif hi >= 1:
            inside = count_in(lo, keys[-1]) + count_in(0, hi - 1)
        else:
            inside = count_in(lo, hi)
        out += cu * inside
    return out


def additive_energy(fs: FreqSet) -> int:
    """E_{2m}(S; delta), exact for rational S.

    Meet in the middle: histogram the m-fold sums once, then pair the two
    halves; the condition b_1+..+b_m - b_{m+1}-..-b_{2m} = 0 (mod 1, up to
    delta) becomes a window count between equal histograms.
    """
    n = len(fs.elems)
    if n == 0:
        return 0
    if n ** (2 * fs.m) > WORK_GUARD:
        raise TooLarge(f"|S|^(2m) = {n ** (2 * fs.m)} exceeds the {WORK_GUARD} guard")
    vals = fs.rational_values()
    if vals is None:
        vals = [p.value() for p in fs.elems]
        hist = _fold_sums(vals, fs.m)
        return _window_pair_count(hist, float(fs.delta))
    hist = _fold_sums(vals, fs.m)
    if fs.delta == 0:
        return sum(c * c for c in hist.values())
    return _window_pair_count(hist, fs.delta)


def _arc_cover_length(vals: list[Fraction]) -> Fraction:
    """Length of the shortest closed arc containing all points (exact)."""
    if len(vals) <= 1:
        return Fraction(0)
    pts = sorted(vals)
    gaps = [b - a for a, b in zip(pts, pts[1:])]
    gaps.append(1 - pts[-1] + pts[0])
    return 1 - max(gaps)


def newbm_check(
    T: FreqSet, Q: float, n: int, m: int | None = None
) -> tuple[int, float]:
    """(E_{2m}(T; 0), (Qn)^m): the rational-energy bound's two sides.

    Preconditions checked exactly: rational frequencies with denominator <=
    Q, at most n per denominator, all inside an arc of length 1/(8m).  The
    polylog factor is the caller's to fit as lhs / (Qn)^m.
    """
    m = T.m if m is None else m
    if m < 2:
        raise PreconditionViolated("m must be >= 2")
    vals = T.rational_values()
    if vals is None:
        raise PreconditionViolated("frequencies must be exact rationals")
    per_den: dict[int, int] = {}
    for v in vals:
        if v.denominator > Q:
            raise PreconditionViolated(f"denominator {v.denominator} exceeds Q={Q}")
        per_den[v.denominator] = per_den.get(v.denominator, 0) + 1
    worst = max(per_den.values(), default=0)
    if worst > n:
        raise PreconditionViolated(f"{worst} frequencies share a denominator; n={n}")
    if _arc_cover_length(vals) > Fraction(1, 8 * m):
        raise PreconditionViolated(f"frequencies not inside an arc of length 1/(8m)=1/{8*m}")
    lhs = additive_energy(FreqSet.build(T.elems, m, 0))
    return lhs, float((Q * n) ** m)


@dataclass(frozen=True)
class ChCheck:
    lhs: float
    rhs: float
    ratio: float


def ch_check(A: Iterable[int], N: int, S: FreqSet) -> ChCheck:
    """Large-values inequality, measured:

    lhs = sum_{gamma in S} |1_A-hat(gamma)|,
    rhs = |A| sigma^(-1/2m) E_{2m}(S; 1/2N)^(1/2m).
    """
    elems = sorted(set(A))
    if not elems:
        raise ValueError("A must be nonempty")
    sigma = len(elems) / N
    lhs = math.fsum(abs(fourier_set(elems, g)) for g in S.elems)
    E = additive_energy(FreqSet.build(S.elems, S.m, Fraction(1, 2 * N)))
    rhs = len(elems) * sigma ** (-1.0 / (2 * S.m)) * E ** (1.0 / (2 * S.m))
    ratio = lhs / rhs
    return ChCheck(lhs, rhs, ratio)
