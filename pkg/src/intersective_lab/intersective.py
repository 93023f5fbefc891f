"""Intersectivity testing and the auxiliary polynomial family h_d.

A polynomial h is intersective when h(n) = 0 (mod q) is solvable for every
q, equivalently when h has a p-adic integer zero z_p for every prime p.
Fixing one z_p per prime (with multiplicity m_p) yields

    lambda(d) = prod p^(alpha * m_p)  over p^alpha || d   (completely multiplicative),
    r_d       = the unique integer in (-d, 0] with r_d = z_p (mod p^alpha),
    h_d(x)    = h(r_d + d x) / lambda(d),

which has integer coefficients and satisfies the nesting
lambda(q) h_{dq}(N) subset h_d(N).  Everything here is exact integer /
rational arithmetic; p-adic roots are decided by squarefree decomposition
plus branch lifting to a resultant-bounded resolution depth, at which point
strong Hensel lifting certifies each surviving residue.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import (
    LiftAmbiguous,
    NestingViolation,
    NotIntersectiveError,
    PrimeOutOfRange,
)
from .intpoly import IntPoly
from .numutil import crt, factorize, padic_valuation, primes_up_to


@dataclass(frozen=True)
class PAdicRootData:
    """Truncation of a chosen Z_p zero of h: h(residue) = 0 (mod p^prec)."""

    p: int
    residue: int
    prec: int
    multiplicity: int


@dataclass(frozen=True)
class NotIntersective:
    """Witness modulus q with h(n) mod q != 0 for all n."""

    witness_q: int


@dataclass(frozen=True)
class IntersectiveUpTo:
    """p-adic solvability certified for all p <= bound.

    bound is None when an integer root certifies intersectivity outright.
    """

    bound: int | None
    roots: dict[int, PAdicRootData]
    integer_root: int | None = None


IntersectivityVerdict = NotIntersective | IntersectiveUpTo


# ----------------------------------------------------------------------
# Rational-coefficient helpers (gcd, Yun squarefree split, resultant)
# ----------------------------------------------------------------------

def _q_divmod(num: list[Fraction], den: list[Fraction]):
    num = num[:]
    q = [Fraction(0)] * max(0, len(num) - len(den) + 1)
    while len(num) >= len(den) and any(num):
        while num and num[-1] == 0:
            num.pop()
        if len(num) < len(den):
            break
        c = num[-1] / den[-1]
        shift = len(num) - len(den)
        q[shift] = c
        for i, dc in enumerate(den):
            num[shift + i] -= c * dc
        num.pop()
    while num and num[-1] == 0:
        num.pop()
    while q and q[-1] == 0:
        q.pop()
    return q, num


def _strip(a: list[Fraction]) -> list[Fraction]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _q_gcd(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    a, b = _strip(a[:]), _strip(b[:])
    while b:
        _, r = _q_divmod(a, b)
        a, b = b, r
    if a:
        lead = a[-1]
        a = [c / lead for c in a]
    return a


def _q_deriv(a: list[Fraction]) -> list[Fraction]:
    return [i * c for i, c in enumerate(a)][1:]


def _primitive(fracs: list[Fraction]) -> IntPoly:
    """Clear denominators and contents; normalize to positive leading coeff."""
    den = math.lcm(*[f.denominator for f in fracs])
    ints = [int(f * den) for f in fracs]
    g = math.gcd(*[abs(c) for c in ints])
    ints = [c // g for c in ints]
    if ints[-1] < 0:
        ints = [-c for c in ints]
    return IntPoly(ints)


@lru_cache(maxsize=256)
def _squarefree_decomposition(coeffs: tuple[int, ...]) -> tuple[tuple[IntPoly, int], ...]:
    """Yun's algorithm: factors (g_i, i) with h = unit * prod g_i^i.

    Each g_i is primitive, squarefree, with positive leading coefficient;
    degree-0 parts are dropped (they carry no roots).
    """
    h = [Fraction(c) for c in coeffs]
    if len(h) <= 1:
        return ()
    out = []
    g = _q_gcd(h, _q_deriv(h))
    if len(g) == 1:
        return ((_primitive(h), 1),)
    w, _ = _q_divmod(h, g)
    y, _ = _q_divmod(_q_deriv(h), g)
    z = _strip([yc - wc for yc, wc in _pairwise(y, _q_deriv(w))])
    i = 1
    while len(w) > 1:
        gi = _q_gcd(w, z)
        if len(gi) > 1:
            out.append((_primitive(gi), i))
        w, _ = _q_divmod(w, gi)
        y, _ = _q_divmod(z, gi)
        z = _strip([yc - wc for yc, wc in _pairwise(y, _q_deriv(w))])
        i += 1
    return tuple(out)


def _pairwise(a: list[Fraction], b: list[Fraction]):
    n = max(len(a), len(b))
    a = a + [Fraction(0)] * (n - len(a))
    b = b + [Fraction(0)] * (n - len(b))
    return zip(a, b)


def resultant(f: IntPoly, g: IntPoly) -> int:
    """Res(f, g) via fraction-free (Bareiss) elimination of the Sylvester matrix."""
    m, n = f.degree(), g.degree()
    if m < 0 or n < 0:
        return 0
    if m == 0:
        return f.coeffs[0] ** n
    if n == 0:
        return g.coeffs[0] ** m
    size = m + n
    mat = [[0] * size for _ in range(size)]
    fc = list(reversed(f.coeffs))
    gc = list(reversed(g.coeffs))
    for i in range(n):
        mat[i][i : i + m + 1] = fc
    for i in range(m):
        mat[n + i][i : i + n + 1] = gc
    sign = 1
    prev = 1
    for k in range(size - 1):
        if mat[k][k] == 0:
            for r in range(k + 1, size):
                if mat[r][k]:
                    mat[k], mat[r] = mat[r], mat[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, size):
            for j in range(k + 1, size):
                mat[i][j] = (mat[i][j] * mat[k][k] - mat[i][k] * mat[k][j]) // prev
            mat[i][k] = 0
        prev = mat[k][k]
    return sign * mat[size - 1][size - 1]


# ----------------------------------------------------------------------
# Root enumeration modulo prime powers
# ----------------------------------------------------------------------

def _roots_mod_p(g: IntPoly, p: int) -> list[int]:
    if p < (1 << 15):
        cs = np.array([c % p for c in g.coeffs], dtype=np.int64)
        s = np.arange(p, dtype=np.int64)
        acc = np.zeros(p, dtype=np.int64)
        for c in cs[::-1]:
            acc = (acc * s + c) % p
        return [int(r) for r in np.nonzero(acc == 0)[0]]
    return [s for s in range(p) if g.evaluate_mod(s, p) == 0]


def _lift_level(g: IntPoly, p: int, roots: list[int], j: int) -> list[int]:
    """Roots of g mod p^j from the roots mod p^(j-1)."""
    pj = p**j
    pj1 = p ** (j - 1)
    out = []
    for r in roots:
        for t in range(p):
            c = r + t * pj1
            if g.evaluate_mod(c, pj) == 0:
                out.append(c)
    return out


def _all_roots_mod(g: IntPoly, p: int, e: int) -> list[int]:
    """Every residue r in [0, p^e) with g(r) = 0 (mod p^e), by branch lifting."""
    roots = _roots_mod_p(g, p)
    for j in range(2, e + 1):
        if not roots:
            return []
        roots = _lift_level(g, p, roots, j)
    return sorted(roots)


def hensel_roots(h: IntPoly, p: int, prec: int) -> list[PAdicRootData]:
    """Truncations mod p^prec of the Z_p zeros of h, with multiplicities.

    Works factor by factor on the Yun squarefree decomposition: a squarefree
    factor g with V = v_p(Res(g, g')) is lifted to depth
    E = max(prec + V, 2V + 1); at that depth every surviving residue r has
    v_p(g'(r)) <= V, so strong Hensel gives a unique Z_p zero congruent to r
    mod p^(E - v), and E - v >= prec makes the truncation well defined.
    Residues that merge at the requested precision are reported once with the
    largest multiplicity.
    """
    if h.is_zero():
        raise ValueError("hensel_roots needs a nonzero polynomial")
    if prec < 1:
        raise ValueError("prec must be >= 1")
    found: dict[int, int] = {}
    for g, mult in _squarefree_decomposition(h.coeffs):
        res = resultant(g, g.derivative())
        if res == 0:
            raise LiftAmbiguous(f"squarefree factor with zero discriminant: {g}")
        V = padic_valuation(res, p) if res % p == 0 else 0
        E = max(prec + V, 2 * V + 1)
        dg = g.derivative()
        pE = p**E
        for r in _all_roots_mod(g, p, E):
            val = dg.evaluate_mod(r, pE)
            v = padic_valuation(val, p) if val else E
            if E <= 2 * v:
                raise LiftAmbiguous(
                    f"residue {r} mod {p}^{E} fails the strong Hensel criterion"
                )
            t = r % p**prec
            if found.get(t, 0) < mult:
                found[t] = mult
    return [
        PAdicRootData(p, t, prec, m) for t, m in sorted(found.items())
    ]


def _first_power_without_root(h: IntPoly, p: int) -> int:
    """Smallest p^j such that h has no root mod p^j.

    Only called when h has no Z_p root, which bounds the depth of the root
    tree; the cap below is a defensive multiple of that bound.
    """
    decomp = _squarefree_decomposition(h.coeffs)
    vmax = 0
    for g, _ in decomp:
        res = resultant(g, g.derivative())
        if res % p == 0:
            vmax = max(vmax, padic_valuation(res, p))
    k = max(1, h.degree())
    cont_all = math.gcd(*[abs(c) for c in h.coeffs])
    cap = k * k * (2 * vmax + 1) + (padic_valuation(cont_all, p) if cont_all % p == 0 else 0) + 8
    roots = _roots_mod_p(h, p)
    j = 1
    while roots:
        j += 1
        if j > cap:
            raise LiftAmbiguous(f"root tree for p={p} deeper than cap {cap}")
        roots = _lift_level(h, p, roots, j)
    return p**j


def _integer_root(h: IntPoly) -> int | None:
    """Some integer root of h, or None (rational-root test on divisors of a_0)."""
    if h.is_zero():
        return None
    if h.evaluate(0) == 0:
        return 0
    a0 = abs(h.coeffs[0])
    d = 1
    while d * d <= a0:
        if a0 % d == 0:
            for c in (d, -d, a0 // d, -(a0 // d)):
                if h.evaluate(c) == 0:
                    return c
        d += 1
    return None


def default_precision(h: IntPoly, p: int) -> int:
    """Lifting precision e_p: enough to resolve singular branches.

    e_p = v_p(Res(h_sf, h_sf') * a_k) + k + 1 when p divides that product,
    else 1 (plain Hensel suffices).
    """
    R = abs(h.leading())
    for g, _ in _squarefree_decomposition(h.coeffs):
        R *= abs(resultant(g, g.derivative()))
    if R % p:
        return 1
    return padic_valuation(R, p) + h.degree() + 1


def check_intersective(h: IntPoly, B: int) -> IntersectivityVerdict:
    """Decide p-adic solvability for every prime p <= B.

    An integer root certifies intersectivity outright (bound None).
    Otherwise a prime with no Z_p root yields the smallest failing prime
    power as witness, minimized over all failing primes <= B.
    """
    if h.degree() < 1:
        raise ValueError("check_intersective needs a nonconstant polynomial")
    n0 = _integer_root(h)
    if n0 is not None:
        return IntersectiveUpTo(None, {}, integer_root=n0)
    roots: dict[int, PAdicRootData] = {}
    best_witness: int | None = None
    for p in primes_up_to(B):
        if best_witness is not None and p > best_witness:
            break
        prec = default_precision(h, p)
        cands = hensel_roots(h, p, prec)
        if not cands:
            w = _first_power_without_root(h, p)
            if best_witness is None or w < best_witness:
                best_witness = w
            continue
        roots[p] = _select_root(cands, p, prec)
    if best_witness is not None:
        return NotIntersective(best_witness)
    return IntersectiveUpTo(B, roots)


def _digits(n: int, p: int, length: int) -> tuple[int, ...]:
    out = []
    for _ in range(length):
        n, d = divmod(n, p)
        out.append(d)
    return tuple(out)


def _select_root(cands: list[PAdicRootData], p: int, prec: int) -> PAdicRootData:
    """Deterministic choice: maximal multiplicity, then p-adically
    lexicographically smallest digit sequence (least-significant first).

    The first digit is the residue mod p, matching the stated tie-break; the
    deeper digits pin down one fixed element of Z_p so that choices at
    different precisions are truncations of the same root.
    """
    return min(cands, key=lambda rd: (-rd.multiplicity, _digits(rd.residue, p, prec)))


# ----------------------------------------------------------------------
# The auxiliary family
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class AuxRecord:
    r: int
    lam: int
    poly: IntPoly
    b: int
    J: int


class AuxFamily:
    """An intersective h with its per-prime root data and memoized h_d.

    Root data is materialized lazily per prime (up to `bound`) and the d
    memo fills on demand; both are guarded by a lock so concurrent readers
    see consistent data.  h is negated on construction if its leading
    coefficient is negative (`negated` records this).

    Downstream quantities (r_d, h_d, the sieve data) depend on which z_p is
    fixed per prime; `selector` exposes that choice for cross-comparison.
    A custom selector must be coherent across precisions (pick truncations
    of one fixed Z_p root), as the default is.
    """

    def __init__(self, h: IntPoly, bound: int = 1000, selector=None):
        if h.degree() < 1:
            raise ValueError("AuxFamily needs a nonconstant polynomial")
        self.negated = h.leading() < 0
        self.h = h.neg() if self.negated else h
        self.bound = bound
        self.k = self.h.degree()
        self._selector = selector or _select_root
        self._roots: dict[int, PAdicRootData] = {}
        self._memo: dict[int, AuxRecord] = {}
        self._lock = threading.RLock()

    # -- per-prime root data -------------------------------------------------

    def root_data(self, p: int, min_prec: int = 1) -> PAdicRootData:
        """Chosen z_p truncated to at least min_prec digits."""
        if p > self.bound:
            raise PrimeOutOfRange(p, self.bound)
        with self._lock:
            cur = self._roots.get(p)
            if cur is not None and cur.prec >= min_prec:
                return cur
            prec = max(min_prec, default_precision(self.h, p))
            cands = hensel_roots(self.h, p, prec)
            if not cands:
                raise NotIntersectiveError(
                    f"{self.h!r} has no {p}-adic root; not intersective"
                )
            chosen = self._selector(cands, p, prec)
            self._roots[p] = chosen
            return chosen

    @property
    def roots(self) -> dict[int, PAdicRootData]:
        with self._lock:
            return dict(self._roots)

    def multiplicity(self, p: int) -> int:
        return self.root_data(p).multiplicity

    def root_residue(self, p: int, alpha: int) -> int:
        """z_p mod p^alpha."""
        return self.root_data(p, min_prec=alpha).residue % p**alpha

    # -- lambda, r_d, h_d ------------------------------------------------------

    def lambda_of(self, d: int) -> int:
        """lambda(d) = prod p^(alpha * m_p) over p^alpha || d."""
        if d < 1:
            raise ValueError("d must be >= 1")
        lam = 1
        for p, a in factorize(d):
            lam *= p ** (a * self.multiplicity(p))
        return lam

    def r_of(self, d: int) -> int:
        """The unique r in (-d, 0] with r = z_p (mod p^alpha) for p^alpha || d."""
        if d < 1:
            raise ValueError("d must be >= 1")
        if d == 1:
            return 0
        pairs = [(self.root_residue(p, a), p**a) for p, a in factorize(d)]
        x, _ = crt(pairs)
        return x - d if x > 0 else x

    def aux_record(self, d: int) -> AuxRecord:
        with self._lock:
            rec = self._memo.get(d)
            if rec is not None:
                return rec
        r = self.r_of(d)
        lam = self.lambda_of(d)
        poly = self.h.shift_scale_divide(r, d, lam)
        b, J = poly.coeff_stats()
        rec = AuxRecord(r, lam, poly, b, J)
        with self._lock:
            self._memo.setdefault(d, rec)
            return self._memo[d]

    def aux_poly(self, d: int) -> IntPoly:
        """h_d(x) = h(r_d + d x) / lambda(d), memoized.

        A NonIntegralQuotient escaping from here means the root data is
        wrong; it is deliberately not caught.
        """
        return self.aux_record(d).poly

    def verify_nesting(self, d: int, q: int, n_max: int = 50) -> int:
        """Check lambda(q) h_{dq}(n) = h_d(s + qn) for n = 1..n_max; returns s.

        s = (r_{dq} - r_d) / d must be an integer in (-q, 0].
        """
        rd = self.r_of(d)
        rdq = self.r_of(d * q)
        s, rem = divmod(rdq - rd, d)
        if rem != 0 or not (-q < s <= 0):
            raise NestingViolation(d, q, 0)
        lam_q = self.lambda_of(q)
        hd = self.aux_poly(d)
        hdq = self.aux_poly(d * q)
        for n in range(1, n_max + 1):
            if lam_q * hdq.evaluate(n) != hd.evaluate(s + q * n):
                raise NestingViolation(d, q, n)
        return s
