"""Univariate post-processing of eliminated polynomials.

Everything here works on dense coefficient lists (lowest degree first) of
Fractions or ints; the public functions accept and return univariate
``MultiPoly`` values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterator, Sequence

from ..errors import DomainError, StructuralError
from .poly import MultiPoly

Coeffs = list  # list[Fraction] or list[int], lowest degree first


# dense helpers ---------------------------------------------------------------


def trim(c: Coeffs) -> Coeffs:
    c = list(c)
    while c and not c[-1]:
        c.pop()
    return c


def deriv(c: Coeffs) -> Coeffs:
    return [k * c[k] for k in range(1, len(c))]


def horner(c: Coeffs, x):
    acc = 0
    for a in reversed(c):
        acc = acc * x + a
    return acc


def pdivmod(a: Coeffs, b: Coeffs) -> tuple[Coeffs, Coeffs]:
    a = [Fraction(x) for x in trim(a)]
    b = trim(b)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    lb = Fraction(b[-1])
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 0)
    while len(a) >= len(b) and a:
        k = len(a) - len(b)
        t = a[-1] / lb
        q[k] = t
        for i, bi in enumerate(b):
            a[i + k] -= t * bi
        a = trim(a)
    return q, a


def pmul(a: Coeffs, b: Coeffs) -> Coeffs:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def monic(c: Coeffs) -> Coeffs:
    c = trim(c)
    lc = Fraction(c[-1])
    return [Fraction(x) / lc for x in c]


def pgcd(a: Coeffs, b: Coeffs) -> Coeffs:
    a, b = trim(a), trim(b)
    while b:
        _, r = pdivmod(a, b)
        a, b = b, monic(r) if r else []
    return monic(a) if a else []


def primitive_int(c: Coeffs) -> tuple[Fraction, list[int]]:
    """Split into rational content (sign of the leading coeff) and a primitive int list."""
    c = [Fraction(x) for x in trim(c)]
    if not c:
        return Fraction(0), []
    den = 1
    for x in c:
        den = den * x.denominator // math.gcd(den, x.denominator)
    ints = [int(x * den) for x in c]
    g = 0
    for v in ints:
        g = math.gcd(g, v)
    if ints[-1] < 0:
        g = -g
    return Fraction(g, den), [v // g for v in ints]


def _coeffs_of(f: MultiPoly) -> tuple[int, Coeffs]:
    var = f.univariate_var()
    if var is None:
        if not f.is_constant():
            raise StructuralError("expected a univariate polynomial")
        var = 0
    return var, f.to_coeffs(var) if f.nvars else [f.constant_value()]


def _wrap(c: Coeffs, like: MultiPoly, var: int) -> MultiPoly:
    return MultiPoly.from_coeffs([Fraction(x) for x in c], like.nvars, var)


def cauchy_bound(c: Coeffs) -> Fraction:
    """Every complex root has absolute value strictly below this bound."""
    c = trim(c)
    lc = abs(Fraction(c[-1]))
    return 1 + max((abs(Fraction(x)) / lc for x in c[:-1]), default=Fraction(0))


def _sign(v) -> int:
    return (v > 0) - (v < 0)


# square-free ---------------------------------------------------------------


def _sqfree_dense(c: Coeffs) -> Coeffs:
    c = trim(c)
    if len(c) <= 1:
        return [Fraction(1)]
    g = pgcd(c, deriv(c))
    q, _ = pdivmod(c, g)
    return q


def squarefree_part(f: MultiPoly) -> MultiPoly:
    """Product of the distinct irreducible factors, primitive with positive leading coeff."""
    if f.is_zero():
        raise DomainError("square-free part of the zero polynomial")
    var, c = _coeffs_of(f)
    _, ints = primitive_int(_sqfree_dense(c))
    return _wrap(ints, f, var)


def yun(c: Coeffs) -> list[tuple[Coeffs, int]]:
    """Yun's square-free decomposition: monic coprime parts with multiplicities."""
    c = trim(c)
    out = []
    if len(c) <= 1:
        return out
    dc = deriv(c)
    a = pgcd(c, dc)
    b, _ = pdivmod(c, a)
    cc, _ = pdivmod(dc, a)
    d = [x - y for x, y in _pad(cc, deriv(b))]
    i = 1
    while len(trim(b)) > 1:
        ai = pgcd(b, d) if trim(d) else monic(b)
        b, _ = pdivmod(b, ai)
        cc, _ = pdivmod(d, ai) if trim(d) else ([], [])
        d = [x - y for x, y in _pad(cc, deriv(b))]
        if len(trim(ai)) > 1:
            out.append((monic(ai), i))
        i += 1
    return out


def _pad(a: Coeffs, b: Coeffs):
    n = max(len(a), len(b))
    return zip(list(a) + [0] * (n - len(a)), list(b) + [0] * (n - len(b)))


# Sturm sequences and exact isolation -----------------------------------------


def sturm_sequence(c: Coeffs) -> list[Coeffs]:
    seq = [[Fraction(x) for x in trim(c)]]
    d = deriv(seq[0])
    if trim(d):
        seq.append(d)
    while len(seq[-1]) > 1:
        _, r = pdivmod(seq[-2], seq[-1])
        if not r:
            break
        seq.append([-x for x in r])
    return seq


def _variations(seq: list[Coeffs], x) -> int:
    signs = [s for s in (_sign(horner(p, x)) for p in seq) if s]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def sturm_count(f: MultiPoly, lo=None, hi=None) -> int:
    """Number of distinct real roots in (lo, hi]; defaults to all real roots."""
    _, c = _coeffs_of(f)
    c = trim(c)
    if len(c) <= 1:
        return 0
    seq = sturm_sequence(c)
    b = cauchy_bound(c)
    lo = -b if lo is None else Fraction(lo)
    hi = b if hi is None else Fraction(hi)
    return _variations(seq, lo) - _variations(seq, hi)


_SPLITS = (Fraction(1, 2), Fraction(1, 3), Fraction(2, 3), Fraction(3, 7), Fraction(4, 7))


def _split_point(c: Coeffs, a: Fraction, b: Fraction) -> Fraction:
    for t in _SPLITS:
        m = a + (b - a) * t
        if horner(c, m):
            return m
    k = 11
    while True:
        m = a + (b - a) * Fraction(5, k)
        if horner(c, m):
            return m
        k += 2


def isolate_real_roots(c: Coeffs) -> list[tuple[Fraction, Fraction]]:
    """Disjoint rational intervals each holding exactly one real root of square-free ``c``.

    An interval with ``lo == hi`` is an exact rational root.  Endpoints of proper
    intervals are never roots.
    """
    c = [Fraction(x) for x in trim(c)]
    if len(c) <= 1:
        return []
    seq = sturm_sequence(c)
    b = cauchy_bound(c)
    out = []
    stack = [(-b, b)]
    while stack:
        lo, hi = stack.pop()
        n = _variations(seq, lo) - _variations(seq, hi)
        if n == 0:
            continue
        if n == 1:
            out.append((lo, hi))
            continue
        m = _split_point(c, lo, hi)
        stack.append((lo, m))
        stack.append((m, hi))
    return sorted(out)


def refine_root(c: Coeffs, lo: Fraction, hi: Fraction, width: Fraction) -> tuple[Fraction, Fraction]:
    if lo == hi:
        return lo, hi
    slo = _sign(horner(c, lo))
    while hi - lo > width:
        m = (lo + hi) / 2
        sm = _sign(horner(c, m))
        if sm == 0:
            return m, m
        if sm == slo:
            lo = m
        else:
            hi = m
    return lo, hi


# numeric real roots ------------------------------------------------------------


def _float_roots(c: list[Fraction], tol: float) -> list[float]:
    c = trim(c)
    if len(c) <= 1:
        return []
    if len(c) == 2:
        return [float(-c[0] / c[1])]
    crit = _float_roots(_sqfree_dense(deriv(c)), tol / 16)
    bound = float(cauchy_bound(c))
    pts = [-bound] + [x for x in crit if -bound < x < bound] + [bound]
    roots: list[float] = []

    def sgn(x: float) -> int:
        return _sign(horner(c, Fraction(x)))

    for lo, hi in zip(pts, pts[1:]):
        slo, shi = sgn(lo), sgn(hi)
        if slo == 0:
            roots.append(lo)
            continue
        if shi == 0 or slo == shi:
            continue
        while hi - lo > tol / 8:
            m = (lo + hi) / 2
            if m in (lo, hi):
                break
            sm = sgn(m)
            if sm == 0:
                lo = hi = m
                break
            if sm == slo:
                lo = m
            else:
                hi = m
        roots.append((lo + hi) / 2)
    if pts and sgn(pts[-1]) == 0:
        roots.append(pts[-1])
    roots.sort()
    merged: list[float] = []
    for r in roots:
        if not merged or r - merged[-1] > tol:
            merged.append(r)
    return merged


def real_roots_numeric(f: MultiPoly, tol: float = 1e-9) -> list[float]:
    """All real roots to within ``tol``.

    Roots of the derivative split the Cauchy interval into monotone pieces;
    each piece with a sign change is bisected (signs are evaluated exactly).
    """
    if f.is_zero():
        raise DomainError("real roots of the zero polynomial")
    _, c = _coeffs_of(f)
    return _float_roots(_sqfree_dense([Fraction(x) for x in c]), tol)


# partial factorization ---------------------------------------------------------


@dataclass(frozen=True)
class Factorization:
    """``content * prod(factor**mult)``; ``complete`` is False when a leftover
    factor of degree >= 6 could not be split further."""

    content: Fraction
    factors: tuple[tuple[MultiPoly, int], ...]
    complete: bool = True

    def __iter__(self) -> Iterator[tuple[MultiPoly, int]]:
        return iter(self.factors)

    def __len__(self) -> int:
        return len(self.factors)

    def __getitem__(self, i):
        return self.factors[i]

    def expand(self, nvars: int | None = None) -> MultiPoly:
        if self.factors:
            nvars = self.factors[0][0].nvars
        result = MultiPoly.constant(self.content, nvars or 1)
        for p, k in self.factors:
            result = result * p**k
        return result


def _rational_roots(ints: list[int]) -> list[Fraction]:
    an = abs(ints[-1])
    width = Fraction(1, 2 * an * an + 1)
    roots = []
    for lo, hi in isolate_real_roots(ints):
        lo, hi = refine_root(ints, lo, hi, width)
        if lo == hi:
            roots.append(lo)
            continue
        cand = ((lo + hi) / 2).limit_denominator(an)
        if lo <= cand <= hi and horner(ints, cand) == 0:
            roots.append(cand)
    return roots


def _exact_quotient(a: list[int], b: list[int]) -> list[int] | None:
    q, r = pdivmod(a, b)
    if r:
        return None
    if any(x.denominator != 1 for x in q):
        return None
    return [int(x) for x in q]


def _mpf_fraction(x) -> Fraction:
    sign, man, exp, _ = x._mpf_
    man = -int(man) if sign else int(man)
    return Fraction(man * 2**exp) if exp >= 0 else Fraction(man, 2 ** (-exp))


def _quadratic_factors(ints: list[int]) -> tuple[list[list[int]], list[int]]:
    """Split off integer quadratic factors by pairing high-precision complex roots."""
    if len(ints) - 1 < 4:
        return [], ints
    import mpmath

    an = abs(ints[-1])
    size = max(len(str(abs(v))) for v in ints)
    dps = 4 * len(str(an)) + 2 * size + 40
    try:
        with mpmath.workdps(dps):
            roots = mpmath.polyroots(list(reversed(ints)), maxsteps=500, extraprec=4 * dps)
            pairs = []
            eps = mpmath.mpf(10) ** (-(dps // 3))
            for r1, r2 in combinations(roots, 2):
                s = r1 + r2
                p = r1 * r2
                if abs(mpmath.im(s)) > eps or abs(mpmath.im(p)) > eps:
                    continue
                pairs.append((_mpf_fraction(mpmath.re(s)), _mpf_fraction(mpmath.re(p))))
    except mpmath.libmp.NoConvergence:
        return [], ints
    found = []
    rest = ints
    for s, p in pairs:
        if len(rest) - 1 < 4:
            break
        s, p = s.limit_denominator(an), p.limit_denominator(an)
        _, q = primitive_int([p, -s, Fraction(1)])
        quo = _exact_quotient(rest, q)
        if quo is not None:
            found.append(q)
            rest = quo
    return found, rest


def _dense_key(c: list[int]):
    return (len(c), [abs(x) for x in reversed(c)], list(reversed(c)))


def factor_univariate(f: MultiPoly) -> Factorization:
    """Partial factorization over Q: linear and quadratic factors.

    A leftover of degree <= 5 with no linear or quadratic factor is irreducible;
    a longer leftover is kept whole and the result is marked incomplete.
    """
    var, c = _coeffs_of(f)
    content, ints = primitive_int(c)
    if len(ints) <= 1:
        return Factorization(Fraction(c[0]) if c else Fraction(0), ())
    factors: list[tuple[list[int], int]] = []
    complete = True
    for part, mult in yun(ints):
        _, sq = primitive_int(part)
        rest = sq
        for root in _rational_roots(sq):
            lin = [-root.numerator, root.denominator]
            quo = _exact_quotient(rest, lin)
            if quo is not None:
                rest = quo
                factors.append((lin, mult))
        quads, rest = _quadratic_factors(rest)
        factors.extend((q, mult) for q in quads)
        if len(rest) > 1:
            if len(rest) - 1 >= 6:
                complete = False
            factors.append((rest, mult))
    # fold any leftover unit from integer splitting into the content
    prod = [1]
    for q, k in factors:
        for _ in range(k):
            prod = pmul(prod, q)
    unit = Fraction(ints[-1], prod[-1])
    factors.sort(key=lambda t: _dense_key(t[0]))
    polys = tuple((_wrap(q, f, var), k) for q, k in factors)
    return Factorization(content * unit, polys, complete)
