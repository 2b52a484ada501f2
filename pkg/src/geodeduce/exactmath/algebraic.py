"""Rational and quadratic-surd answers ``(p + q*sqrt(d)) / r``."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .poly import MultiPoly
from .univariate import (
    _coeffs_of,
    factor_univariate,
    primitive_int,
    real_roots_numeric,
)

_TRIAL_LIMIT = 100_000


def split_square(n: int) -> tuple[int, int]:
    """Write ``n > 0`` as ``s*s*d`` with ``d`` square-free.

    Square factors are found by trial division up to 1e5; a cofactor that is
    itself a perfect square is absorbed, anything else is taken as square-free.
    """
    if n <= 0:
        raise ValueError("split_square expects a positive integer")
    s, d = 1, 1
    p = 2
    while p * p <= n and p <= _TRIAL_LIMIT:
        k = 0
        while n % p == 0:
            n //= p
            k += 1
        s *= p ** (k // 2)
        if k % 2:
            d *= p
        p += 1 if p == 2 else 2
    r = math.isqrt(n)
    if r * r == n:
        s *= r
    else:
        d *= n
    return s, d


class QSqrt:
    """Element ``a + b*sqrt(d)`` of Q(sqrt d), just enough ring to run Horner."""

    __slots__ = ("a", "b", "d")

    def __init__(self, a, b, d):
        self.a, self.b, self.d = Fraction(a), Fraction(b), d

    def _lift(self, o):
        return o if isinstance(o, QSqrt) else QSqrt(o, 0, self.d)

    def __add__(self, o):
        o = self._lift(o)
        return QSqrt(self.a + o.a, self.b + o.b, self.d)

    __radd__ = __add__

    def __mul__(self, o):
        o = self._lift(o)
        return QSqrt(self.a * o.a + self.b * o.b * self.d, self.a * o.b + self.b * o.a, self.d)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = QSqrt(1, 0, self.d)
        for _ in range(k):
            out = out * self
        return out

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0


@dataclass(frozen=True)
class AlgebraicNumber:
    """A rational number or a real quadratic surd together with its minimal polynomial.

    For ``kind == "rational"`` the value is ``p / r`` with ``q == 0`` and ``d == 1``.
    """

    kind: str
    p: int
    q: int
    r: int
    d: int

    @classmethod
    def rational(cls, value) -> AlgebraicNumber:
        value = Fraction(value)
        return cls("rational", value.numerator, 0, value.denominator, 1)

    @classmethod
    def surd(cls, p: int, q: int, r: int, d: int) -> AlgebraicNumber:
        if r == 0:
            raise ZeroDivisionError("surd with zero denominator")
        if d < 0:
            raise ValueError("only real surds are supported")
        if q == 0 or d in (0, 1):
            return cls.rational(Fraction(p + (q if d == 1 else 0), r))
        s, d = split_square(d)
        q *= s
        if d == 1:
            return cls.rational(Fraction(p + q, r))
        if r < 0:
            p, q, r = -p, -q, -r
        g = math.gcd(math.gcd(p, q), r)
        return cls("quadratic-surd", p // g, q // g, r // g, d)

    @property
    def value(self) -> Fraction:
        if self.kind != "rational":
            raise ValueError("irrational number has no exact Fraction value")
        return Fraction(self.p, self.r)

    def __float__(self) -> float:
        if self.kind == "rational":
            return self.p / self.r
        return (self.p + self.q * math.sqrt(self.d)) / self.r

    def exact(self) -> QSqrt:
        if self.kind == "rational":
            return QSqrt(Fraction(self.p, self.r), 0, 1)
        return QSqrt(Fraction(self.p, self.r), Fraction(self.q, self.r), self.d)

    def minimal_polynomial(self, nvars: int = 1, var: int = 0) -> MultiPoly:
        if self.kind == "rational":
            c = [-self.p, self.r]
        else:
            p, q, r, d = self.p, self.q, self.r, self.d
            c = [p * p - q * q * d, -2 * p * r, r * r]
        _, ints = primitive_int(c)
        return MultiPoly.from_coeffs(ints, nvars, var)

    def is_root_of(self, f: MultiPoly) -> bool:
        """Exact substitution in Q(sqrt d)."""
        _, c = _coeffs_of(f)
        x = self.exact()
        acc = QSqrt(0, 0, x.d)
        for a in reversed(c):
            acc = acc * x + a
        return acc.is_zero()

    def square(self) -> Fraction | None:
        """Exact square when it is rational, else None."""
        if self.kind == "rational":
            return self.value**2
        if self.p == 0:
            return Fraction(self.q * self.q * self.d, self.r * self.r)
        return None

    def to_text(self) -> str:
        if self.kind == "rational":
            return str(Fraction(self.p, self.r))
        p, q, r, d = self.p, self.q, self.r, self.d
        root = f"sqrt({d})"
        if p == 0:
            coef = Fraction(q, r)
            if coef == 1:
                return root
            if coef == -1:
                return f"-{root}"
            return f"{coef}*{root}"
        qa = abs(q)
        surd = root if qa == 1 else f"{qa}*{root}"
        body = f"{p} {'+' if q > 0 else '-'} {surd}"
        return body if r == 1 else f"({body})/{r}"

    def __str__(self) -> str:
        return self.to_text()

    def as_record(self) -> dict:
        return {"kind": self.kind, "p": self.p, "q": self.q, "r": self.r, "d": self.d}


@dataclass(frozen=True)
class NonSurdRoot:
    """A real root of an irreducible factor of degree >= 3, known only numerically."""

    lo: float
    hi: float
    factor: MultiPoly
    kind: str = "non-surd"

    def __float__(self) -> float:
        return (self.lo + self.hi) / 2

    def minimal_polynomial(self, nvars: int = 1, var: int = 0) -> MultiPoly:
        return self.factor

    def to_text(self) -> str:
        return f"root({float(self):.12g})"

    def __str__(self) -> str:
        return self.to_text()

    def as_record(self) -> dict:
        return {"kind": self.kind, "lo": self.lo, "hi": self.hi}


def quadratic_roots(a: int, b: int, c: int) -> list[AlgebraicNumber]:
    """Real roots of ``a x^2 + b x + c`` as surds, ascending."""
    disc = b * b - 4 * a * c
    if disc < 0:
        return []
    if disc == 0:
        return [AlgebraicNumber.rational(Fraction(-b, 2 * a))]
    roots = [AlgebraicNumber.surd(-b, s, 2 * a, disc) for s in (-1, 1)]
    return sorted(roots, key=float)


def extract_algebraic(f: MultiPoly, positive: bool = True, tol: float = 1e-9) -> list:
    """Real roots of ``f`` from its linear and quadratic factors, exactly.

    Roots of higher-degree irreducible factors come back as ``NonSurdRoot``
    brackets.  With ``positive`` only roots > 0 are kept.  Sorted by value.
    """
    out: list = []
    for factor, _ in factor_univariate(f):
        _, c = _coeffs_of(factor)
        ints = [int(x) for x in c]
        if len(ints) == 2:
            out.append(AlgebraicNumber.rational(Fraction(-ints[0], ints[1])))
        elif len(ints) == 3:
            out.extend(quadratic_roots(ints[2], ints[1], ints[0]))
        else:
            for x in real_roots_numeric(factor, tol):
                out.append(NonSurdRoot(x - tol, x + tol, factor))
    if positive:
        out = [x for x in out if _is_positive(x)]
    return sorted(out, key=float)


def _is_positive(x) -> bool:
    if isinstance(x, NonSurdRoot):
        return x.lo > 0
    if x.kind == "rational":
        return x.p > 0
    # sign of p + q sqrt(d)
    if x.p >= 0 and x.q > 0:
        return True
    if x.p <= 0 and x.q < 0:
        return False
    return (x.p * x.p > x.q * x.q * x.d) == (x.p > 0)
