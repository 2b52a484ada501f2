"""Sparse multivariate polynomials over Q and monomial orders."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from operator import add, sub
from typing import Iterable, Mapping, Sequence

from ..errors import StructuralError

Exp = tuple[int, ...]


def _coerce(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, int):
        return Fraction(c)
    raise TypeError(f"polynomial coefficients must be exact, got {type(c).__name__}")


def _grevlex_part(exp: Exp, idx: Sequence[int]) -> tuple[int, ...]:
    return (sum(exp[i] for i in idx),) + tuple(-exp[i] for i in reversed(idx))


@dataclass(frozen=True)
class MonomialOrder:
    """Total monomial order given by a key function on exponent vectors.

    ``perm`` lists variable indices from most to least significant.  For the
    block order, the variables in ``eliminate`` form the first block; inside each
    block monomials are compared graded-reverse-lexicographically.
    """

    kind: str
    nvars: int
    perm: tuple[int, ...] = ()
    eliminate: frozenset[int] = field(default_factory=frozenset)

    def __post_init__(self):
        if self.kind not in ("lex", "grevlex", "block"):
            raise ValueError(f"unknown monomial order {self.kind!r}")
        perm = self.perm or tuple(range(self.nvars))
        if sorted(perm) != list(range(self.nvars)):
            raise StructuralError("order permutation must list every variable once")
        object.__setattr__(self, "perm", tuple(perm))
        object.__setattr__(self, "eliminate", frozenset(self.eliminate))

    @classmethod
    def lex(cls, nvars: int, perm: Sequence[int] = ()) -> MonomialOrder:
        return cls("lex", nvars, tuple(perm))

    @classmethod
    def grevlex(cls, nvars: int, perm: Sequence[int] = ()) -> MonomialOrder:
        return cls("grevlex", nvars, tuple(perm))

    @classmethod
    def block(cls, nvars: int, eliminate: Iterable[int], perm: Sequence[int] = ()) -> MonomialOrder:
        return cls("block", nvars, tuple(perm), frozenset(eliminate))

    @cached_property
    def key(self):
        perm = self.perm
        if self.kind == "lex":
            return lambda e: tuple(e[i] for i in perm)
        if self.kind == "grevlex":
            return lambda e: _grevlex_part(e, perm)
        first = [i for i in perm if i in self.eliminate]
        rest = [i for i in perm if i not in self.eliminate]
        return lambda e: _grevlex_part(e, first) + _grevlex_part(e, rest)


class MultiPoly:
    """Polynomial with Fraction coefficients stored as ``{exponent tuple: coeff}``.

    Instances are treated as immutable; arithmetic always returns new objects.
    """

    __slots__ = ("nvars", "terms", "_hash")

    def __init__(self, nvars: int, terms: Mapping[Exp, object] | None = None):
        self.nvars = nvars
        clean: dict[Exp, Fraction] = {}
        if terms:
            for exp, c in terms.items():
                exp = tuple(exp)
                if len(exp) != nvars:
                    raise StructuralError(f"exponent {exp} does not have {nvars} entries")
                c = _coerce(c)
                if c:
                    clean[exp] = clean.get(exp, 0) + c
                    if not clean[exp]:
                        del clean[exp]
        self.terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, nvars: int, terms: dict[Exp, Fraction]) -> MultiPoly:
        obj = cls.__new__(cls)
        obj.nvars = nvars
        obj.terms = terms
        obj._hash = None
        return obj

    # constructors
    @classmethod
    def zero(cls, nvars: int) -> MultiPoly:
        return cls._raw(nvars, {})

    @classmethod
    def constant(cls, c, nvars: int) -> MultiPoly:
        c = _coerce(c)
        return cls._raw(nvars, {(0,) * nvars: c} if c else {})

    @classmethod
    def var(cls, i: int, nvars: int) -> MultiPoly:
        exp = [0] * nvars
        exp[i] = 1
        return cls._raw(nvars, {tuple(exp): Fraction(1)})

    @classmethod
    def from_coeffs(cls, coeffs: Sequence, nvars: int = 1, var: int = 0) -> MultiPoly:
        """Univariate polynomial from coefficients, lowest degree first."""
        terms = {}
        for k, c in enumerate(coeffs):
            c = _coerce(c)
            if c:
                exp = [0] * nvars
                exp[var] = k
                terms[tuple(exp)] = c
        return cls._raw(nvars, terms)

    # predicates and inspection
    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def constant_value(self) -> Fraction:
        return self.terms.get((0,) * self.nvars, Fraction(0))

    def variables(self) -> set[int]:
        used = set()
        for e in self.terms:
            used.update(i for i, k in enumerate(e) if k)
        return used

    def degree(self, var: int | None = None) -> int:
        if not self.terms:
            return -1
        if var is None:
            return max(sum(e) for e in self.terms)
        return max(e[var] for e in self.terms)

    def univariate_var(self) -> int | None:
        """Index of the single variable used, or None if constant or multivariate."""
        used = self.variables()
        return used.pop() if len(used) == 1 else None

    def to_coeffs(self, var: int | None = None) -> list[Fraction]:
        if var is None:
            var = self.univariate_var()
            if var is None:
                if self.is_constant():
                    return [self.constant_value()] if self.terms else []
                raise StructuralError("polynomial is not univariate")
        elif self.variables() - {var}:
            raise StructuralError("polynomial is not univariate")
        out = [Fraction(0)] * (self.degree(var) + 1)
        for e, c in self.terms.items():
            out[e[var]] = c
        return out

    def leading_term(self, order: MonomialOrder) -> tuple[Exp, Fraction]:
        if not self.terms:
            raise StructuralError("zero polynomial has no leading term")
        exp = max(self.terms, key=order.key)
        return exp, self.terms[exp]

    def sorted_terms(self, order: MonomialOrder | None = None) -> list[tuple[Exp, Fraction]]:
        order = order or MonomialOrder.grevlex(self.nvars)
        return sorted(self.terms.items(), key=lambda t: order.key(t[0]), reverse=True)

    # arithmetic
    def _check(self, other: MultiPoly):
        if other.nvars != self.nvars:
            raise StructuralError(f"variable counts differ: {self.nvars} vs {other.nvars}")

    def _lift(self, other) -> MultiPoly:
        if isinstance(other, MultiPoly):
            self._check(other)
            return other
        return MultiPoly.constant(other, self.nvars)

    def __add__(self, other) -> MultiPoly:
        other = self._lift(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            v = out.get(e, 0) + c
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return MultiPoly._raw(self.nvars, out)

    __radd__ = __add__

    def __neg__(self) -> MultiPoly:
        return MultiPoly._raw(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other) -> MultiPoly:
        return self + (-self._lift(other))

    def __rsub__(self, other) -> MultiPoly:
        return self._lift(other) - self

    def __mul__(self, other) -> MultiPoly:
        if not isinstance(other, MultiPoly):
            c = _coerce(other)
            if not c:
                return MultiPoly.zero(self.nvars)
            return MultiPoly._raw(self.nvars, {e: v * c for e, v in self.terms.items()})
        self._check(other)
        out: dict[Exp, Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(map(add, e1, e2))
                v = out.get(e, 0) + c1 * c2
                if v:
                    out[e] = v
                else:
                    del out[e]
        return MultiPoly._raw(self.nvars, out)

    __rmul__ = __mul__

    def __truediv__(self, other) -> MultiPoly:
        c = _coerce(other)
        if not c:
            raise ZeroDivisionError("division of a polynomial by zero")
        return self * (1 / c)

    def __pow__(self, n: int) -> MultiPoly:
        if n < 0:
            raise ValueError("negative polynomial power")
        result = MultiPoly.constant(1, self.nvars)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, MultiPoly):
            return self.nvars == other.nvars and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self == MultiPoly.constant(other, self.nvars)
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self.terms.items())))
        return self._hash

    def __bool__(self) -> bool:
        return bool(self.terms)

    # calculus and evaluation
    def diff(self, var: int) -> MultiPoly:
        out = {}
        for e, c in self.terms.items():
            k = e[var]
            if k:
                e2 = list(e)
                e2[var] = k - 1
                out[tuple(e2)] = c * k
        return MultiPoly._raw(self.nvars, out)

    def eval(self, values: Sequence):
        """Evaluate at a point; works for Fractions, floats or any ring supporting * and +."""
        total = 0
        for e, c in self.terms.items():
            term = c
            for v, k in zip(values, e):
                if k:
                    term = term * v**k
            total = total + term
        return total

    def subs(self, mapping: Mapping[int, MultiPoly]) -> MultiPoly:
        """Substitute polynomials (same variable count) for some variables."""
        if not mapping:
            return self
        powers: dict[tuple[int, int], MultiPoly] = {}
        result: dict[Exp, Fraction] = {}
        acc = MultiPoly._raw(self.nvars, result)
        for e, c in self.terms.items():
            kept = list(e)
            term = None
            for i, q in mapping.items():
                k = e[i]
                if k:
                    kept[i] = 0
                    if (i, k) not in powers:
                        powers[(i, k)] = q**k
                    term = powers[(i, k)] if term is None else term * powers[(i, k)]
            mono = MultiPoly._raw(self.nvars, {tuple(kept): c})
            acc = acc + (mono if term is None else mono * term)
        return acc

    def remap(self, mapping: Mapping[int, int], nvars: int) -> MultiPoly:
        """Rename variables by index; every used variable must be mapped."""
        out = {}
        for e, c in self.terms.items():
            e2 = [0] * nvars
            for i, k in enumerate(e):
                if k:
                    if i not in mapping:
                        raise StructuralError(f"variable {i} has no image in remap")
                    e2[mapping[i]] += k
            e2 = tuple(e2)
            out[e2] = out.get(e2, 0) + c
        return MultiPoly(nvars, out)

    def content(self) -> Fraction:
        """Positive rational content: gcd of numerators over lcm of denominators."""
        num = 0
        den = 1
        for c in self.terms.values():
            num = math.gcd(num, c.numerator)
            den = den * c.denominator // math.gcd(den, c.denominator)
        return Fraction(num, den) if num else Fraction(0)

    def primitive(self, order: MonomialOrder | None = None) -> MultiPoly:
        """Integer-coefficient primitive associate with positive leading coefficient."""
        if not self.terms:
            return self
        order = order or MonomialOrder.grevlex(self.nvars)
        c = self.content()
        _, lc = self.leading_term(order)
        if lc < 0:
            c = -c
        return MultiPoly._raw(self.nvars, {e: v / c for e, v in self.terms.items()})

    # text form
    def to_text(self, names: Sequence[str] | None = None, order: MonomialOrder | None = None) -> str:
        names = names or [f"v{i}" for i in range(self.nvars)]
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.sorted_terms(order):
            mono = "*".join(
                names[i] if k == 1 else f"{names[i]}^{k}" for i, k in enumerate(e) if k
            )
            a = abs(c)
            if not mono:
                body = str(a)
            elif a == 1:
                body = mono
            else:
                body = f"{a}*{mono}"
            if not parts:
                parts.append(body if c > 0 else f"-{body}")
            else:
                parts.append(("+ " if c > 0 else "- ") + body)
        return " ".join(parts)

    def __str__(self) -> str:
        return self.to_text()

    def __repr__(self) -> str:
        return f"MultiPoly({self.nvars}, {self.to_text()!r})"

    @classmethod
    def from_text(cls, text: str, names: Sequence[str]) -> MultiPoly:
        """Parse the canonical text form (sums of products of numbers and powers)."""
        index = {n: i for i, n in enumerate(names)}
        nvars = len(names)
        tokens = re.findall(r"\d+|[A-Za-z_][A-Za-z0-9_'.]*|[-+*/^]|\S", text)
        pos = 0

        def peek():
            return tokens[pos] if pos < len(tokens) else None

        def take():
            nonlocal pos
            tok = peek()
            if tok is None:
                raise ValueError(f"unexpected end of polynomial text {text!r}")
            pos += 1
            return tok

        def factor() -> MultiPoly:
            tok = take()
            if tok.isdigit():
                num = Fraction(int(tok))
                if peek() == "/" and pos + 1 < len(tokens) and tokens[pos + 1].isdigit():
                    take()
                    num /= int(take())
                return cls.constant(num, nvars)
            if tok in index:
                p = cls.var(index[tok], nvars)
                if peek() == "^":
                    take()
                    p = p ** int(take())
                return p
            raise ValueError(f"unexpected token {tok!r} in polynomial text")

        result = cls.zero(nvars)
        sign = 1
        if peek() in ("+", "-"):
            sign = -1 if take() == "-" else 1
        while True:
            term = factor()
            while peek() == "*":
                take()
                term = term * factor()
            result = result + term * sign
            tok = peek()
            if tok is None:
                break
            if tok not in ("+", "-"):
                raise ValueError(f"unexpected token {tok!r} in polynomial text")
            sign = -1 if take() == "-" else 1
        return result


def univariate(coeffs: Sequence, nvars: int = 1, var: int = 0) -> MultiPoly:
    return MultiPoly.from_coeffs(coeffs, nvars, var)


def exp_sub(a: Exp, b: Exp) -> Exp:
    return tuple(map(sub, a, b))
