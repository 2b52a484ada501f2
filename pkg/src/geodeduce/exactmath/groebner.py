"""Buchberger's algorithm, normal forms and elimination over Q.

Internally polynomials are ``dict[key, int]`` where ``key`` is the monomial's
order key.  All supported orders are linear in the exponent vector and
injective, so the leading monomial is ``max(poly)`` and multiplying by a
monomial is elementwise key addition.  Coefficients are kept fraction-free
(integers, periodically divided by their content).
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, asdict
from fractions import Fraction
from operator import add, sub
from typing import Iterable, Sequence

from ..errors import DomainError, ResourceError, StructuralError
from .poly import MonomialOrder, MultiPoly

DEFAULT_BUDGET = 200_000


@dataclass
class GroebnerStats:
    pairs_created: int = 0
    pairs_reduced: int = 0
    zero_reductions: int = 0
    reductions: int = 0
    basis_size: int = 0
    folded_variables: int = 0
    pruned_generators: int = 0

    def as_dict(self) -> dict:
        return asdict(self)


def _content(values) -> int:
    g = 0
    for v in values:
        g = math.gcd(g, v)
        if g == 1:
            break
    return g


class _Ring:
    """Key-space arithmetic for one monomial order."""

    def __init__(self, order: MonomialOrder, budget: int, stats: GroebnerStats):
        self.order = order
        self.n = order.nvars
        self.budget = budget
        self.stats = stats
        self.keyf = order.key
        self._exp_cache: dict[tuple, tuple] = {}
        # key -> exponent inversion data
        if order.kind == "lex":
            self._blocks = None
        else:
            if order.kind == "grevlex":
                blocks = [list(order.perm)]
            else:
                blocks = [
                    [i for i in order.perm if i in order.eliminate],
                    [i for i in order.perm if i not in order.eliminate],
                ]
            self._blocks = blocks

    def exp(self, key: tuple) -> tuple:
        e = self._exp_cache.get(key)
        if e is not None:
            return e
        out = [0] * self.n
        if self._blocks is None:
            for j, i in enumerate(self.order.perm):
                out[i] = key[j]
        else:
            pos = 0
            for idx in self._blocks:
                vals = key[pos + 1 : pos + 1 + len(idx)]
                for i, v in zip(reversed(idx), vals):
                    out[i] = -v
                pos += 1 + len(idx)
        e = tuple(out)
        self._exp_cache[key] = e
        return e

    def from_poly(self, p: MultiPoly) -> dict:
        den = 1
        for c in p.terms.values():
            den = den * c.denominator // math.gcd(den, c.denominator)
        d = {self.keyf(e): int(c * den) for e, c in p.terms.items()}
        return self.primitive(d)

    def to_poly(self, d: dict, scale: Fraction = Fraction(1)) -> MultiPoly:
        return MultiPoly(self.n, {self.exp(k): Fraction(c) / scale for k, c in d.items()})

    @staticmethod
    def primitive(d: dict) -> dict:
        if not d:
            return d
        g = _content(d.values())
        if d[max(d)] < 0:
            g = -g
        if g == 1:
            return d
        return {k: v // g for k, v in d.items()}

    def _tick(self):
        self.stats.reductions += 1
        if self.stats.reductions > self.budget:
            raise ResourceError(
                f"Groebner budget of {self.budget} reductions exhausted "
                f"({self.stats.pairs_reduced} S-pairs reduced, basis size {self.stats.basis_size})",
                stats=self.stats,
            )

    def reduce(self, p: dict, basis: Sequence[tuple], full: bool = True) -> tuple[dict, Fraction]:
        """Reduce ``p`` by ``basis`` entries ``(lm_key, lm_exp, lc, poly)``.

        Returns ``(r, mult)`` with ``r == mult * NF(p)`` exactly.
        """
        p = dict(p)
        r: dict = {}
        mult = Fraction(1)
        since_content = 0
        while p:
            k = max(p)
            c = p[k]
            e = self.exp(k)
            for gk, ge, gc, g in basis:
                for a, b in zip(e, ge):
                    if a < b:
                        break
                else:
                    break
            else:
                if not full:
                    p.update(r)
                    return p, mult
                r[k] = p.pop(k)
                continue
            self._tick()
            u = tuple(map(sub, k, gk))
            gg = math.gcd(c, gc)
            a = gc // gg
            b = c // gg
            if a != 1:
                p = {kk: v * a for kk, v in p.items()}
                if r:
                    r = {kk: v * a for kk, v in r.items()}
                mult *= a
            for kk, v in g.items():
                t = tuple(map(add, kk, u))
                nv = p.get(t, 0) - b * v
                if nv:
                    p[t] = nv
                else:
                    del p[t]
            since_content += 1
            if since_content >= 8 and p:
                since_content = 0
                g2 = _content(list(p.values()) + list(r.values()))
                if g2 > 1:
                    p = {kk: v // g2 for kk, v in p.items()}
                    r = {kk: v // g2 for kk, v in r.items()}
                    mult /= g2
        if r:
            g2 = _content(r.values())
            if r[max(r)] < 0:
                g2 = -g2
            if g2 != 1:
                r = {kk: v // g2 for kk, v in r.items()}
                mult /= g2
        return r, mult

    def spoly(self, f: tuple, g: tuple) -> dict:
        fk, fe, fc, fp = f
        gk, ge, gc, gp = g
        lcm = tuple(map(max, fe, ge))
        lk = self.keyf(lcm)
        uf = tuple(map(sub, lk, fk))
        ug = tuple(map(sub, lk, gk))
        gg = math.gcd(fc, gc)
        a = gc // gg
        b = fc // gg
        out: dict = {}
        for kk, v in fp.items():
            out[tuple(map(add, kk, uf))] = a * v
        for kk, v in gp.items():
            t = tuple(map(add, kk, ug))
            nv = out.get(t, 0) - b * v
            if nv:
                out[t] = nv
            else:
                out.pop(t, None)
        return out


def _entry(ring: _Ring, d: dict) -> tuple:
    k = max(d)
    return (k, ring.exp(k), d[k], d)


def _divides(a: tuple, b: tuple) -> bool:
    return all(x <= y for x, y in zip(a, b))


def _lcm(a: tuple, b: tuple) -> tuple:
    return tuple(map(max, a, b))


def _buchberger(ring: _Ring, polys: list[dict]) -> list[dict]:
    stats = ring.stats
    entries: list[tuple] = []
    sugar: list[int] = []
    live_g: set[int] = set()
    live_pairs: set[tuple[int, int]] = set()
    heap: list = []

    def push_pair(i, j):
        ei, ej = entries[i][1], entries[j][1]
        lcm = _lcm(ei, ej)
        dl = sum(lcm)
        s = max(sugar[i] + dl - sum(ei), sugar[j] + dl - sum(ej))
        live_pairs.add((i, j))
        stats.pairs_created += 1
        heapq.heappush(heap, (s, ring.keyf(lcm), i, j))

    def update(ih):
        # Gebauer-Moeller installation of a new basis element
        mh = entries[ih][1]
        cands = list(live_g)
        accepted: list[int] = []
        while cands:
            ig = cands.pop()
            mg = entries[ig][1]
            lhg = _lcm(mh, mg)
            disjoint = all(a == 0 or b == 0 for a, b in zip(mh, mg))
            if disjoint or not (
                any(_divides(_lcm(mh, entries[o][1]), lhg) for o in cands)
                or any(_divides(_lcm(mh, entries[o][1]), lhg) for o in accepted)
            ):
                accepted.append(ig)
        for i, j in list(live_pairs):
            lij = _lcm(entries[i][1], entries[j][1])
            if (
                _divides(mh, lij)
                and _lcm(entries[i][1], mh) != lij
                and _lcm(entries[j][1], mh) != lij
            ):
                live_pairs.discard((i, j))
        for ig in accepted:
            mg = entries[ig][1]
            if not all(a == 0 or b == 0 for a, b in zip(mh, mg)):
                push_pair(min(ig, ih), max(ig, ih))
        for ig in list(live_g):
            if _divides(mh, entries[ig][1]):
                live_g.discard(ig)
        live_g.add(ih)

    def install(d, s):
        entries.append(_entry(ring, d))
        sugar.append(s)
        update(len(entries) - 1)

    for d in sorted(polys, key=lambda d: max(d)):
        install(d, max(sum(ring.exp(k)) for k in d))

    while live_pairs:
        s, _, i, j = heapq.heappop(heap)
        if (i, j) not in live_pairs:
            continue
        live_pairs.discard((i, j))
        stats.pairs_reduced += 1
        sp = ring.spoly(entries[i], entries[j])
        if not sp:
            stats.zero_reductions += 1
            continue
        basis = sorted((entries[g] for g in live_g), key=lambda t: t[0])
        r, _ = ring.reduce(sp, basis, full=True)
        if not r:
            stats.zero_reductions += 1
            continue
        r = ring.primitive(r)
        if not any(ring.exp(max(r))):
            return [{max(r): 1}]
        install(r, s)
        stats.basis_size = len(live_g)

    # reduced basis
    minimal = sorted((entries[g] for g in live_g), key=lambda t: t[0])
    out = []
    for idx, ent in enumerate(minimal):
        others = minimal[:idx] + minimal[idx + 1 :]
        r, _ = ring.reduce(ent[3], others, full=True)
        out.append(ring.primitive(r))
    out = [d for d in out if d]
    stats.basis_size = len(out)
    return sorted(out, key=lambda d: max(d))


def _check_same(polys: Sequence[MultiPoly]) -> int:
    if not polys:
        raise DomainError("empty polynomial sequence")
    n = polys[0].nvars
    for p in polys:
        if p.nvars != n:
            raise StructuralError(f"variable counts differ: {n} vs {p.nvars}")
    return n


def groebner_basis(
    polys: Sequence[MultiPoly],
    order: MonomialOrder,
    budget: int = DEFAULT_BUDGET,
    stats: GroebnerStats | None = None,
) -> list[MultiPoly]:
    """Reduced Groebner basis; elements primitive with positive leading coefficient."""
    n = _check_same(polys)
    if order.nvars != n:
        raise StructuralError("monomial order and polynomials disagree on variable count")
    stats = stats if stats is not None else GroebnerStats()
    ring = _Ring(order, budget, stats)
    ints = [ring.from_poly(p) for p in polys if p]
    if not ints:
        return []
    for d in ints:
        if not any(ring.exp(max(d))):
            return [MultiPoly.constant(1, n)]
    return [ring.to_poly(d) for d in _buchberger(ring, ints)]


def normal_form(f: MultiPoly, basis: Sequence[MultiPoly], order: MonomialOrder) -> MultiPoly:
    """Fully reduced remainder of ``f`` modulo ``basis`` (exact over Q)."""
    n = _check_same([f, *basis])
    if order.nvars != n:
        raise StructuralError("monomial order and polynomials disagree on variable count")
    if not basis or any(g.is_zero() for g in basis):
        raise DomainError("divisor list must be nonempty and free of zero polynomials")
    if f.is_zero():
        return f
    ring = _Ring(order, 10**12, GroebnerStats())
    den = 1
    for c in f.terms.values():
        den = den * c.denominator // math.gcd(den, c.denominator)
    fi = {ring.keyf(e): int(c * den) for e, c in f.terms.items()}
    entries = [_entry(ring, ring.from_poly(g)) for g in basis]
    r, mult = ring.reduce(fi, entries, full=True)
    return ring.to_poly(r, mult * den)


def s_polynomial(f: MultiPoly, g: MultiPoly, order: MonomialOrder) -> MultiPoly:
    ef, cf = f.leading_term(order)
    eg, cg = g.leading_term(order)
    lcm = _lcm(ef, eg)
    uf = MultiPoly(f.nvars, {tuple(map(sub, lcm, ef)): 1 / cf})
    ug = MultiPoly(f.nvars, {tuple(map(sub, lcm, eg)): 1 / cg})
    return uf * f - ug * g


# elimination ---------------------------------------------------------------


def _linear_pivot(g: MultiPoly, v: int):
    """If ``g = c*v + r`` with constant ``c`` and ``v`` absent from ``r``, return (c, r)."""
    hits = [(e, c) for e, c in g.terms.items() if e[v]]
    if len(hits) != 1:
        return None
    e, c = hits[0]
    if e[v] != 1 or sum(e) != 1:
        return None
    unit = MultiPoly(g.nvars, {e: c})
    return c, g - unit


def _fold_linear(gens: list[MultiPoly], keep: set[int], stats: GroebnerStats):
    """Substitute away variables defined by linear generators.

    Eliminated variables are solved and substituted; a kept variable is folded
    only when its defining expression involves kept variables alone, and that
    generator is then part of the answer.
    """
    kept_out: list[MultiPoly] = []
    gens = [g for g in gens if g]
    while True:
        best = None
        for gi, g in enumerate(gens):
            for v in sorted(g.variables()):
                piv = _linear_pivot(g, v)
                if piv is None:
                    continue
                c, r = piv
                if v in keep and not r.variables() <= keep:
                    continue
                score = (v in keep, r.degree(), len(r.terms))
                if best is None or score < best[0]:
                    best = (score, gi, v, c, r)
        if best is None:
            return gens, kept_out
        _, gi, v, c, r = best
        g = gens.pop(gi)
        value = r * (-1 / c)
        if v in keep:
            kept_out.append(g)
        gens = [h.subs({v: value}) if v in h.variables() else h for h in gens]
        gens = [h for h in gens if h]
        stats.folded_variables += 1
        for h in gens:
            if h.is_constant():
                return [MultiPoly.constant(1, h.nvars)], kept_out


def _prune_free(gens: list[MultiPoly], keep: set[int], stats: GroebnerStats) -> list[MultiPoly]:
    """Drop generators that are the sole carrier of an eliminated variable and monic in it.

    Such a generator can always be solved for that variable, so it does not
    constrain the remaining ones.
    """
    changed = True
    while changed:
        changed = False
        owners: dict[int, list[int]] = {}
        for gi, g in enumerate(gens):
            for v in g.variables():
                owners.setdefault(v, []).append(gi)
        for v, idx in owners.items():
            if v in keep or len(idx) != 1:
                continue
            g = gens[idx[0]]
            top = g.degree(v)
            lead = [(e, c) for e, c in g.terms.items() if e[v] == top]
            if all(sum(e) == top for e, _ in lead) and len(lead) == 1:
                gens = gens[: idx[0]] + gens[idx[0] + 1 :]
                stats.pruned_generators += 1
                changed = True
                break
    return gens


def eliminate(
    polys: Sequence[MultiPoly],
    keep: Iterable[int],
    budget: int = DEFAULT_BUDGET,
    stats: GroebnerStats | None = None,
    elim_order: Sequence[int] | None = None,
    stages: Sequence[Sequence[int]] = (),
) -> list[MultiPoly]:
    """Generators of the elimination ideal ``<polys> ∩ Q[keep]``.

    The result is a reduced Groebner basis of that ideal under grevlex on the
    kept variables, expressed in the original variable count.  An empty list
    means the elimination ideal is zero.

    ``stages`` lists groups of variables to eliminate one group at a time
    before the rest; each stage is an exact elimination, so the answer is the
    same, but triangular systems (one constructed point per group, last point
    first) are far cheaper this way than one big block order.
    """
    n = _check_same(polys)
    keep = set(keep)
    if not keep <= set(range(n)):
        raise StructuralError("kept variables out of range")
    stats = stats if stats is not None else GroebnerStats()
    remaining = set(range(n))
    gens = list(polys)
    for group in stages:
        group = set(group) - keep
        if not group & remaining:
            continue
        remaining -= group
        gens = _eliminate_once(gens, remaining, budget, stats, elim_order, n)
        if not gens:
            return []
    return _eliminate_once(gens, keep, budget, stats, elim_order, n)


def _eliminate_once(polys, keep, budget, stats, elim_order, n) -> list[MultiPoly]:
    gens, kept_out = _fold_linear(list(polys), keep, stats)
    gens = _prune_free(gens, keep, stats)
    result: list[MultiPoly] = list(kept_out)
    if gens:
        used = sorted(set().union(*(g.variables() for g in gens)))
        elim_vars = [v for v in used if v not in keep]
        if elim_order is not None:
            rank = {v: i for i, v in enumerate(elim_order)}
            elim_vars.sort(key=lambda v: rank.get(v, len(rank) + v))
        kept_vars = [v for v in used if v in keep]
        compact = elim_vars + kept_vars
        forward = {v: i for i, v in enumerate(compact)}
        m = len(compact)
        if m == 0:
            if any(g for g in gens):
                return [MultiPoly.constant(1, n)]
        else:
            local = [g.remap(forward, m) for g in gens]
            if elim_vars:
                order = MonomialOrder.block(m, range(len(elim_vars)))
            else:
                order = MonomialOrder.grevlex(m)
            basis = groebner_basis(local, order, budget=budget, stats=stats)
            back = {i: v for v, i in forward.items()}
            for b in basis:
                if all(i >= len(elim_vars) for i in b.variables()):
                    result.append(b.remap(back, n))
    if not result:
        return []
    kept_sorted = sorted(keep)
    fwd = {v: i for i, v in enumerate(kept_sorted)}
    local = [r.remap(fwd, len(kept_sorted)) for r in result if r]
    if not local:
        return []
    final = groebner_basis(local, MonomialOrder.grevlex(len(kept_sorted)), budget=budget, stats=stats)
    back = {i: v for v, i in fwd.items()}
    return [f.remap(back, n) for f in final]
