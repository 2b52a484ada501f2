from __future__ import annotations

import math
import random
from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from geodeduce.construction import compile_program
from geodeduce.errors import DomainError, ResourceError, StructuralError
from geodeduce.exactmath import (
    AlgebraicNumber,
    MonomialOrder,
    MultiPoly,
    NonSurdRoot,
    eliminate,
    extract_algebraic,
    factor_univariate,
    groebner_basis,
    normal_form,
    real_roots_numeric,
    s_polynomial,
    squarefree_part,
    sturm_count,
)
from geodeduce.locus import condition_polynomial

from conftest import PROBLEMS, corpus_script
from oracles import resultant_y

X = ("x", "y")
QUINTIC = MultiPoly.from_text("64*x^5 - 128*x^4 + 80*x^3 - 17*x^2 + x", ["x"])


def P(text: str, names=X) -> MultiPoly:
    return MultiPoly.from_text(text, names)


def U(text: str) -> MultiPoly:
    return MultiPoly.from_text(text, ["x"])


# polynomials ----------------------------------------------------------------

small_int = st.integers(-5, 5)
exps = st.tuples(st.integers(0, 3), st.integers(0, 3))
polys2 = st.dictionaries(exps, small_int, max_size=5).map(lambda d: MultiPoly(2, d))


def test_zero_terms_are_dropped():
    p = MultiPoly(2, {(1, 0): 3, (0, 1): 0})
    assert p.terms == {(1, 0): Fraction(3)}
    assert (p - p).terms == {}
    assert MultiPoly.zero(2).is_zero()


def test_float_coefficients_rejected():
    with pytest.raises(TypeError):
        MultiPoly(1, {(1,): 0.5})


def test_mismatched_variable_counts():
    with pytest.raises(StructuralError):
        MultiPoly.var(0, 1) + MultiPoly.var(0, 2)


@given(polys2, polys2, polys2)
def test_ring_axioms(a, b, c):
    assert a + b == b + a
    assert a * b == b * a
    assert (a + b) * c == a * c + b * c
    assert (a * b) * c == a * (b * c)


@given(polys2)
def test_text_round_trip(p):
    assert MultiPoly.from_text(p.to_text(X), X) == p


@given(polys2, st.tuples(st.fractions(max_denominator=7), st.fractions(max_denominator=7)))
def test_eval_is_ring_homomorphism(p, pt):
    q = p * p + p
    v = p.eval(pt)
    assert q.eval(pt) == v * v + v


def test_orders_block_property():
    order = MonomialOrder.block(3, [0])
    key = order.key
    # anything with the eliminated variable beats anything without it
    assert key((1, 0, 0)) > key((0, 9, 9))
    assert key((0, 0, 0)) < key((0, 0, 1))


@given(st.lists(st.tuples(st.integers(0, 3), st.integers(0, 3), st.integers(0, 3)), min_size=3, max_size=3),
       st.sampled_from(["lex", "grevlex", "block"]))
def test_orders_are_multiplicative(es, kind):
    a, b, c = es
    order = {"lex": MonomialOrder.lex(3), "grevlex": MonomialOrder.grevlex(3),
             "block": MonomialOrder.block(3, [0, 1])}[kind]
    k = order.key
    mul = lambda u, v: tuple(i + j for i, j in zip(u, v))  # noqa: E731
    if k(a) < k(b):
        assert k(mul(a, c)) < k(mul(b, c))
    assert k((0, 0, 0)) <= k(a)


# normal form and bases --------------------------------------------------------

def test_normal_form_self_reduction():
    g = P("x^2 + y - 3")
    assert normal_form(g, [g], MonomialOrder.grevlex(2)).is_zero()


def test_normal_form_hand_division():
    assert normal_form(P("x^2*y"), [P("x*y - 1")], MonomialOrder.lex(2)) == P("x")


def test_normal_form_errors():
    with pytest.raises(StructuralError):
        normal_form(P("x"), [MultiPoly.var(0, 3)], MonomialOrder.lex(2))
    with pytest.raises(DomainError):
        normal_form(P("x"), [], MonomialOrder.lex(2))


@settings(max_examples=60, deadline=None)
@given(polys2, st.lists(polys2.filter(lambda p: not p.is_zero()), min_size=1, max_size=3))
def test_normal_form_idempotent(f, gens):
    order = MonomialOrder.grevlex(2)
    r = normal_form(f, gens, order)
    assert normal_form(r, gens, order) == r


def test_basis_of_single_variable():
    assert groebner_basis([P("x")], MonomialOrder.lex(2)) == [P("x")]


def test_basis_circle_and_diagonal():
    basis = groebner_basis([P("x^2 + y^2 - 1"), P("x - y")], MonomialOrder.lex(2))
    assert P("2*y^2 - 1") in basis
    assert P("x - y") in basis


def test_unit_ideal():
    assert groebner_basis([P("x*y - 1"), P("x")], MonomialOrder.grevlex(2)) == [MultiPoly.constant(1, 2)]


def test_budget_exhaustion_raises():
    polys = [P("x^3*y - y^2 + 2*x"), P("y^3 + x^2 - x*y + 1"), P("x^2*y^2 - 3")]
    with pytest.raises(ResourceError):
        groebner_basis(polys, MonomialOrder.lex(2), budget=5)


def _assert_buchberger(basis, order):
    for f, g in combinations(basis, 2):
        assert normal_form(s_polynomial(f, g, order), basis, order).is_zero()


@settings(max_examples=40, deadline=None)
@given(st.lists(polys2.filter(lambda p: not p.is_zero()), min_size=1, max_size=3),
       st.sampled_from(["lex", "grevlex"]))
def test_buchberger_criterion_random(gens, kind):
    order = MonomialOrder.lex(2) if kind == "lex" else MonomialOrder.grevlex(2)
    basis = groebner_basis(gens, order)
    _assert_buchberger(basis, order)
    for g in gens:
        assert normal_form(g, basis, order).is_zero()


def corpus_ideal(name):
    """Constraints of a corpus problem plus its first query condition."""
    script = corpus_script(name)
    q = script.queries[0]
    if hasattr(q, "left"):
        model = compile_program(script.program, extra=("%m",))
        m = model.var("%m")
        polys = list(model.constraints) + [m * model.linear(q.left.terms) - model.linear(q.right.terms)]
    else:
        model = compile_program(script.program, exclude_from_pin=(q.traced,))
        polys = list(model.constraints) + [condition_polynomial(model, q.condition)]
    return polys, model.nvars


@pytest.mark.parametrize("name", PROBLEMS)
def test_buchberger_criterion_on_corpus(name, monkeypatch):
    """Every basis computed while eliminating a corpus system satisfies the criterion."""
    from geodeduce.exactmath import groebner

    seen = []
    real = groebner.groebner_basis

    def spy(polys, order, *args, **kwargs):
        basis = real(polys, order, *args, **kwargs)
        seen.append((list(polys), order, basis))
        return basis

    monkeypatch.setattr(groebner, "groebner_basis", spy)
    polys, n = corpus_ideal(name)
    keep = [n - 1] if name in ("problem06", "problem15", "problem23", "problem47") else _traced_vars(name)
    eliminate(polys, keep, stages=_stages(name, keep))
    assert seen
    for gens, order, basis in seen:
        _assert_buchberger(basis, order)
        for p in gens:
            assert normal_form(p, basis, order).is_zero()


def _model(name):
    script = corpus_script(name)
    q = script.queries[0]
    if hasattr(q, "left"):
        return compile_program(script.program, extra=("%m",))
    return compile_program(script.program, exclude_from_pin=(q.traced,))


def _traced_vars(name):
    q = corpus_script(name).queries[0]
    return list(_model(name).coordinate_variables(q.traced))


def _stages(name, keep):
    return _model(name).elimination_stages(keep)


def test_eliminate_parametric_curve():
    x, y, t = (MultiPoly.var(i, 3) for i in range(3))
    gens = eliminate([x - t, y - t * t], [0, 1])
    assert [g.primitive() for g in gens] == [(y - x * x).primitive()]


def test_eliminate_keep_everything_is_reduced_basis():
    polys = [P("x^2 + y^2 - 1"), P("x - y")]
    gens = eliminate(polys, [0, 1])
    assert gens == groebner_basis(polys, MonomialOrder.grevlex(2))


def test_eliminate_problem6_gives_m_squared_128():
    polys, n = corpus_ideal("problem06")
    gens = eliminate(polys, [n - 1])
    assert len(gens) == 1
    assert gens[0].remap({n - 1: 0}, 1) == U("x^2 - 128")


def test_groebner_problem6_block_order():
    polys, n = corpus_ideal("problem06")
    basis = groebner_basis(polys, MonomialOrder.block(n, range(n - 1)))
    only_m = [b for b in basis if b.variables() <= {n - 1}]
    assert [b.remap({n - 1: 0}, 1) for b in only_m] == [U("x^2 - 128")]


def test_eliminate_keep_out_of_range():
    with pytest.raises(StructuralError):
        eliminate([P("x")], [5])


def _random_monic_in_y(rng: random.Random, dy: int, dx: int) -> MultiPoly:
    terms = {(0, dy): 1}
    for ey in range(dy):
        for ex in range(dx + 1):
            if rng.random() < 0.6:
                terms[(ex, ey)] = rng.randint(-4, 4)
    return MultiPoly(2, terms)


def test_elimination_matches_resultant_oracle():
    """100 random pairs monic in y: the eliminant divides Res_y and shares its roots."""
    rng = random.Random(20240611)
    checked = 0
    while checked < 100:
        f = _random_monic_in_y(rng, rng.randint(1, 2), rng.randint(1, 2))
        g = _random_monic_in_y(rng, rng.randint(1, 2), rng.randint(1, 2))
        res = resultant_y(f, g)
        if res.is_zero() or res.is_constant():
            continue
        # reorder so y is eliminated and x kept
        gens = eliminate([f, g], [0])
        assert gens, (f, g)
        h = gens[0].remap({0: 0}, 1)
        assert len(gens) == 1
        assert normal_form(res, [h], MonomialOrder.lex(1)).is_zero(), (f, g, h, res)
        # monic in y: no roots are lost at infinity, so the radicals agree
        assert squarefree_part(h) == squarefree_part(res), (f, g)
        checked += 1


# univariate tools ---------------------------------------------------------------

def test_squarefree_examples():
    assert squarefree_part(U("x^2 - 2")) == U("x^2 - 2")
    # (x - 1)^2 * (x + 2)
    assert squarefree_part(U("x^3 - 3*x + 2")) == U("x^2 + x - 2")
    assert squarefree_part(QUINTIC) == QUINTIC
    with pytest.raises(DomainError):
        squarefree_part(MultiPoly.zero(1))


def test_factor_quintic():
    fs = factor_univariate(QUINTIC)
    got = {f.to_text(["x"]) for f, k in fs}
    assert got == {"x", "x - 1", "4*x - 1", "16*x^2 - 12*x + 1"}
    assert all(k == 1 for _, k in fs)
    assert fs.complete
    # derived check: the product of the factors expands back to the quintic
    assert fs.expand() == QUINTIC


def test_factor_irreducible_quadratic_and_units():
    fs = factor_univariate(U("x^2 - 128"))
    assert [(f.to_text(["x"]), k) for f, k in fs] == [("x^2 - 128", 1)]
    assert len(factor_univariate(MultiPoly.constant(5, 1))) == 0


def _random_product(rng: random.Random) -> MultiPoly:
    f = MultiPoly.constant(Fraction(rng.randint(1, 9), rng.randint(1, 9)) * rng.choice((1, -1)), 1)
    x = MultiPoly.var(0, 1)
    for _ in range(rng.randint(1, 4)):
        if rng.random() < 0.5:
            f = f * (x * rng.randint(1, 6) - rng.randint(-6, 6))
        else:
            f = f * (x * x * rng.randint(1, 4) + x * rng.randint(-5, 5) + rng.randint(-6, 6))
    return f


def test_factor_round_trip_1000_products():
    rng = random.Random(7)
    for _ in range(1000):
        f = _random_product(rng)
        fs = factor_univariate(f)
        assert fs.expand() == f, f
        for factor, _k in fs:
            assert factor.degree() >= 1
            assert factor.content() == 1


@pytest.mark.parametrize("text,count", [("x^2 - 2", 2), ("x^2 + 1", 0), ("x^3 - x", 3)])
def test_sturm_counts(text, count):
    assert sturm_count(U(text)) == count


def test_real_roots_numeric_examples():
    r = real_roots_numeric(U("x^2 - 2"))
    assert r == pytest.approx([-math.sqrt(2), math.sqrt(2)], abs=1e-9)
    assert real_roots_numeric(U("x^2 - 128")) == pytest.approx([-8 * math.sqrt(2), 8 * math.sqrt(2)], abs=1e-9)
    s5 = math.sqrt(5)
    want = [0, (3 - s5) / 8, 0.25, (3 + s5) / 8, 1]
    assert real_roots_numeric(QUINTIC) == pytest.approx(want, abs=1e-9)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.integers(-6, 6), min_size=2, max_size=6))
def test_root_count_matches_sturm(coeffs):
    f = MultiPoly.from_coeffs(coeffs, 1)
    if f.is_constant():
        return
    sq = squarefree_part(f)
    assert len(real_roots_numeric(sq)) == sturm_count(sq)


# algebraic numbers ----------------------------------------------------------------

def test_extract_examples():
    assert [a.to_text() for a in extract_algebraic(U("x^2 - 128"))] == ["8*sqrt(2)"]
    assert extract_algebraic(U("34*x - 253")) == [AlgebraicNumber.rational(Fraction(253, 34))]
    roots = extract_algebraic(U("16*x^2 - 12*x + 1"))
    assert roots == [AlgebraicNumber.surd(3, -1, 8, 5), AlgebraicNumber.surd(3, 1, 8, 5)]
    for r in roots:
        assert r.is_root_of(U("16*x^2 - 12*x + 1"))
    assert extract_algebraic(U("x + 3")) == []


def test_non_surd_roots_are_tagged():
    roots = extract_algebraic(U("x^3 - 2"))
    assert len(roots) == 1 and isinstance(roots[0], NonSurdRoot)
    assert float(roots[0]) == pytest.approx(2 ** (1 / 3), abs=1e-9)


def test_surd_normalisation():
    a = AlgebraicNumber.surd(0, 4, 1, 8)  # 4*sqrt(8) = 8*sqrt(2)
    assert (a.p, a.q, a.r, a.d) == (0, 8, 1, 2)
    b = AlgebraicNumber.surd(0, 2, 4, 21)
    assert (b.p, b.q, b.r) == (0, 1, 2)
    assert AlgebraicNumber.surd(1, 3, 1, 9).kind == "rational"


@given(st.integers(-20, 20), st.integers(1, 20), st.integers(1, 12), st.integers(2, 40))
def test_surd_is_root_of_its_minimal_polynomial(p, q, r, d):
    a = AlgebraicNumber.surd(p, q, r, d)
    mp = a.minimal_polynomial()
    assert a.is_root_of(mp)
    assert mp.content() == 1
    assert mp.leading_term(MonomialOrder.lex(1))[1] > 0
    if a.kind == "quadratic-surd":
        assert math.gcd(math.gcd(a.p, a.q), a.r) == 1
        assert all(a.d % (k * k) for k in range(2, int(math.isqrt(a.d)) + 1))


def test_square_of_surds():
    assert AlgebraicNumber.surd(0, 1, 2, 10).square() == Fraction(5, 2)
    assert AlgebraicNumber.surd(0, 8, 1, 2).square() == 128
    assert AlgebraicNumber.surd(3, 1, 8, 5).square() is None
