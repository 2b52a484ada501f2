from __future__ import annotations

import dataclasses
import math
from fractions import Fraction

import pytest

from geodeduce.construction import (
    ConstructionProgram,
    FreePoint,
    LineTwoPoints,
    Midpoint,
    PointOnLine,
    SegmentLength,
)
from geodeduce.errors import ConstructionError, NotConstantRelation, NotRationalSquare
from geodeduce.exactmath import AlgebraicNumber, MultiPoly, extract_algebraic
from geodeduce.prover import LengthExpr, RelationQuery, discover_ratio, square_ratio

from conftest import RELATION_PROBLEMS, corpus_script

EXPECTED = {
    "problem06": (AlgebraicNumber.surd(0, 8, 1, 2), "m^2 - 128"),
    "problem15": (AlgebraicNumber.surd(0, 1, 2, 10), "2*m^2 - 5"),
    "problem23": (AlgebraicNumber.rational(Fraction(253, 34)), "34*m - 253"),
    "problem47": (AlgebraicNumber.surd(0, 4, 7, 21), "7*m^2 - 48"),
}


def solve(name, seed=0, **kw):
    script = corpus_script(name)
    return discover_ratio(script.program, script.queries[0], seed=seed, **kw)


@pytest.mark.parametrize("name", RELATION_PROBLEMS)
def test_corpus_ratios(name):
    r = solve(name)
    ratio, minpoly = EXPECTED[name]
    assert r.ratio == ratio
    assert r.minimal_polynomial.to_text(["m"]) == minpoly
    assert r.verdict == "unique"


@pytest.mark.parametrize("name", RELATION_PROBLEMS)
def test_result_invariants(name):
    r = solve(name)
    assert r.ratio in r.candidates
    assert abs(r.witness_ratio - float(r.ratio)) < 1e-6
    # exactness: the surd is a root of its own minimal polynomial and of the eliminant
    assert r.ratio.is_root_of(r.minimal_polynomial)
    assert r.ratio.is_root_of(r.eliminated)


@pytest.mark.parametrize("name", RELATION_PROBLEMS)
def test_root_containment(name):
    r = solve(name)
    roots = extract_algebraic(r.eliminated, positive=True)
    assert min(abs(float(c) - r.witness_ratio) for c in roots) < 1e-6


@pytest.mark.parametrize("name", RELATION_PROBLEMS)
def test_seed_independence(name):
    results = [solve(name, seed=s) for s in range(5)]
    first = results[0]
    for r in results[1:]:
        assert r.ratio == first.ratio
        assert r.minimal_polynomial == first.minimal_polynomial


@pytest.mark.parametrize("name", RELATION_PROBLEMS)
def test_one_pin_mode_gives_same_answer(name):
    r = solve(name, pin_two_points=False)
    assert r.ratio == EXPECTED[name][0]


@pytest.mark.parametrize("name", ["problem23", "problem47"])
def test_changing_hints_keeps_root(name):
    """Moving the free points (a similarity of the picture) never changes the selected root."""
    script = corpus_script(name)
    steps = []
    for step in script.program:
        if getattr(step, "hint", None) is not None:
            x, y = step.hint
            step = dataclasses.replace(step, hint=(2 * x + 0.3, 2 * y - 0.7))
        steps.append(step)
    moved = ConstructionProgram(steps)
    for seed in range(3):
        r = discover_ratio(moved, script.queries[0], seed=seed)
        assert r.ratio == EXPECTED[name][0]


def test_problem47_reports_degenerate_candidate():
    r = solve("problem47")
    texts = {c.to_text() for c in r.candidates}
    assert "4/7*sqrt(21)" in texts and "2*sqrt(21)" in texts


def test_text_rendering():
    assert solve("problem06").to_text() == "P = (8*sqrt(2)) * s"
    assert solve("problem47").to_text() == "j = (4/7*sqrt(21)) * i"


def test_square_ratio_examples():
    assert square_ratio(solve("problem15")) == Fraction(5, 2)
    assert square_ratio(solve("problem23")) == Fraction(64009, 1156)
    assert square_ratio(solve("problem06")) == 128
    with pytest.raises(NotRationalSquare):
        square_ratio(AlgebraicNumber.surd(1, 1, 2, 5))


def test_not_constant_relation():
    prog = ConstructionProgram([
        FreePoint("A"), FreePoint("B"), FreePoint("Q"),
        SegmentLength("s", "A", "B"), SegmentLength("t", "A", "Q"),
    ])
    with pytest.raises(NotConstantRelation):
        discover_ratio(prog, RelationQuery.of("s", "t"))


def test_midpoint_half_length():
    prog = ConstructionProgram([
        FreePoint("A"), FreePoint("B"), Midpoint("M", "A", "B"),
        SegmentLength("s", "A", "B"), SegmentLength("h", "A", "M"),
    ])
    r = discover_ratio(prog, RelationQuery.of("s", "h"))
    assert r.ratio == AlgebraicNumber.rational(Fraction(1, 2))


def test_relation_through_point_on_line():
    # any point on the perpendicular bisector is equidistant from A and B
    from geodeduce.construction import PerpendicularBisector

    prog = ConstructionProgram([
        FreePoint("A"), FreePoint("B"), PerpendicularBisector("g", "A", "B"),
        PointOnLine("P", "g", (0.5, 2)),
        SegmentLength("a", "P", "A"), SegmentLength("b", "P", "B"),
    ])
    assert discover_ratio(prog, RelationQuery.of("a", "b")).ratio == AlgebraicNumber.rational(1)


def test_query_validation():
    prog = ConstructionProgram([FreePoint("A"), FreePoint("B"), SegmentLength("s", "A", "B"),
                                LineTwoPoints("l", "A", "B")])
    with pytest.raises(ConstructionError, match="undefined"):
        discover_ratio(prog, RelationQuery.of("s", "zz"))
    with pytest.raises(ConstructionError, match="not a length"):
        discover_ratio(prog, RelationQuery.of("s", "l"))


def test_linear_length_expressions():
    prog = ConstructionProgram([
        FreePoint("A"), FreePoint("B"), Midpoint("M", "A", "B"),
        SegmentLength("s", "A", "B"), SegmentLength("h", "A", "M"),
    ])
    q = RelationQuery(LengthExpr(((Fraction(1), "s"), (Fraction(1), "h"))), LengthExpr.of("h"))
    r = discover_ratio(prog, q)
    assert r.ratio == AlgebraicNumber.rational(Fraction(1, 3))
    assert q.to_text() == "Relation(s + h, h)"
    assert r.ratio.is_root_of(MultiPoly.from_text("3*m - 1", ["m"]))
    assert math.isclose(r.witness_ratio, 1 / 3)
