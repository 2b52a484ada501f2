"""Relation queries: the exact constant ``c`` with ``right = c * left``."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .construction import ConstructionProgram, compile_program, numeric_witness
from .construction.steps import LENGTH, NUMBER
from .construction.witness import Witness
from .errors import (
    ConstructionError,
    DegeneracyError,
    InconsistencyError,
    NotConstantRelation,
    NotRationalSquare,
)
from .exactmath import (
    DEFAULT_BUDGET,
    AlgebraicNumber,
    GroebnerStats,
    MultiPoly,
    eliminate,
    extract_algebraic,
    squarefree_part,
)

MATCH_TOL = 1e-6
RATIO_VAR = "%m"  # internal names cannot collide with script labels
GUARD_VAR = "%z"


def _fmt_coef(c: Fraction) -> str:
    return str(c)


@dataclass(frozen=True)
class LengthExpr:
    """Rational-linear combination of length or number labels."""

    terms: tuple[tuple[Fraction, str], ...]

    @classmethod
    def of(cls, label: str) -> LengthExpr:
        return cls(((Fraction(1), label),))

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(name for _, name in self.terms)

    def to_text(self) -> str:
        parts = []
        for i, (c, name) in enumerate(self.terms):
            sign = "-" if c < 0 else "+"
            a = abs(c)
            body = name if a == 1 else f"{_fmt_coef(a)}*{name}"
            if i == 0:
                parts.append(body if c > 0 else f"-{body}")
            else:
                parts.append(f" {sign} {body}")
        return "".join(parts) or "0"

    def evaluate(self, witness: Witness) -> float:
        return sum(float(c) * witness.value(name) for c, name in self.terms)


@dataclass(frozen=True)
class RelationQuery:
    left: LengthExpr
    right: LengthExpr

    @classmethod
    def of(cls, left: str, right: str) -> RelationQuery:
        return cls(LengthExpr.of(left), LengthExpr.of(right))

    def validate(self, program: ConstructionProgram):
        for expr in (self.left, self.right):
            if not expr.terms:
                raise ConstructionError("empty length expression in relation query")
            for name in expr.labels:
                kind = program.kinds.get(name)
                if kind is None:
                    raise ConstructionError(f"relation query: undefined label {name!r}")
                if kind not in (LENGTH, NUMBER):
                    raise ConstructionError(f"relation query: {name!r} is a {kind}, not a length")

    def to_text(self) -> str:
        return f"Relation({self.left.to_text()}, {self.right.to_text()})"


@dataclass(frozen=True)
class RelationResult:
    query: RelationQuery
    ratio: AlgebraicNumber
    minimal_polynomial: MultiPoly
    eliminated: MultiPoly
    candidates: tuple
    witness_ratio: float
    match_distance: float
    verdict: str
    witness: Witness = field(repr=False)
    check_ratio: float = math.nan
    stats: dict = field(default_factory=dict)
    guarded: bool = False

    def to_text(self) -> str:
        return f"{self.query.right.to_text()} = ({self.ratio.to_text()}) * {self.query.left.to_text()}"

    def as_record(self) -> dict:
        return {
            "query": self.query.to_text(),
            "text": self.to_text(),
            "minimal_polynomial": self.minimal_polynomial.to_text(["m"]),
            "eliminated_polynomial": self.eliminated.to_text(["m"]),
            "ratio": self.ratio.as_record(),
            "ratio_text": self.ratio.to_text(),
            "ratio_value": float(self.ratio),
            "candidates": [{"text": c.to_text(), "value": float(c), **c.as_record()} for c in self.candidates],
            "verdict": self.verdict,
            "witness": {
                "seed": self.witness.seed,
                "ratio": self.witness_ratio,
                "match_distance": self.match_distance,
                "check_ratio": self.check_ratio,
                "points": {k: list(v) for k, v in self.witness.points.items()},
                "lengths": dict(self.witness.lengths),
            },
            "stats": dict(self.stats),
        }


def _witness_ratio(program, query, seed) -> tuple[Witness, float]:
    # witness in the script's own frame: hints are given there and ratios are
    # similarity-invariant, so no pinning is needed
    w = numeric_witness(program, seed)
    left = query.left.evaluate(w)
    if abs(left) < 1e-12:
        raise DegeneracyError("left expression vanishes at the witness", query.left.to_text())
    return w, query.right.evaluate(w) / left


def _select(candidates: Sequence, value: float) -> tuple[int, float]:
    best, dist = -1, math.inf
    for i, c in enumerate(candidates):
        d = abs(float(c) - value)
        if d < dist:
            best, dist = i, d
    return best, dist


def discover_ratio(
    program: ConstructionProgram,
    query: RelationQuery,
    seed: int = 0,
    pin_two_points: bool = True,
    tol: float = MATCH_TOL,
    budget: int = DEFAULT_BUDGET,
) -> RelationResult:
    """Eliminate everything but ``m`` from the model plus ``m*left - right``.

    The positive real roots of the square-free result are the candidates; the
    one matching the float witness ratio within ``tol`` is the answer.  A second
    witness (``seed + 1``) must agree, else the verdict is ``ambiguous``.
    """
    query.validate(program)
    model = compile_program(program, pin_two_points, extra=(RATIO_VAR, GUARD_VAR))
    mi, zi = model.index(RATIO_VAR), model.index(GUARD_VAR)
    m, z = model.var(RATIO_VAR), model.var(GUARD_VAR)
    left = model.linear(query.left.terms)
    right = model.linear(query.right.terms)
    base = list(model.constraints) + [m * left - right]

    stats = GroebnerStats()
    stages = model.elimination_stages([mi])
    gens = eliminate(base, [mi], budget, stats, stages=stages)
    guarded = False
    if not gens:
        # components where left vanishes leave m free; exclude them
        gens = eliminate(base + [z * left - 1], [mi], budget, stats, stages=stages)
        guarded = True
    if not gens:
        raise NotConstantRelation(
            f"{query.right.to_text()} / {query.left.to_text()} is not constant on this construction"
        )
    poly = gens[0].remap({mi: 0}, 1)
    if poly.is_constant():
        raise InconsistencyError("construction is contradictory: elimination ideal is the unit ideal")
    sqfree = squarefree_part(poly).primitive()

    witness, value = _witness_ratio(program, query, seed)
    candidates = tuple(extract_algebraic(sqfree, positive=value > 0))
    idx, dist = _select(candidates, value)
    if idx < 0 or dist > tol:
        raise InconsistencyError(
            f"witness ratio {value:.12g} matches no root of {sqfree.to_text(['m'])} "
            f"(closest distance {dist:.3g})"
        )
    ratio = candidates[idx]
    verdict = "unique"
    if sum(1 for c in candidates if abs(float(c) - value) <= tol) > 1:
        verdict = "ambiguous"

    _, check = _witness_ratio(program, query, seed + 1)
    idx2, dist2 = _select(candidates, check)
    if idx2 != idx or dist2 > tol:
        verdict = "ambiguous"

    record = stats.as_dict()
    record["variables"] = model.nvars - 2
    record["constraints"] = len(model.constraints)
    return RelationResult(
        query=query,
        ratio=ratio,
        minimal_polynomial=ratio.minimal_polynomial(1, 0),
        eliminated=sqfree,
        candidates=candidates,
        witness_ratio=value,
        match_distance=dist,
        verdict=verdict,
        witness=witness,
        check_ratio=check,
        stats=record,
        guarded=guarded,
    )


def square_ratio(result: RelationResult) -> Fraction:
    """Exact square of the ratio (area ratio of similar figures)."""
    ratio = result.ratio if isinstance(result, RelationResult) else result
    if not isinstance(ratio, AlgebraicNumber):
        raise NotRationalSquare(f"{ratio} is not a rational or quadratic surd")
    sq = ratio.square()
    if sq is None:
        raise NotRationalSquare(f"square of {ratio.to_text()} is irrational")
    return sq
