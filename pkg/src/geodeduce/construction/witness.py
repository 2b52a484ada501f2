"""Floating-point realization of a construction, used to pick branches and roots."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

from ..errors import DegeneracyError
from . import geometry as g
from .compiler import AlgebraicModel, PIN_ORIGIN, PIN_UNIT
from .steps import (
    CircleCenterThrough,
    ConstructionProgram,
    Dilate,
    EquilateralVertex,
    FreePoint,
    IntersectCircleCircle,
    IntersectLineCircle,
    IntersectLineLine,
    LineTwoPoints,
    Midpoint,
    NumExpr,
    PerpendicularBisector,
    PerpendicularThrough,
    PointOnLine,
    ReflectAboutLine,
    ReflectPoint,
    SegmentLength,
    Square,
)

FPoint = tuple[float, float]
MAX_ATTEMPTS = 10
_EPS = 1e-12


class _Degenerate(Exception):
    def __init__(self, step: str, why: str):
        super().__init__(why)
        self.step = step
        self.why = why


@dataclass(frozen=True)
class Witness:
    points: dict[str, FPoint]
    lengths: dict[str, float]
    numbers: dict[str, float]
    seed: int
    # label -> (chosen candidate, rejected candidate or None)
    branches: dict[str, tuple[FPoint, FPoint | None]] = field(default_factory=dict)
    attempts: int = 1

    def value(self, label: str) -> float:
        if label in self.lengths:
            return self.lengths[label]
        return self.numbers[label]

    def assignment(self, model: AlgebraicModel, extra: dict[str, float] | None = None) -> list[float]:
        """Values for the model's variables, in order (extras default to nan)."""
        extra = extra or {}
        out = []
        for name in model.variables:
            if name in extra:
                out.append(extra[name])
            elif name in self.lengths:
                out.append(self.lengths[name])
            elif name.endswith((".x", ".y")):
                label, axis = name[:-2], name[-1]
                out.append(self.points[label][0 if axis == "x" else 1])
            else:
                out.append(math.nan)
        return out

    def residuals(self, model: AlgebraicModel) -> list[float]:
        values = self.assignment(model)
        return [float(c.eval(values)) for c in model.constraints]


def _random_coord(rng: random.Random) -> float:
    # rationals in [-10, 10] with denominator 100
    return float(Fraction(rng.randint(-1000, 1000), 100))


def _nearest(cands: list[FPoint], hint) -> tuple[FPoint, FPoint | None]:
    if len(cands) == 1:
        return cands[0], None
    a, b = cands
    if hint is None:
        return a, b
    if math.dist(a, hint) <= math.dist(b, hint):
        return a, b
    return b, a


def _line_dir(line, label) -> tuple[FPoint, FPoint]:
    p, q = line
    d = g.sub(q, p)
    if math.hypot(*d) < _EPS * (1 + math.hypot(*p)):
        raise _Degenerate(label, "line through coincident points")
    return p, d


def _forward(program: ConstructionProgram, rng: random.Random, pins: dict[str, tuple], tol: float) -> tuple:
    pts: dict[str, FPoint] = {}
    lines: dict[str, tuple[FPoint, FPoint]] = {}
    circles: dict[str, tuple[FPoint, float]] = {}
    lengths: dict[str, float] = {}
    numbers: dict[str, float] = {}
    branches: dict[str, tuple[FPoint, FPoint | None]] = {}

    for step in program:
        label = step.label
        if isinstance(step, FreePoint):
            if label in pins:
                pts[label] = tuple(float(c) for c in pins[label])
            elif step.hint is not None:
                pts[label] = (float(step.hint[0]), float(step.hint[1]))
            else:
                pts[label] = (_random_coord(rng), _random_coord(rng))
        elif isinstance(step, Midpoint):
            pts[label] = g.midpoint(pts[step.p], pts[step.q])
        elif isinstance(step, ReflectPoint):
            pts[label] = g.reflect_point(pts[step.p], pts[step.center])
        elif isinstance(step, Dilate):
            pts[label] = g.dilate(pts[step.p], float(step.factor), pts[step.center])
        elif isinstance(step, Square):
            c, d = g.square_vertices(pts[step.a], pts[step.b])
            pts[label], pts[step.second] = c, d
        elif isinstance(step, LineTwoPoints):
            lines[label] = (pts[step.p], pts[step.q])
            _line_dir(lines[label], label)
        elif isinstance(step, PerpendicularBisector):
            lines[label] = g.perpendicular_bisector(pts[step.p], pts[step.q])
            _line_dir(lines[label], label)
        elif isinstance(step, PerpendicularThrough):
            lines[label] = g.perpendicular_through(pts[step.p], lines[step.line])
        elif isinstance(step, CircleCenterThrough):
            c = pts[step.center]
            circles[label] = (c, math.dist(c, pts[step.through]))
        elif isinstance(step, SegmentLength):
            lengths[label] = math.dist(pts[step.p], pts[step.q])
        elif isinstance(step, NumExpr):
            total = float(step.constant)
            for coef, name in step.terms:
                total += float(coef) * (lengths[name] if name in lengths else numbers[name])
            numbers[label] = total
        elif isinstance(step, PointOnLine):
            p, d = _line_dir(lines[step.line], label)
            target = pins.get(label, step.hint)
            if target is not None:
                # project the requested position onto the line
                t = g.dot(g.sub(tuple(map(float, target)), p), d) / g.dot(d, d)
            else:
                t = rng.uniform(-2.0, 2.0)
            pts[label] = g.add(p, g.scale(t, d))
        elif isinstance(step, ReflectAboutLine):
            p, d = _line_dir(lines[step.line], label)
            P = pts[step.p]
            t = g.dot(g.sub(P, p), d) / g.dot(d, d)
            foot = g.add(p, g.scale(t, d))
            pts[label] = g.reflect_point(P, foot)
        elif isinstance(step, IntersectLineLine):
            p1, d1 = _line_dir(lines[step.a], label)
            p2, d2 = _line_dir(lines[step.b], label)
            den = g.cross(d1, d2)
            if abs(den) < tol * math.hypot(*d1) * math.hypot(*d2):
                raise _Degenerate(label, "parallel lines")
            t = g.cross(g.sub(p2, p1), d2) / den
            pts[label] = g.add(p1, g.scale(t, d1))
        elif isinstance(step, IntersectLineCircle):
            p, d = _line_dir(lines[step.line], label)
            c, r = circles[step.circle]
            f = g.sub(p, c)
            a, b, cc = g.dot(d, d), 2 * g.dot(f, d), g.dot(f, f) - r * r
            disc = b * b - 4 * a * cc
            if disc < -tol * (b * b + abs(4 * a * cc) + 1e-300):
                raise _Degenerate(label, "line misses circle")
            root = math.sqrt(max(disc, 0.0))
            cands = [g.add(p, g.scale((-b + s * root) / (2 * a), d)) for s in (-1, 1)]
            branches[label] = _nearest(cands, step.hint)
            pts[label] = branches[label][0]
        elif isinstance(step, IntersectCircleCircle):
            (c1, r1), (c2, r2) = circles[step.a], circles[step.b]
            dist = math.dist(c1, c2)
            if dist < _EPS * (1 + r1 + r2):
                raise _Degenerate(label, "concentric circles")
            a = (r1 * r1 - r2 * r2 + dist * dist) / (2 * dist)
            h2 = r1 * r1 - a * a
            if h2 < -tol * (r1 * r1 + 1e-300):
                raise _Degenerate(label, "circles do not meet")
            h = math.sqrt(max(h2, 0.0))
            u = g.scale(1 / dist, g.sub(c2, c1))
            base = g.add(c1, g.scale(a, u))
            cands = [g.add(base, g.scale(s * h, g.perp(u))) for s in (1, -1)]
            branches[label] = _nearest(cands, step.hint)
            pts[label] = branches[label][0]
        elif isinstance(step, EquilateralVertex):
            a, b = pts[step.a], pts[step.b]
            if math.dist(a, b) < _EPS:
                raise _Degenerate(label, "coincident base points")
            m = g.midpoint(a, b)
            n = g.perp(g.sub(b, a))
            k = math.sqrt(3) / 2
            cands = [g.add(m, g.scale(k, n)), g.sub(m, g.scale(k, n))]
            branches[label] = _nearest(cands, step.hint)
            pts[label] = branches[label][0]
        else:  # pragma: no cover
            raise DegeneracyError(f"unsupported step {type(step).__name__}", label)
    return pts, lengths, numbers, branches


def pin_targets(program: ConstructionProgram, pin: int, exclude=()) -> dict[str, tuple]:
    free = [p for p in program.free_points() if p not in exclude]
    return dict(zip(free, [PIN_ORIGIN, PIN_UNIT][:pin]))


def numeric_witness(
    program: ConstructionProgram,
    seed: int = 0,
    tol: float = 1e-9,
    pin: int = 0,
    exclude_from_pin=(),
    overrides: dict[str, FPoint] | None = None,
) -> Witness:
    """Evaluate the construction in floats.

    Free points (and points on lines) use ``overrides``, then pins (``pin`` = how many of the first
    free points sit at (0,0) and (1,0)), then hints, then seeded random
    rationals.  Degenerate samples (parallel lines, missed intersections at
    relative tolerance ``tol``) are redrawn up to ten times.
    """
    rng = random.Random(seed)
    pins = pin_targets(program, pin, exclude_from_pin)
    pins.update(overrides or {})
    last: _Degenerate | None = None
    for attempt in range(1, MAX_ATTEMPTS + 1):
        try:
            pts, lengths, numbers, branches = _forward(program, rng, pins, tol)
        except _Degenerate as exc:
            last = exc
            continue
        return Witness(pts, lengths, numbers, seed, branches, attempt)
    raise DegeneracyError(f"degenerate construction at {last.step}: {last.why}", last.step)
