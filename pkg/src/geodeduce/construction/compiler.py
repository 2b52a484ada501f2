"""Compile a construction program into polynomial constraints over Q."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from ..errors import ConstructionError
from ..exactmath.poly import MultiPoly
from . import geometry as g
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

Point = tuple[MultiPoly, MultiPoly]

# steps whose output gets fresh coordinate variables
IMPLICIT_STEPS = (
    IntersectLineLine,
    IntersectLineCircle,
    IntersectCircleCircle,
    EquilateralVertex,
    ReflectAboutLine,
    PointOnLine,
)

PIN_ORIGIN = (Fraction(0), Fraction(0))
PIN_UNIT = (Fraction(1), Fraction(0))


@dataclass(frozen=True)
class AlgebraicModel:
    """Variables, point coordinates and constraint polynomials (each ``= 0``)."""

    variables: tuple[str, ...]
    points: dict[str, Point]
    explicit: frozenset[str]
    constraints: tuple[MultiPoly, ...]
    origins: tuple[str, ...]
    lengths: dict[str, int]
    numbers: dict[str, MultiPoly]
    lines: dict[str, tuple[Point, Point]] = field(repr=False)
    circles: dict[str, tuple[Point, Point]] = field(repr=False)
    pinned: dict[str, tuple[Fraction, Fraction]]
    # variable indices grouped by the step (or extra symbol) that introduced them
    groups: tuple[tuple[int, ...], ...] = ()

    @property
    def nvars(self) -> int:
        return len(self.variables)

    def index(self, name: str) -> int:
        try:
            return self.variables.index(name)
        except ValueError:
            raise KeyError(f"no variable named {name!r}") from None

    def var(self, name: str) -> MultiPoly:
        return MultiPoly.var(self.index(name), self.nvars)

    @property
    def explicit_coords(self) -> dict[str, Point]:
        return {k: v for k, v in self.points.items() if k in self.explicit}

    def value(self, label: str) -> MultiPoly:
        """Polynomial expression for a length or number label."""
        if label in self.lengths:
            return MultiPoly.var(self.lengths[label], self.nvars)
        if label in self.numbers:
            return self.numbers[label]
        raise KeyError(f"{label!r} is not a length or number")

    def linear(self, terms: Iterable[tuple[Fraction, str]], constant=Fraction(0)) -> MultiPoly:
        out = MultiPoly.constant(constant, self.nvars)
        for coef, name in terms:
            out = out + self.value(name) * coef
        return out

    def length_variables(self) -> list[int]:
        return sorted(self.lengths.values())

    def elimination_stages(self, keep: Iterable[int]) -> list[tuple[int, ...]]:
        """Groups to eliminate one at a time, latest construction step first."""
        keep = set(keep)
        return [grp for grp in reversed(self.groups) if not keep & set(grp)]

    def coordinate_variables(self, label: str) -> tuple[int, int] | None:
        try:
            return self.index(f"{label}.x"), self.index(f"{label}.y")
        except KeyError:
            return None


def _pin_targets(program: ConstructionProgram, pin_first: bool, pin_two_points: bool,
                 exclude: Sequence[str]) -> dict[str, tuple[Fraction, Fraction]]:
    if not pin_first:
        return {}
    free = [p for p in program.free_points() if p not in exclude]
    targets = [PIN_ORIGIN, PIN_UNIT] if pin_two_points else [PIN_ORIGIN]
    return dict(zip(free, targets))


def compile_program(
    program: ConstructionProgram,
    pin_two_points: bool = True,
    *,
    pin_first: bool = True,
    exclude_from_pin: Sequence[str] = (),
    extra: Sequence[str] = (),
) -> AlgebraicModel:
    """Translate ``program`` into an ``AlgebraicModel``.

    Affine steps are evaluated symbolically; intersections, reflections in
    lines, equilateral apexes and points on lines get fresh ``label.x``/``label.y``
    variables with defining constraints.  ``extra`` names are appended to the
    variable list (for query symbols such as ``m``).
    """
    pinned = _pin_targets(program, pin_first, pin_two_points, exclude_from_pin)

    names: list[str] = []
    groups: list[tuple[int, ...]] = []

    def allocate(*new: str):
        groups.append(tuple(range(len(names), len(names) + len(new))))
        names.extend(new)

    for step in program:
        if isinstance(step, FreePoint) and step.label not in pinned:
            allocate(f"{step.label}.x", f"{step.label}.y")
        elif isinstance(step, IMPLICIT_STEPS):
            allocate(f"{step.label}.x", f"{step.label}.y")
        elif isinstance(step, SegmentLength):
            allocate(step.label)
    for name in extra:
        if name in names:
            raise ConstructionError(f"extra variable {name!r} clashes with a program label")
        allocate(name)
    n = len(names)
    index = {name: i for i, name in enumerate(names)}

    def var(name: str) -> MultiPoly:
        return MultiPoly.var(index[name], n)

    def const(c) -> MultiPoly:
        return MultiPoly.constant(c, n)

    points: dict[str, Point] = {}
    explicit: set[str] = set()
    lines: dict[str, tuple[Point, Point]] = {}
    circles: dict[str, tuple[Point, Point]] = {}
    lengths: dict[str, int] = {}
    numbers: dict[str, MultiPoly] = {}
    constraints: list[MultiPoly] = []
    origins: list[str] = []

    def require(poly: MultiPoly, origin: str):
        if not poly.is_zero():
            constraints.append(poly)
            origins.append(origin)

    for step in program:
        label = step.label
        if isinstance(step, FreePoint):
            if label in pinned:
                x, y = pinned[label]
                points[label] = (const(x), const(y))
            else:
                points[label] = (var(f"{label}.x"), var(f"{label}.y"))
            explicit.add(label)
        elif isinstance(step, Midpoint):
            points[label] = g.midpoint(points[step.p], points[step.q])
            explicit.add(label)
        elif isinstance(step, ReflectPoint):
            points[label] = g.reflect_point(points[step.p], points[step.center])
            explicit.add(label)
        elif isinstance(step, Dilate):
            points[label] = g.dilate(points[step.p], step.factor, points[step.center])
            explicit.add(label)
        elif isinstance(step, Square):
            c, d = g.square_vertices(points[step.a], points[step.b])
            points[label], points[step.second] = c, d
            explicit.update((label, step.second))
        elif isinstance(step, LineTwoPoints):
            lines[label] = (points[step.p], points[step.q])
        elif isinstance(step, PerpendicularBisector):
            lines[label] = g.perpendicular_bisector(points[step.p], points[step.q])
        elif isinstance(step, PerpendicularThrough):
            lines[label] = g.perpendicular_through(points[step.p], lines[step.line])
        elif isinstance(step, CircleCenterThrough):
            circles[label] = (points[step.center], points[step.through])
        elif isinstance(step, SegmentLength):
            v = var(label)
            lengths[label] = index[label]
            require(v * v - g.sqdist(points[step.p], points[step.q]), label)
        elif isinstance(step, NumExpr):
            expr = const(step.constant)
            for coef, name in step.terms:
                expr = expr + (var(name) if name in lengths else numbers[name]) * coef
            numbers[label] = expr
        elif isinstance(step, IMPLICIT_STEPS):
            X = (var(f"{label}.x"), var(f"{label}.y"))
            points[label] = X
            for poly in _implicit_constraints(step, X, points, lines, circles):
                require(poly, label)
        else:  # pragma: no cover - every Step subclass is handled above
            raise ConstructionError(f"unsupported step {type(step).__name__}")

    return AlgebraicModel(
        variables=tuple(names),
        points=points,
        explicit=frozenset(explicit),
        constraints=tuple(constraints),
        origins=tuple(origins),
        lengths=lengths,
        numbers=numbers,
        lines=lines,
        circles=circles,
        pinned=pinned,
        groups=tuple(groups),
    )


def _implicit_constraints(step, X, points, lines, circles) -> list[MultiPoly]:
    if isinstance(step, PointOnLine):
        p, q = lines[step.line]
        return [g.det3(p, q, X)]
    if isinstance(step, IntersectLineLine):
        (p1, q1), (p2, q2) = lines[step.a], lines[step.b]
        return [g.det3(p1, q1, X), g.det3(p2, q2, X)]
    if isinstance(step, IntersectLineCircle):
        p, q = lines[step.line]
        c, t = circles[step.circle]
        return [g.det3(p, q, X), g.sqdist(X, c) - g.sqdist(t, c)]
    if isinstance(step, IntersectCircleCircle):
        (c1, t1), (c2, t2) = circles[step.a], circles[step.b]
        on1 = g.sqdist(X, c1) - g.sqdist(t1, c1)
        on2 = g.sqdist(X, c2) - g.sqdist(t2, c2)
        # the difference is the radical axis, linear in X
        return [on1, on1 - on2]
    if isinstance(step, EquilateralVertex):
        a, b = points[step.a], points[step.b]
        to_a = g.sqdist(X, a)
        return [to_a - g.sqdist(a, b), g.sqdist(X, b) - to_a]
    if isinstance(step, ReflectAboutLine):
        p, q = lines[step.line]
        P = points[step.p]
        mid = g.add(P, X)  # twice the midpoint; the determinant is scaled accordingly
        twice_p, twice_q = g.scale(2, p), g.scale(2, q)
        return [g.det3(twice_p, twice_q, mid), g.dot(g.sub(X, P), g.sub(q, p))]
    raise ConstructionError(f"unsupported implicit step {type(step).__name__}")
