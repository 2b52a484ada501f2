"""Construction steps and the program (a DAG of labelled steps)."""

from __future__ import annotations

from dataclasses import dataclass, field, fields
from fractions import Fraction
from typing import ClassVar, Iterator

from ..errors import ConstructionError

Hint = tuple[float, float]

POINT, LINE, CIRCLE, LENGTH, NUMBER = "point", "line", "circle", "length", "number"


@dataclass(frozen=True)
class Step:
    label: str
    # names of fields that reference earlier labels, with the kinds they accept
    refs: ClassVar[tuple[tuple[str, tuple[str, ...]], ...]] = ()
    produces: ClassVar[str] = POINT
    branching: ClassVar[bool] = False

    @property
    def outputs(self) -> tuple[str, ...]:
        return (self.label,)

    @property
    def inputs(self) -> tuple[str, ...]:
        return tuple(getattr(self, name) for name, _ in self.refs)


@dataclass(frozen=True)
class FreePoint(Step):
    hint: Hint | None = None


@dataclass(frozen=True)
class PointOnLine(Step):
    """A point with one degree of freedom along a line (a traced point on a path)."""

    line: str = ""
    hint: Hint | None = None
    refs = (("line", (LINE,)),)


@dataclass(frozen=True)
class Midpoint(Step):
    p: str = ""
    q: str = ""
    refs = (("p", (POINT,)), ("q", (POINT,)))


@dataclass(frozen=True)
class ReflectPoint(Step):
    p: str = ""
    center: str = ""
    refs = (("p", (POINT,)), ("center", (POINT,)))


@dataclass(frozen=True)
class ReflectAboutLine(Step):
    p: str = ""
    line: str = ""
    refs = (("p", (POINT,)), ("line", (LINE,)))


@dataclass(frozen=True)
class Dilate(Step):
    p: str = ""
    factor: Fraction = Fraction(1)
    center: str = ""
    refs = (("p", (POINT,)), ("center", (POINT,)))


@dataclass(frozen=True)
class LineTwoPoints(Step):
    p: str = ""
    q: str = ""
    refs = (("p", (POINT,)), ("q", (POINT,)))
    produces = LINE


@dataclass(frozen=True)
class PerpendicularBisector(Step):
    p: str = ""
    q: str = ""
    refs = (("p", (POINT,)), ("q", (POINT,)))
    produces = LINE


@dataclass(frozen=True)
class PerpendicularThrough(Step):
    p: str = ""
    line: str = ""
    refs = (("p", (POINT,)), ("line", (LINE,)))
    produces = LINE


@dataclass(frozen=True)
class CircleCenterThrough(Step):
    center: str = ""
    through: str = ""
    refs = (("center", (POINT,)), ("through", (POINT,)))
    produces = CIRCLE


@dataclass(frozen=True)
class IntersectLineLine(Step):
    a: str = ""
    b: str = ""
    hint: Hint | None = None
    refs = (("a", (LINE,)), ("b", (LINE,)))


@dataclass(frozen=True)
class IntersectLineCircle(Step):
    line: str = ""
    circle: str = ""
    hint: Hint | None = None
    refs = (("line", (LINE,)), ("circle", (CIRCLE,)))
    branching = True


@dataclass(frozen=True)
class IntersectCircleCircle(Step):
    a: str = ""
    b: str = ""
    hint: Hint | None = None
    refs = (("a", (CIRCLE,)), ("b", (CIRCLE,)))
    branching = True


@dataclass(frozen=True)
class Square(Step):
    """Counterclockwise square on ``a -> b``; ``label`` is the vertex after ``b``."""

    second: str = ""
    a: str = ""
    b: str = ""
    refs = (("a", (POINT,)), ("b", (POINT,)))

    @property
    def outputs(self) -> tuple[str, ...]:
        return (self.label, self.second)


@dataclass(frozen=True)
class EquilateralVertex(Step):
    a: str = ""
    b: str = ""
    hint: Hint | None = None
    refs = (("a", (POINT,)), ("b", (POINT,)))
    branching = True


@dataclass(frozen=True)
class SegmentLength(Step):
    p: str = ""
    q: str = ""
    refs = (("p", (POINT,)), ("q", (POINT,)))
    produces = LENGTH


@dataclass(frozen=True)
class NumExpr(Step):
    """Rational-linear combination of lengths (or other numbers) plus a constant."""

    terms: tuple[tuple[Fraction, str], ...] = ()
    constant: Fraction = Fraction(0)
    produces = NUMBER

    @property
    def inputs(self) -> tuple[str, ...]:
        return tuple(name for _, name in self.terms)


def intersect_step(label: str, a: str, b: str, kinds: dict[str, str], hint=None) -> Step:
    """Pick the intersection step type from the kinds of its operands."""
    ka, kb = kinds.get(a), kinds.get(b)
    if ka == LINE and kb == LINE:
        return IntersectLineLine(label, a, b, hint)
    if ka == LINE and kb == CIRCLE:
        return IntersectLineCircle(label, a, b, hint)
    if ka == CIRCLE and kb == LINE:
        return IntersectLineCircle(label, b, a, hint)
    if ka == CIRCLE and kb == CIRCLE:
        return IntersectCircleCircle(label, a, b, hint)
    raise ConstructionError(f"cannot intersect {a} ({ka}) with {b} ({kb})")


@dataclass(frozen=True)
class ConstructionProgram:
    steps: tuple[Step, ...] = ()
    kinds: dict[str, str] = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple(self.steps))
        kinds: dict[str, str] = {}
        seen_free = False
        for step in self.steps:
            if isinstance(step, FreePoint):
                seen_free = True
            elif not seen_free:
                raise ConstructionError(f"step {step.label!r} comes before any free point")
            if isinstance(step, NumExpr):
                for _, name in step.terms:
                    if name not in kinds:
                        raise ConstructionError(f"{step.label}: undefined label {name!r}")
                    if kinds[name] not in (LENGTH, NUMBER):
                        raise ConstructionError(f"{step.label}: {name!r} is a {kinds[name]}, not a length")
            for name, accepted in step.refs:
                ref = getattr(step, name)
                if ref not in kinds:
                    raise ConstructionError(f"{step.label}: undefined label {ref!r}")
                if kinds[ref] not in accepted:
                    raise ConstructionError(
                        f"{step.label}: {ref!r} is a {kinds[ref]}, expected {'/'.join(accepted)}"
                    )
            if isinstance(step, Dilate) and not isinstance(step.factor, Fraction):
                raise ConstructionError(f"{step.label}: dilation factor must be an exact rational")
            if step.branching and getattr(step, "hint", None) is None:
                raise ConstructionError(f"{step.label}: branch step needs a hint to pick its solution")
            for out in step.outputs:
                if out in kinds:
                    raise ConstructionError(f"duplicate label {out!r}")
                kinds[out] = step.produces
        object.__setattr__(self, "kinds", kinds)

    def __iter__(self) -> Iterator[Step]:
        return iter(self.steps)

    def __len__(self) -> int:
        return len(self.steps)

    def step(self, label: str) -> Step:
        for s in self.steps:
            if label in s.outputs:
                return s
        raise KeyError(label)

    def free_points(self) -> list[str]:
        return [s.label for s in self.steps if isinstance(s, FreePoint)]

    def points(self) -> list[str]:
        return [k for k, v in self.kinds.items() if v == POINT]


def step_fields(step: Step) -> dict:
    return {f.name: getattr(step, f.name) for f in fields(step)}
