"""Construction programs, their polynomial model and a float witness."""

from .compiler import AlgebraicModel, compile_program
from .steps import (
    CIRCLE,
    LENGTH,
    LINE,
    NUMBER,
    POINT,
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
    Step,
    intersect_step,
)
from .witness import Witness, numeric_witness

compile = compile_program  # noqa: A001 - the natural name for the operation

__all__ = [
    "AlgebraicModel", "compile_program", "Witness", "numeric_witness", "ConstructionProgram", "Step",
    "FreePoint", "PointOnLine", "Midpoint", "ReflectPoint", "ReflectAboutLine", "Dilate",
    "LineTwoPoints", "PerpendicularBisector", "PerpendicularThrough", "CircleCenterThrough",
    "IntersectLineLine", "IntersectLineCircle", "IntersectCircleCircle", "Square",
    "EquilateralVertex", "SegmentLength", "NumExpr", "intersect_step",
    "POINT", "LINE", "CIRCLE", "LENGTH", "NUMBER",
]
