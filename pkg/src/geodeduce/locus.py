"""Implicit locus equations of a traced point, sampling and numeric intersection."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import IO, Iterable, Sequence

import numpy as np

from .construction import ConstructionProgram, compile_program, numeric_witness
from .construction import geometry as g
from .construction.compiler import AlgebraicModel
from .construction.steps import FreePoint, LENGTH, NUMBER, POINT, PointOnLine
from .errors import ConstructionError, DegeneracyError, LocusError, NotRationalSquare
from .exactmath import (
    DEFAULT_BUDGET,
    AlgebraicNumber,
    Factorization,
    GroebnerStats,
    MultiPoly,
    eliminate,
    extract_algebraic,
    factor_univariate,
    real_roots_numeric,
    squarefree_part,
)

NAMES = ("x", "y")
DEFAULT_REGION = (-1.5, -1.5, 2.5, 2.5)
SAMPLE_TOL = 1e-6


@dataclass(frozen=True)
class Collinear:
    p: str
    q: str
    r: str

    def to_text(self) -> str:
        return f"Collinear({self.p}, {self.q}, {self.r})"


@dataclass(frozen=True)
class RatioEq:
    """``a / b == target``; encoded as ``den*a^2 - num*b^2`` where target^2 = num/den."""

    a: str
    b: str
    target: AlgebraicNumber

    def to_text(self) -> str:
        return f"RatioEq({self.a}, {self.b}, {self.target.to_text()})"


@dataclass(frozen=True)
class LengthEq:
    a: str
    b: str

    def to_text(self) -> str:
        return f"LengthEq({self.a}, {self.b})"


LocusCondition = Collinear | RatioEq | LengthEq


@dataclass(frozen=True)
class LocusQuery:
    condition: LocusCondition
    traced: str

    def to_text(self) -> str:
        return f"Locus({self.condition.to_text()}, {self.traced})"


def _check_condition(program: ConstructionProgram, cond) -> None:
    if isinstance(cond, Collinear):
        wanted, labels = (POINT,), (cond.p, cond.q, cond.r)
    else:
        wanted, labels = (LENGTH, NUMBER), (cond.a, cond.b)
    for name in labels:
        kind = program.kinds.get(name)
        if kind is None:
            raise ConstructionError(f"locus condition: undefined label {name!r}")
        if kind not in wanted:
            raise ConstructionError(f"locus condition: {name!r} is a {kind}")


def condition_polynomial(model: AlgebraicModel, cond) -> MultiPoly:
    """The condition as a single polynomial over Q."""
    if isinstance(cond, Collinear):
        return g.det3(model.points[cond.p], model.points[cond.q], model.points[cond.r])
    a, b = model.value(cond.a), model.value(cond.b)
    if isinstance(cond, LengthEq):
        return a * a - b * b
    sq = cond.target.square()
    if sq is None:
        raise NotRationalSquare(f"ratio target {cond.target.to_text()} does not square to a rational")
    return a * a * sq.denominator - b * b * sq.numerator


def condition_holds(witness, cond, tol: float = 1e-7) -> bool:
    """Unsquared check at a float witness (used to drop mirror and sign branches)."""
    if isinstance(cond, Collinear):
        p, q, r = (witness.points[k] for k in (cond.p, cond.q, cond.r))
        scale = max(1.0, math.dist(p, q) * math.dist(p, r))
        return abs(g.det3(p, q, r)) <= tol * scale
    a, b = witness.value(cond.a), witness.value(cond.b)
    target = 1.0 if isinstance(cond, LengthEq) else float(cond.target)
    return abs(a - target * b) <= tol * max(1.0, abs(a), abs(b))


@dataclass(frozen=True)
class LocusResult:
    traced: str
    condition: LocusCondition
    generators: tuple[MultiPoly, ...]
    x_polynomial: MultiPoly | None
    y_polynomial: MultiPoly | None
    # square-free parts: the minimal polynomials of the coordinate values
    x_minimal: MultiPoly | None
    y_minimal: MultiPoly | None
    x_factors: Factorization | None
    y_factors: Factorization | None
    dimension: str
    samples: tuple[tuple[float, float], ...]
    filtered: tuple[tuple[float, float], ...]
    stats: dict = field(default_factory=dict)

    def generator_texts(self) -> list[str]:
        return [p.to_text(NAMES) for p in self.generators]

    def as_record(self) -> dict:
        def factors(fs):
            if fs is None:
                return None
            return {
                "content": str(fs.content),
                "complete": fs.complete,
                "factors": [[f.to_text(NAMES), k] for f, k in fs.factors],
            }

        return {
            "query": f"Locus({self.condition.to_text()}, {self.traced})",
            "traced": self.traced,
            "generators": self.generator_texts(),
            "x_polynomial": None if self.x_polynomial is None else self.x_polynomial.to_text(NAMES),
            "y_polynomial": None if self.y_polynomial is None else self.y_polynomial.to_text(NAMES),
            "x_minimal": None if self.x_minimal is None else self.x_minimal.to_text(NAMES),
            "y_minimal": None if self.y_minimal is None else self.y_minimal.to_text(NAMES),
            "x_factors": factors(self.x_factors),
            "y_factors": factors(self.y_factors),
            "dimension": self.dimension,
            "samples": [list(p) for p in self.samples],
            "filtered_samples": [list(p) for p in self.filtered],
            "stats": dict(self.stats),
        }


def normalized_residual(poly: MultiPoly, point: Sequence[float]) -> float:
    scale = max(abs(c) for c in poly.terms.values())
    return abs(float(poly.eval([float(v) for v in point]))) / float(scale)


def _univariate_part(gens: list[MultiPoly], var: int) -> MultiPoly | None:
    out = eliminate(gens, [var])
    if not out or out[0].is_constant():
        return None
    return out[0]


def _slice_roots(poly: MultiPoly, var: int, value: float) -> list[float]:
    """Real roots in the other coordinate after fixing ``var`` to ``value``."""
    other = 1 - var
    fixed = poly.subs({var: MultiPoly.constant(Fraction(value), 2)})
    if fixed.is_zero():
        return []
    if fixed.is_constant():
        return []
    return real_roots_numeric(fixed.remap({other: 0}, 1), 1e-12)


def _sample(gens, xpoly, ypoly, region, count) -> list[tuple[float, float]]:
    x0, y0, x1, y1 = region
    pts: list[tuple[float, float]] = []
    if xpoly is not None and ypoly is not None:
        # exact where the roots are rational or quadratic surds
        xs = [float(r) for r in extract_algebraic(xpoly.remap({0: 0}, 1), positive=False, tol=1e-12)]
        ys = [float(r) for r in extract_algebraic(ypoly.remap({1: 0}, 1), positive=False, tol=1e-12)]
        pts = [(x, y) for x in xs for y in ys]
    else:
        lead = gens[0]
        for i in range(count):
            x = x0 + (x1 - x0) * (i + 0.5) / count
            pts += [(x, y) for y in _slice_roots(lead, 0, x) if y0 <= y <= y1]
        for i in range(count):
            y = y0 + (y1 - y0) * (i + 0.5) / count
            pts += [(x, y) for x in _slice_roots(lead, 1, y) if x0 <= x <= x1]
    keep = [p for p in pts if all(normalized_residual(q, p) < SAMPLE_TOL for q in gens)]
    return sorted(set(keep))


def _branch_filter(program, cond, traced, pts) -> list[tuple[float, float]]:
    out = []
    for p in pts:
        try:
            w = numeric_witness(program, 0, pin=2, exclude_from_pin=(traced,), overrides={traced: p})
        except DegeneracyError:
            continue
        q = w.points[traced]
        if math.dist(q, p) > 1e-9:
            continue
        if condition_holds(w, cond):
            out.append(p)
    return out


def locus_equation(
    program: ConstructionProgram,
    condition: LocusCondition,
    traced: str,
    region: Sequence[float] = DEFAULT_REGION,
    samples: int = 40,
    budget: int = DEFAULT_BUDGET,
) -> LocusResult:
    """Equations in the traced point's coordinates (x, y) under which ``condition`` holds.

    The first two other free points are pinned to (0,0) and (1,0).  Samples
    satisfy every generator; ``filtered`` keeps those where a hint-guided float
    evaluation satisfies the unsquared condition.
    """
    try:
        step = program.step(traced)
    except KeyError:
        raise LocusError(f"traced label {traced!r} is not defined") from None
    if not isinstance(step, (FreePoint, PointOnLine)):
        raise LocusError(f"traced point {traced!r} must be a free point or a point on a line")
    _check_condition(program, condition)

    model = compile_program(program, True, exclude_from_pin=(traced,))
    xi, yi = model.coordinate_variables(traced)
    polys = list(model.constraints) + [condition_polynomial(model, condition)]
    stats = GroebnerStats()
    gens = eliminate(polys, [xi, yi], budget, stats, stages=model.elimination_stages([xi, yi]))
    gens = [p.remap({xi: 0, yi: 1}, 2) for p in gens]

    if not gens:
        return LocusResult(traced, condition, (), None, None, None, None, None, None, "full-plane", (), (),
                           stats.as_dict())
    if any(p.is_constant() for p in gens):
        return LocusResult(traced, condition, tuple(gens), None, None, None, None, None, None, "empty", (), (),
                           stats.as_dict())

    xpoly = _univariate_part(gens, 0)
    ypoly = _univariate_part(gens, 1)
    xmin = squarefree_part(xpoly).primitive() if xpoly is not None else None
    ymin = squarefree_part(ypoly).primitive() if ypoly is not None else None
    xf = factor_univariate(xmin) if xmin is not None else None
    yf = factor_univariate(ymin) if ymin is not None else None
    dimension = "isolated-points" if xpoly is not None and ypoly is not None else "curve"

    pts = _sample(gens, xmin, ymin, region, samples)
    filtered = _branch_filter(program, condition, traced, pts)
    return LocusResult(
        traced, condition, tuple(gens), xpoly, ypoly, xmin, ymin, xf, yf, dimension,
        tuple(pts), tuple(filtered), stats.as_dict(),
    )


class _FloatPoly:
    """A bivariate polynomial evaluated with numpy over many points at once."""

    def __init__(self, poly: MultiPoly):
        terms = list(poly.terms.items())
        scale = max(abs(c) for _, c in terms)
        self.coef = np.array([float(c / scale) for _, c in terms])
        self.ex = np.array([e[0] for e, _ in terms])
        self.ey = np.array([e[1] for e, _ in terms])

    def __call__(self, x, y):
        return (self.coef * x[:, None] ** self.ex * y[:, None] ** self.ey).sum(axis=1)

    def grad(self, x, y):
        with np.errstate(divide="ignore", invalid="ignore"):
            px = np.where(self.ex > 0, x[:, None] ** np.maximum(self.ex - 1, 0), 0.0)
            py = np.where(self.ey > 0, y[:, None] ** np.maximum(self.ey - 1, 0), 0.0)
        dx = (self.coef * self.ex * px * y[:, None] ** self.ey).sum(axis=1)
        dy = (self.coef * self.ey * py * x[:, None] ** self.ex).sum(axis=1)
        return dx, dy


def _principal(locus) -> MultiPoly:
    gens = locus.generators if isinstance(locus, LocusResult) else [locus]
    if not gens:
        raise LocusError("locus has no equation (condition holds everywhere)")
    return min(gens, key=lambda p: (p.degree(), len(p.terms)))


def intersect_loci_numeric(
    a: LocusResult | MultiPoly,
    b: LocusResult | MultiPoly,
    region: Sequence[float] = (0.0, 0.0, 1.0, 1.0),
    tol: float = 1e-9,
    grid: int = 64,
    max_iter: int = 50,
) -> list[tuple[float, float]]:
    """Common zeros of the two loci inside ``region`` (x0, y0, x1, y1).

    Newton iteration from a ``grid`` x ``grid`` set of seeds; points closer
    than ``10*tol`` are merged.  Each returned point has normalized residual
    below ``tol`` in both equations.
    """
    f, h = _FloatPoly(_principal(a)), _FloatPoly(_principal(b))
    x0, y0, x1, y1 = region
    gx, gy = np.meshgrid(np.linspace(x0, x1, grid), np.linspace(y0, y1, grid))
    x, y = gx.ravel().astype(float), gy.ravel().astype(float)
    alive = np.ones_like(x, dtype=bool)
    ever_regular = False
    for _ in range(max_iter):
        fv, hv = f(x, y), h(x, y)
        fx, fy = f.grad(x, y)
        hx, hy = h.grad(x, y)
        det = fx * hy - fy * hx
        regular = np.abs(det) > 1e-14
        ever_regular = ever_regular or bool(regular.any())
        safe = np.where(regular, det, 1.0)
        dx = np.where(regular, (fv * hy - hv * fy) / safe, 0.0)
        dy = np.where(regular, (hv * fx - fv * hx) / safe, 0.0)
        x, y = x - dx, y - dy
        alive &= np.isfinite(x) & np.isfinite(y)
        x, y = np.where(alive, x, 0.0), np.where(alive, y, 0.0)
    if not ever_regular:
        raise LocusError("no isolated intersection found: Jacobian singular at every seed")
    ok = alive & (np.abs(f(x, y)) < tol) & (np.abs(h(x, y)) < tol)
    margin = 10 * tol
    ok &= (x >= x0 - margin) & (x <= x1 + margin) & (y >= y0 - margin) & (y <= y1 + margin)
    found: list[tuple[float, float]] = []
    for px, py in sorted(zip(x[ok].tolist(), y[ok].tolist())):
        if all(math.dist((px, py), q) > margin for q in found):
            found.append((px, py))
    return sorted(found)


def evaluate_conjecture_length(
    program: ConstructionProgram,
    point: Sequence[float],
    label: str,
    traced: str | None = None,
) -> float:
    """Length (or number) ``label`` with the traced point placed at ``point``.

    The traced point defaults to the last free point; the first two other free
    points sit at (0,0) and (1,0) as in the locus computation.
    """
    if traced is None:
        free = program.free_points()
        if not free:
            raise LocusError("program has no free point to place")
        traced = free[-1]
    w = numeric_witness(program, 0, pin=2, exclude_from_pin=(traced,), overrides={traced: tuple(point)})
    try:
        return w.value(label)
    except KeyError:
        raise LocusError(f"{label!r} is not a length or number") from None


def write_points_csv(points: Iterable[Sequence[float]], out: IO[str]) -> None:
    """One ``x,y`` row per point, 12 significant digits."""
    writer = csv.writer(out, lineterminator="\n")
    for x, y in points:
        writer.writerow([f"{x:.12g}", f"{y:.12g}"])
