"""Execute parsed scripts, render reports, and check the bundled corpus."""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any

from ..errors import ConfigurationError
from ..locus import (
    DEFAULT_REGION,
    LocusQuery,
    LocusResult,
    evaluate_conjecture_length,
    intersect_loci_numeric,
    locus_equation,
)
from ..prover import MATCH_TOL, RelationQuery, RelationResult, discover_ratio, square_ratio
from .parser import EvaluateQuery, IntersectQuery, Script, parse_script


@dataclass
class QueryOutcome:
    kind: str
    query: str
    result: Any
    lines: list[str]
    elapsed: float
    extra: dict = field(default_factory=dict)

    def as_record(self) -> dict:
        rec: dict = {"kind": self.kind, "query": self.query, "elapsed": round(self.elapsed, 6)}
        if isinstance(self.result, (RelationResult, LocusResult)):
            rec.update(self.result.as_record())
            rec["query"] = self.query
        rec.update(self.extra)
        rec["text"] = "\n".join(self.lines)
        return rec


@dataclass
class RunReport:
    problem: str | None
    seed: int
    outcomes: list[QueryOutcome]
    elapsed: float

    def text(self) -> str:
        return "\n".join(line for o in self.outcomes for line in o.lines)

    def as_record(self) -> dict:
        return {
            "problem": self.problem,
            "seed": self.seed,
            "elapsed": round(self.elapsed, 6),
            "results": [o.as_record() for o in self.outcomes],
        }

    def to_json(self) -> str:
        return json.dumps(self.as_record(), indent=2)

    def locus_points(self) -> list[tuple[float, float]]:
        pts: list[tuple[float, float]] = []
        for o in self.outcomes:
            if isinstance(o.result, LocusResult):
                pts.extend(o.result.samples)
        return pts


def _relation(script: Script, q: RelationQuery, seed, pin_two_points, tol) -> QueryOutcome:
    t = time.perf_counter()
    r = discover_ratio(script.program, q, seed=seed, pin_two_points=pin_two_points, tol=tol)
    lines = [r.to_text()]
    extra = {}
    sq = r.ratio.square()
    if sq is not None:
        extra["ratio_squared"] = str(square_ratio(r))
    if r.verdict != "unique":
        lines.append(f"  verdict: {r.verdict}")
    if len(r.candidates) > 1:
        others = ", ".join(c.to_text() for c in r.candidates if c != r.ratio)
        lines.append(f"  other roots (degenerate branches): {others}")
    return QueryOutcome("relation", q.to_text(), r, lines, time.perf_counter() - t, extra)


def _factor_text(fs) -> str:
    parts = []
    for f, k in fs.factors:
        body = f.to_text(("x", "y"))
        body = body if len(f.terms) == 1 else f"({body})"
        parts.append(body if k == 1 else f"{body}^{k}")
    return "*".join(parts)


def _locus(script: Script, q: LocusQuery, region) -> QueryOutcome:
    t = time.perf_counter()
    r = locus_equation(script.program, q.condition, q.traced, region=region)
    lines = [f"{q.to_text()}: {r.dimension}"]
    lines += [f"  {g} = 0" for g in r.generator_texts()]
    for axis, poly, fs in (("x", r.x_minimal, r.x_factors), ("y", r.y_minimal, r.y_factors)):
        if poly is not None and poly.degree() > 1:
            lines.append(f"  {axis}: {poly.to_text(('x', 'y'))} = 0, factors {_factor_text(fs)}")
    lines.append(f"  samples: {len(r.samples)} ({len(r.filtered)} on hinted branches)")
    return QueryOutcome("locus", q.to_text(), r, lines, time.perf_counter() - t)


def run(
    script: Script | str,
    seed: int = 0,
    pin_two_points: bool = True,
    tol: float = MATCH_TOL,
    region=None,
) -> RunReport:
    """Run every query of ``script`` in order."""
    if isinstance(script, str):
        script = parse_script(script)
    region = tuple(region) if region is not None else DEFAULT_REGION
    start = time.perf_counter()
    outcomes: list[QueryOutcome] = []
    loci: list[LocusResult] = []
    for q in script.queries:
        if isinstance(q, RelationQuery):
            outcomes.append(_relation(script, q, seed, pin_two_points, tol))
        elif isinstance(q, LocusQuery):
            o = _locus(script, q, region)
            loci.append(o.result)
            outcomes.append(o)
        elif isinstance(q, IntersectQuery):
            t = time.perf_counter()
            if len(loci) < 2:
                raise ConfigurationError("IntersectLoci needs two earlier Locus queries")
            pts = intersect_loci_numeric(loci[-2], loci[-1], q.region)
            lines = [f"{q.to_text()}: {len(pts)} point(s)"] + [f"  ({x:.12g}, {y:.12g})" for x, y in pts]
            outcomes.append(
                QueryOutcome("intersection", q.to_text(), pts, lines, time.perf_counter() - t,
                             {"points": [list(p) for p in pts]})
            )
        elif isinstance(q, EvaluateQuery):
            t = time.perf_counter()
            v = evaluate_conjecture_length(script.program, q.point, q.label, traced=q.traced)
            lines = [f"{q.label} = {v:.12g} at {q.traced} = ({q.point[0]!r}, {q.point[1]!r})"]
            outcomes.append(
                QueryOutcome("evaluate", q.to_text(), v, lines, time.perf_counter() - t, {"value": v})
            )
    return RunReport(script.problem_id, seed, outcomes, time.perf_counter() - start)


def schema() -> dict:
    return json.loads(resources.files("geodeduce.dsl").joinpath("report.schema.json").read_text())


# corpus self-test

def corpus_dir() -> Path:
    return Path(str(resources.files("geodeduce") / "corpus"))


def _load_expected(path: Path) -> dict:
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigurationError(f"missing expected-answer file {path}") from None
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ConfigurationError(f"corrupted expected-answer file {path}: {exc}") from None
    if not isinstance(data, dict) or not isinstance(data.get("answers"), list):
        raise ConfigurationError(f"corrupted expected-answer file {path}: no 'answers' list")
    return data


def _check(expected: dict, outcome: QueryOutcome) -> tuple[bool, str, str]:
    """(ok, expected text, got text) for one answer entry."""
    kind = expected.get("kind")
    if kind != outcome.kind:
        return False, str(kind), outcome.kind
    if kind == "relation":
        r: RelationResult = outcome.result
        want = expected["ratio_text"]
        got = r.ratio.to_text()
        ok = (
            r.ratio.as_record() == expected["ratio"]
            and r.minimal_polynomial.to_text(["m"]) == expected["minimal_polynomial"]
        )
        if "ratio_squared" in expected:
            ok = ok and str(square_ratio(r)) == expected["ratio_squared"]
        return ok, want, got
    if kind == "locus":
        r: LocusResult = outcome.result
        ok = True
        wants, gots = [], []
        for key in ("x_minimal", "y_minimal"):
            if key in expected:
                val = getattr(r, key)
                got_text = None if val is None else val.to_text(("x", "y"))
                ok = ok and got_text == expected[key]
                wants.append(str(expected[key]))
                gots.append(str(got_text))
        if "generators" in expected:
            ok = ok and r.generator_texts() == expected["generators"]
            wants += expected["generators"]
            gots += r.generator_texts()
        return ok, "; ".join(wants), "; ".join(gots)
    if kind == "evaluate":
        v = outcome.result
        tol = float(expected.get("tol", 1e-9))
        return abs(v - float(expected["value"])) <= tol, f"{expected['value']} ± {tol:g}", f"{v:.12g}"
    if kind == "intersection":
        return True, "(reported)", f"{len(outcome.result)} point(s)"
    return False, str(kind), "unknown answer kind"


@dataclass
class SelftestRow:
    problem: str
    ok: bool
    expected: str
    got: str
    elapsed: float


def corpus_selftest(directory: str | Path | None = None, seed: int = 0) -> list[SelftestRow]:
    """Run each ``*.gcs`` in the corpus and compare with its ``.expected.json``."""
    root = Path(directory) if directory is not None else corpus_dir()
    if not root.is_dir():
        raise ConfigurationError(f"corpus directory {root} not found")
    scripts = sorted(root.glob("*.gcs"))
    if not scripts:
        raise ConfigurationError(f"no corpus scripts in {root}")
    rows: list[SelftestRow] = []
    for path in scripts:
        expected = _load_expected(path.with_suffix(".expected.json"))
        script = parse_script(path.read_text(encoding="utf-8"))
        report = run(script, seed=seed)
        ok = True
        wants, gots = [], []
        for entry in expected["answers"]:
            idx = entry.get("query", 0)
            if not isinstance(idx, int) or not 0 <= idx < len(report.outcomes):
                raise ConfigurationError(f"corrupted expected-answer file {path}: bad query index {idx!r}")
            try:
                good, want, got = _check(entry, report.outcomes[idx])
            except (KeyError, TypeError, ValueError) as exc:
                raise ConfigurationError(f"corrupted expected-answer file {path}: {exc!r}") from None
            ok = ok and good
            if entry.get("kind") != "intersection":
                wants.append(want)
                gots.append(got)
        rows.append(SelftestRow(script.problem_id or path.stem, ok, " | ".join(wants), " | ".join(gots),
                                report.elapsed))
    return sorted(rows, key=lambda r: r.problem)


def _clip(text: str, width: int = 48) -> str:
    return text if len(text) <= width else text[: width - 3] + "..."


def format_selftest(rows: list[SelftestRow]) -> str:
    header = ("problem", "expected", "got", "time", "status")
    body = [(r.problem, _clip(r.expected), _clip(r.got), f"{r.elapsed:.2f}s", "ok" if r.ok else "MISMATCH")
            for r in rows]
    widths = [max(len(str(x[i])) for x in [header, *body]) for i in range(5)]
    fmt = "  ".join(f"{{:<{w}}}" for w in widths)
    return "\n".join(fmt.format(*row) for row in [header, *body])
