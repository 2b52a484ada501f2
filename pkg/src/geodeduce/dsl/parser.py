"""Line-oriented construction scripts (``.gcs``).

::

    #! id: problem06
    A = FreePoint()
    C, D = Square(A, B)
    O = Intersect(c, g) near (0.84, -2.63)
    P = 4*t
    ? Relation(s, P)
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction

from ..construction.steps import (
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
)
from ..errors import ConstructionError, ParseError
from ..exactmath import AlgebraicNumber
from ..locus import Collinear, LengthEq, LocusQuery, RatioEq
from ..prover import LengthExpr, RelationQuery

_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r\f\v]+)
  | (?P<number>\d+(?:\.\d*)?(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z][A-Za-z0-9_']*)
  | (?P<punct>[()=,@?*/+\-])
    """,
    re.VERBOSE,
)

# command -> argument kinds; "number" is an exact rational literal
COMMANDS: dict[str, tuple[str, ...]] = {
    "FreePoint": (),
    "Midpoint": (POINT, POINT),
    "Reflect": (POINT, "point|line"),
    "Dilate": (POINT, NUMBER, POINT),
    "Line": (POINT, POINT),
    "PerpendicularBisector": (POINT, POINT),
    "PerpendicularLine": (POINT, LINE),
    "Circle": (POINT, POINT),
    "Intersect": ("line|circle", "line|circle"),
    "Square": (POINT, POINT),
    "EquilateralVertex": (POINT, POINT),
    "PointOn": (LINE,),
    "Segment": (POINT, POINT),
}
QUERIES = ("Relation", "Locus", "Evaluate", "IntersectLoci")
CONDITIONS = {"Collinear": 3, "RatioEq": 3, "LengthEq": 2}


@dataclass(frozen=True)
class EvaluateQuery:
    label: str
    traced: str
    point: tuple[float, float]

    def to_text(self) -> str:
        return f"Evaluate({self.label}, {self.traced} @ ({self.point[0]!r}, {self.point[1]!r}))"


@dataclass(frozen=True)
class IntersectQuery:
    """Numeric intersection of the two most recent locus queries inside a box."""

    region: tuple[float, float, float, float]

    def to_text(self) -> str:
        return "IntersectLoci(" + ", ".join(repr(v) for v in self.region) + ")"


@dataclass
class Script:
    source: str
    program: ConstructionProgram
    queries: list = field(default_factory=list)
    metadata: dict[str, str] = field(default_factory=dict)
    step_lines: dict[str, int] = field(default_factory=dict, repr=False)

    @property
    def problem_id(self) -> str | None:
        return self.metadata.get("id")


@dataclass
class _Tok:
    kind: str
    text: str
    col: int


def _tokenize(line: str, lineno: int) -> list[_Tok]:
    toks: list[_Tok] = []
    pos = 0
    while pos < len(line):
        m = _TOKEN.match(line, pos)
        if not m:
            raise ParseError(f"unexpected character {line[pos]!r}", lineno, pos + 1)
        if m.lastgroup != "ws":
            toks.append(_Tok(m.lastgroup, m.group(), pos + 1))
        pos = m.end()
    return toks


class _Line:
    """Cursor over the tokens of one statement."""

    def __init__(self, toks: list[_Tok], lineno: int, width: int):
        self.toks = toks
        self.i = 0
        self.lineno = lineno
        self.width = width

    def peek(self) -> _Tok | None:
        return self.toks[self.i] if self.i < len(self.toks) else None

    def col(self) -> int:
        t = self.peek()
        return t.col if t else self.width + 1

    def fail(self, msg: str, expected=(), col: int | None = None):
        raise ParseError(msg, self.lineno, col if col is not None else self.col(), tuple(expected))

    def take(self, kind: str | None = None, text: str | None = None) -> _Tok:
        t = self.peek()
        want = text if text is not None else kind
        if t is None:
            self.fail("unexpected end of line", [want])
        if (kind and t.kind != kind) or (text is not None and t.text != text):
            self.fail(f"unexpected {t.text!r}", [want])
        self.i += 1
        return t

    def accept(self, text: str) -> bool:
        t = self.peek()
        if t is not None and t.kind in ("punct", "ident") and t.text == text:
            self.i += 1
            return True
        return False

    def at_end(self) -> bool:
        return self.i >= len(self.toks)

    def end(self):
        if not self.at_end():
            self.fail(f"unexpected {self.peek().text!r}", ["end of line"])

    # literals
    def rational(self) -> Fraction:
        neg = self.accept("-")
        t = self.take("number")
        value = Fraction(t.text)
        if self.peek() is not None and self.peek().text == "/" and self._next_is_number():
            self.take(text="/")
            den = self.take("number")
            d = Fraction(den.text)
            if d == 0:
                self.fail("zero denominator", col=den.col)
            value /= d
        return -value if neg else value

    def _next_is_number(self) -> bool:
        return self.i + 1 < len(self.toks) and self.toks[self.i + 1].kind == "number"

    def real(self) -> float:
        neg = self.accept("-")
        t = self.take("number")
        v = float(t.text)
        return -v if neg else v

    def pair(self) -> tuple[float, float]:
        self.take(text="(")
        x = self.real()
        self.take(text=",")
        y = self.real()
        self.take(text=")")
        return (x, y)


def _fmt_num(v: Fraction) -> str:
    return str(v)


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.kinds: dict[str, str] = {}
        self.steps: list[Step] = []
        self.step_lines: dict[str, int] = {}
        self.queries: list = []
        self.metadata: dict[str, str] = {}

    def run(self) -> Script:
        for lineno, raw in enumerate(self.text.split("\n"), start=1):
            stripped = raw.strip()
            if stripped.startswith("#!"):
                key, sep, value = stripped[2:].partition(":")
                if not sep or not key.strip():
                    raise ParseError("metadata must look like '#! key: value'", lineno, 1, ("key: value",))
                self.metadata[key.strip()] = value.strip()
                continue
            body = raw.split("#", 1)[0]
            toks = _tokenize(body, lineno)
            if not toks:
                continue
            cur = _Line(toks, lineno, len(body.rstrip()))
            if toks[0].text == "?":
                self.query(cur)
            else:
                self.statement(cur)
        try:
            program = ConstructionProgram(tuple(self.steps))
        except ConstructionError as exc:
            line = self._line_of(str(exc))
            raise ParseError(str(exc), line, 1) from None
        return Script(self.text, program, self.queries, self.metadata, self.step_lines)

    def _line_of(self, message: str) -> int:
        for label, line in self.step_lines.items():
            if message.startswith(f"{label}:") or f"{label!r}" in message:
                return line
        return 1

    # references
    def ref(self, cur: _Line, accepted: str) -> str:
        t = cur.peek()
        if t is None or t.kind != "ident":
            cur.fail("expected a label", ["label"])
        cur.i += 1
        kind = self.kinds.get(t.text)
        if kind is None:
            cur.fail(f"undefined label {t.text!r}", ["defined label"], col=t.col)
        allowed = accepted.split("|")
        if kind not in allowed:
            cur.fail(f"{t.text!r} is a {kind}, expected {' or '.join(allowed)}", allowed, col=t.col)
        return t.text

    def define(self, cur: _Line, tok: _Tok, kind: str):
        if tok.text in self.kinds:
            cur.fail(f"duplicate label {tok.text!r}", col=tok.col)
        self.kinds[tok.text] = kind
        self.step_lines[tok.text] = cur.lineno

    # statements
    def statement(self, cur: _Line):
        targets = [cur.take("ident")]
        while cur.accept(","):
            targets.append(cur.take("ident"))
        cur.take(text="=")
        t = cur.peek()
        nxt = cur.toks[cur.i + 1] if cur.i + 1 < len(cur.toks) else None
        if t is not None and t.kind == "ident" and nxt is not None and nxt.text == "(" and t.text not in self.kinds:
            self.command(cur, targets)
        else:
            if len(targets) != 1:
                cur.fail("only Square defines two labels", ["Square"], col=targets[1].col)
            terms, const = self.linear(cur, (LENGTH, NUMBER))
            cur.end()
            self.define(cur, targets[0], NUMBER)
            self.steps.append(NumExpr(targets[0].text, tuple(terms), const))

    def linear(self, cur: _Line, kinds) -> tuple[list[tuple[Fraction, str]], Fraction]:
        terms: list[tuple[Fraction, str]] = []
        const = Fraction(0)
        sign = Fraction(1)
        if cur.accept("-"):
            sign = Fraction(-1)
        while True:
            t = cur.peek()
            if t is None:
                cur.fail("expected a term", ["number", "label"])
            if t.kind == "number":
                coef = cur.rational()
                if cur.accept("*"):
                    terms.append((sign * coef, self.ref(cur, "|".join(kinds))))
                else:
                    const += sign * coef
            elif t.kind == "ident":
                name = self.ref(cur, "|".join(kinds))
                coef = Fraction(1)
                if cur.accept("/"):
                    den = cur.rational()
                    if den == 0:
                        cur.fail("division by zero")
                    coef /= den
                terms.append((sign * coef, name))
            else:
                cur.fail(f"unexpected {t.text!r}", ["number", "label"])
            if cur.accept("+"):
                sign = Fraction(1)
            elif cur.accept("-"):
                sign = Fraction(-1)
            else:
                return terms, const

    def command(self, cur: _Line, targets: list[_Tok]):
        name_tok = cur.take("ident")
        name = name_tok.text
        if name not in COMMANDS:
            cur.fail(f"unknown command {name!r}", sorted(COMMANDS), col=name_tok.col)
        kinds = COMMANDS[name]
        cur.take(text="(")
        args: list = []
        for i, kind in enumerate(kinds):
            if i:
                if cur.peek() is not None and cur.peek().text == ")":
                    cur.fail(f"{name} takes {len(kinds)} arguments, got {i}", [","])
                cur.take(text=",")
            args.append(cur.rational() if kind == NUMBER else self.ref(cur, kind))
        t = cur.peek()
        if t is not None and t.text == ",":
            cur.fail(f"{name} takes {len(kinds)} arguments", [")"])
        if t is not None and t.text != ")" and not kinds:
            cur.fail(f"{name} takes no arguments", [")"])
        cur.take(text=")")
        hint = None
        if cur.accept("@") or cur.accept("near"):
            hint = cur.pair()
        cur.end()

        outputs = 2 if name == "Square" else 1
        if len(targets) != outputs:
            cur.fail(f"{name} defines {outputs} label(s), got {len(targets)}", col=targets[0].col)
        label = targets[0].text
        step = self.build(cur, name, label, args, hint, targets)
        for tok in targets:
            self.define(cur, tok, step.produces)
        if step.branching and getattr(step, "hint", None) is None:
            cur.fail(f"{name} has two solutions; add 'near (x, y)' to pick one", ["near"])
        self.steps.append(step)

    def build(self, cur: _Line, name: str, label: str, args: list, hint, targets) -> Step:
        if name == "FreePoint":
            return FreePoint(label, hint)
        if hint is not None and name not in ("Intersect", "EquilateralVertex", "PointOn"):
            cur.fail(f"{name} does not take a hint")
        if name == "Midpoint":
            return Midpoint(label, *args)
        if name == "Reflect":
            if self.kinds[args[1]] == LINE:
                return ReflectAboutLine(label, args[0], args[1])
            return ReflectPoint(label, args[0], args[1])
        if name == "Dilate":
            return Dilate(label, args[0], args[1], args[2])
        if name == "Line":
            return LineTwoPoints(label, *args)
        if name == "PerpendicularBisector":
            return PerpendicularBisector(label, *args)
        if name == "PerpendicularLine":
            return PerpendicularThrough(label, *args)
        if name == "Circle":
            return CircleCenterThrough(label, *args)
        if name == "Intersect":
            a, b = args
            ka, kb = self.kinds[a], self.kinds[b]
            if ka == LINE and kb == LINE:
                return IntersectLineLine(label, a, b, hint)
            if ka == CIRCLE and kb == CIRCLE:
                return IntersectCircleCircle(label, a, b, hint)
            line, circle = (a, b) if ka == LINE else (b, a)
            return IntersectLineCircle(label, line, circle, hint)
        if name == "Square":
            return Square(label, targets[1].text, args[0], args[1])
        if name == "EquilateralVertex":
            return EquilateralVertex(label, args[0], args[1], hint)
        if name == "PointOn":
            return PointOnLine(label, args[0], hint)
        if name == "Segment":
            return SegmentLength(label, *args)
        raise AssertionError(name)  # pragma: no cover

    # queries
    def query(self, cur: _Line):
        cur.take(text="?")
        t = cur.take("ident")
        if t.text not in QUERIES:
            cur.fail(f"unknown query {t.text!r}", QUERIES, col=t.col)
        cur.take(text="(")
        if t.text == "Relation":
            left = self.length_expr(cur)
            cur.take(text=",")
            right = self.length_expr(cur)
            q = RelationQuery(left, right)
        elif t.text == "Locus":
            cond = self.condition(cur)
            cur.take(text=",")
            q = LocusQuery(cond, self.ref(cur, POINT))
        elif t.text == "Evaluate":
            label = self.ref(cur, f"{LENGTH}|{NUMBER}")
            cur.take(text=",")
            traced = self.ref(cur, POINT)
            cur.take(text="@")
            q = EvaluateQuery(label, traced, cur.pair())
        else:
            vals = [cur.real()]
            for _ in range(3):
                cur.take(text=",")
                vals.append(cur.real())
            if vals[0] >= vals[2] or vals[1] >= vals[3]:
                cur.fail("region must be x0, y0, x1, y1 with x0 < x1 and y0 < y1")
            q = IntersectQuery(tuple(vals))
        cur.take(text=")")
        cur.end()
        self.queries.append(q)

    def length_expr(self, cur: _Line) -> LengthExpr:
        start = cur.col()
        terms, const = self.linear(cur, (LENGTH, NUMBER))
        if const:
            cur.fail("relation sides must be combinations of lengths without constants", col=start)
        if not terms:
            cur.fail("empty length expression", ["label"], col=start)
        return LengthExpr(tuple(terms))

    def condition(self, cur: _Line):
        t = cur.take("ident")
        if t.text not in CONDITIONS:
            cur.fail(f"unknown condition {t.text!r}", sorted(CONDITIONS), col=t.col)
        cur.take(text="(")
        if t.text == "Collinear":
            p = self.ref(cur, POINT)
            cur.take(text=",")
            q = self.ref(cur, POINT)
            cur.take(text=",")
            r = self.ref(cur, POINT)
            cond = Collinear(p, q, r)
        else:
            a = self.ref(cur, f"{LENGTH}|{NUMBER}")
            cur.take(text=",")
            b = self.ref(cur, f"{LENGTH}|{NUMBER}")
            if t.text == "RatioEq":
                cur.take(text=",")
                cond = RatioEq(a, b, self.surd(cur))
            else:
                cond = LengthEq(a, b)
        cur.take(text=")")
        return cond

    def surd(self, cur: _Line) -> AlgebraicNumber:
        """``5/2``, ``sqrt(3)/2``, ``4/7*sqrt(21)`` or ``2*sqrt(3)``."""
        coef = Fraction(1)
        t = cur.peek()
        if t is not None and t.kind == "number":
            coef = cur.rational()
            if not cur.accept("*"):
                return AlgebraicNumber.rational(coef)
        t = cur.peek()
        if t is None or t.text != "sqrt":
            cur.fail("expected a rational or a square root", ["number", "sqrt"])
        cur.take("ident")
        cur.take(text="(")
        dt = cur.take("number")
        if not dt.text.isdigit() or int(dt.text) == 0:
            cur.fail("sqrt takes a positive integer", col=dt.col)
        cur.take(text=")")
        if cur.accept("/"):
            den = cur.rational()
            if den == 0:
                cur.fail("zero denominator")
            coef /= den
        return AlgebraicNumber.surd(0, coef.numerator, coef.denominator, int(dt.text))


def parse_script(text: str | bytes) -> Script:
    """Parse a script; any problem raises ``ParseError`` with line and column."""
    if isinstance(text, (bytes, bytearray)):
        raw = bytes(text)
        try:
            text = raw.decode("utf-8")
        except UnicodeDecodeError as exc:
            head = raw[: exc.start]
            line = head.count(b"\n") + 1
            column = exc.start - (head.rfind(b"\n") + 1) + 1
            raise ParseError("script is not valid UTF-8", line, column) from None
    return _Parser(text).run()


def _hint_text(hint, word: str) -> str:
    if hint is None:
        return ""
    return f" {word} ({hint[0]!r}, {hint[1]!r})"


def _linear_text(terms, const=Fraction(0)) -> str:
    parts = []
    for coef, name in terms:
        body = name if abs(coef) == 1 else f"{_fmt_num(abs(coef))}*{name}"
        parts.append(("- " if coef < 0 else "+ ") + body)
    if const or not parts:
        parts.append(("- " if const < 0 else "+ ") + _fmt_num(abs(const)))
    text = " ".join(parts)
    return text[2:] if text.startswith("+ ") else "-" + text[2:]


def unparse_step(step: Step) -> str:
    label = step.label
    if isinstance(step, FreePoint):
        return f"{label} = FreePoint()" + _hint_text(step.hint, "@")
    if isinstance(step, Midpoint):
        return f"{label} = Midpoint({step.p}, {step.q})"
    if isinstance(step, ReflectPoint):
        return f"{label} = Reflect({step.p}, {step.center})"
    if isinstance(step, ReflectAboutLine):
        return f"{label} = Reflect({step.p}, {step.line})"
    if isinstance(step, Dilate):
        return f"{label} = Dilate({step.p}, {_fmt_num(step.factor)}, {step.center})"
    if isinstance(step, LineTwoPoints):
        return f"{label} = Line({step.p}, {step.q})"
    if isinstance(step, PerpendicularBisector):
        return f"{label} = PerpendicularBisector({step.p}, {step.q})"
    if isinstance(step, PerpendicularThrough):
        return f"{label} = PerpendicularLine({step.p}, {step.line})"
    if isinstance(step, CircleCenterThrough):
        return f"{label} = Circle({step.center}, {step.through})"
    if isinstance(step, IntersectLineLine):
        return f"{label} = Intersect({step.a}, {step.b})" + _hint_text(step.hint, "near")
    if isinstance(step, IntersectLineCircle):
        return f"{label} = Intersect({step.line}, {step.circle})" + _hint_text(step.hint, "near")
    if isinstance(step, IntersectCircleCircle):
        return f"{label} = Intersect({step.a}, {step.b})" + _hint_text(step.hint, "near")
    if isinstance(step, Square):
        return f"{label}, {step.second} = Square({step.a}, {step.b})"
    if isinstance(step, EquilateralVertex):
        return f"{label} = EquilateralVertex({step.a}, {step.b})" + _hint_text(step.hint, "near")
    if isinstance(step, PointOnLine):
        return f"{label} = PointOn({step.line})" + _hint_text(step.hint, "near")
    if isinstance(step, SegmentLength):
        return f"{label} = Segment({step.p}, {step.q})"
    if isinstance(step, NumExpr):
        return f"{label} = {_linear_text(step.terms, step.constant)}"
    raise TypeError(f"cannot render {type(step).__name__}")


def unparse_query(q) -> str:
    if isinstance(q, RelationQuery):
        return f"? Relation({_linear_text(q.left.terms)}, {_linear_text(q.right.terms)})"
    return f"? {q.to_text()}"


def unparse(script: Script | ConstructionProgram) -> str:
    """Render a script (or bare program) back to source text."""
    if isinstance(script, ConstructionProgram):
        script = Script("", script)
    lines = [f"#! {k}: {v}" for k, v in script.metadata.items()]
    lines += [unparse_step(s) for s in script.program]
    lines += [unparse_query(q) for q in script.queries]
    return "\n".join(lines) + "\n"
