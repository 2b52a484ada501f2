from __future__ import annotations

import json
import random
import shutil

import jsonschema
import pytest
from hypothesis import given, settings

from geodeduce.construction import FreePoint
from geodeduce.dsl import parse_script, run, unparse
from geodeduce.dsl.cli import main
from geodeduce.dsl.runner import corpus_selftest, format_selftest, schema
from geodeduce.errors import ConfigurationError, ParseError
from geodeduce.prover import RelationQuery

from conftest import CORPUS, PROBLEMS, corpus_path, corpus_report, corpus_script
from test_construction import affine_programs

HEADER = "A = FreePoint()\nB = FreePoint()\n"


def parse_error(text) -> ParseError:
    with pytest.raises(ParseError) as exc:
        parse_script(text)
    return exc.value


# parsing ----------------------------------------------------------------------------

def test_problem6_script_shape():
    s = corpus_script("problem06")
    free = [st for st in s.program if isinstance(st, FreePoint)]
    assert len(free) == 2
    assert len(s.program) - len(free) == 11
    assert len(s.queries) == 1 and isinstance(s.queries[0], RelationQuery)
    assert s.problem_id == "problem06"


def test_arity_error_position():
    err = parse_error(HEADER + "X = Midpoint(A)\n")
    assert err.line == 3
    assert "takes 2 arguments, got 1" in err.message


@pytest.mark.parametrize("line,fragment", [
    ("X = Frob(A, B)", "unknown command"),
    ("X = Midpoint(A, Q)", "undefined label 'Q'"),
    ("A = Midpoint(A, B)", "duplicate label 'A'"),
    ("X = Midpoint(A, B", None),
    ("X = Dilate(A, 1/0, B)", None),
    ("? Relation(A, B)", None),
    ("C = Intersect(A, B)", None),
])
def test_errors_carry_positions(line, fragment):
    err = parse_error(HEADER + line)
    assert err.line == 3
    assert err.column >= 1
    if fragment:
        assert fragment in err.message


def test_hints_metadata_and_comments():
    s = parse_script("#! id: demo\n# a comment\nA = FreePoint() @ (1, -2.5)  # trailing\n"
                     "B = FreePoint() near (3, 4)\ns = Segment(A, B)\nP = 4*s\n? Relation(s, P)\n")
    assert s.problem_id == "demo"
    assert s.program.step("A").hint == (1.0, -2.5)
    assert s.program.step("B").hint == (3.0, 4.0)


def test_surd_targets_parse():
    s = corpus_script("problem58")
    assert s.queries[0].condition.target.to_text() == "5/2"
    assert s.queries[1].condition.target.to_text() == "1/2*sqrt(3)"


def test_invalid_utf8_is_a_parse_error():
    err = parse_error(b"A = FreePoint()\nB = \xff\n")
    assert (err.line, err.column) == (2, 5)


@pytest.mark.parametrize("name", PROBLEMS)
def test_round_trip_corpus(name):
    s = corpus_script(name)
    again = parse_script(unparse(s))
    assert again.program == s.program
    assert again.queries == s.queries
    assert parse_script(unparse(again)).program == s.program


@settings(max_examples=60, deadline=None)
@given(affine_programs())
def test_round_trip_generated_programs(program):
    text = unparse(program)
    assert parse_script(text).program == program


# fuzzing ----------------------------------------------------------------------------

VOCAB = ["A", "B", "C", "P", "s", "t", "=", "(", ")", ",", "@", "near", "?", "*", "/", "+", "-",
         "FreePoint", "Midpoint", "Reflect", "Dilate", "Line", "Circle", "Intersect", "Square",
         "Segment", "PointOn", "EquilateralVertex", "PerpendicularLine", "PerpendicularBisector",
         "Relation", "Locus", "Collinear", "RatioEq", "LengthEq", "sqrt", "Evaluate", "IntersectLoci",
         "1", "0", "2.5", "1e3", "8/11", "#", "#!", "\n", " ", "\t", "'", "é", "∞"]


def _fuzz_inputs(count: int, seed: int = 1234):
    rng = random.Random(seed)
    corpus = [p.read_text(encoding="utf-8") for p in sorted(CORPUS.glob("*.gcs"))]
    for i in range(count):
        mode = i % 4
        if mode == 0:
            yield bytes(rng.randrange(256) for _ in range(rng.randint(0, 80)))
        elif mode == 1:
            yield " ".join(rng.choice(VOCAB) for _ in range(rng.randint(0, 30)))
        elif mode == 2:
            text = list(rng.choice(corpus))
            for _ in range(rng.randint(1, 5)):
                pos = rng.randrange(len(text))
                op = rng.random()
                if op < 0.4:
                    del text[pos]
                elif op < 0.8:
                    text.insert(pos, rng.choice(VOCAB))
                else:
                    text[pos] = chr(rng.randrange(32, 0x3000))
            yield "".join(text)
        else:
            lines = rng.choice(corpus).splitlines()
            rng.shuffle(lines)
            yield "\n".join(lines[: rng.randint(0, len(lines))])


def test_parser_fuzz_ten_thousand_inputs():
    parsed = errors = 0
    for text in _fuzz_inputs(10_000):
        try:
            parse_script(text)
            parsed += 1
        except ParseError as exc:
            assert exc.line >= 1 and exc.column >= 1, (text, exc)
            errors += 1
    assert parsed + errors == 10_000
    assert parsed > 0 and errors > 0


# running ------------------------------------------------------------------------------

def test_report_text_lines():
    assert corpus_report("problem06").text().splitlines()[0] == "P = (8*sqrt(2)) * s"
    assert corpus_report("problem47").text().splitlines()[0] == "j = (4/7*sqrt(21)) * i"


@pytest.mark.parametrize("name", PROBLEMS)
def test_reports_validate_against_schema(name):
    record = json.loads(corpus_report(name).to_json())
    jsonschema.validate(record, schema())


def _strip_timing(obj):
    if isinstance(obj, dict):
        return {k: _strip_timing(v) for k, v in obj.items() if k not in ("elapsed", "seconds")}
    if isinstance(obj, list):
        return [_strip_timing(v) for v in obj]
    return obj


@pytest.mark.parametrize("name", ["problem06", "problem25"])
def test_reports_are_deterministic(name):
    a = run(corpus_script(name), seed=2).as_record()
    b = run(corpus_script(name), seed=2).as_record()
    assert _strip_timing(a) == _strip_timing(b)


def test_relation_record_fields():
    (rec,) = corpus_report("problem15").as_record()["results"]
    assert rec["ratio"] == {"kind": "quadratic-surd", "p": 0, "q": 1, "r": 2, "d": 10}
    assert rec["minimal_polynomial"] == "2*m^2 - 5"
    assert rec["ratio_squared"] == "5/2"
    assert {"candidates", "witness", "stats"} <= set(rec)


# command line -------------------------------------------------------------------------

def test_cli_solve_text_and_json(capsys):
    assert main(["solve", str(corpus_path("problem06"))]) == 0
    assert capsys.readouterr().out.splitlines()[0] == "P = (8*sqrt(2)) * s"
    assert main(["solve", str(corpus_path("problem23")), "--json", "--seed", "3"]) == 0
    record = json.loads(capsys.readouterr().out)
    assert record["seed"] == 3
    assert record["results"][0]["ratio_text"] == "253/34"


def test_cli_solve_one_pin(capsys):
    assert main(["solve", str(corpus_path("problem47")), "--no-pin-second"]) == 0
    assert "4/7*sqrt(21)" in capsys.readouterr().out


def test_cli_parse_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.gcs"
    bad.write_text(HEADER + "X = Midpoint(A)\n")
    assert main(["solve", str(bad)]) == 2
    assert "3:15: Midpoint takes 2 arguments, got 1" in capsys.readouterr().err


def test_cli_engine_error_exit_code(tmp_path, capsys):
    prog = tmp_path / "free.gcs"
    prog.write_text(HEADER + "Q = FreePoint()\ns = Segment(A, B)\nt = Segment(A, Q)\n? Relation(s, t)\n")
    assert main(["solve", str(prog)]) == 3
    assert "NotConstantRelation" in capsys.readouterr().err
    assert main(["solve", str(tmp_path / "missing.gcs")]) == 3


def test_cli_locus_emits_five_points(tmp_path, capsys):
    out = tmp_path / "p25.csv"
    assert main(["locus", str(corpus_path("problem25")), "--emit-points", str(out)]) == 0
    rows = out.read_text().splitlines()
    assert rows == ["0,0", "0.0954915028125,0", "0.25,0", "0.654508497187,0", "1,0"]


def test_cli_locus_region_filter(tmp_path, capsys):
    out = tmp_path / "p25.csv"
    assert main(["locus", str(corpus_path("problem25")), "--emit-points", str(out),
                 "--region", "0.1,-1,0.9,1"]) == 0
    assert out.read_text().splitlines() == ["0.25,0", "0.654508497187,0"]


def test_cli_rejects_bad_region():
    with pytest.raises(SystemExit):
        main(["locus", str(corpus_path("problem25")), "--emit-points", "x.csv", "--region", "1,1,0,0"])


# corpus self-test ------------------------------------------------------------------------

def test_selftest_passes_on_bundled_corpus(capsys):
    assert main(["selftest"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 1 + 6
    assert all(line.rstrip().endswith("ok") for line in lines[1:])


@pytest.fixture
def corpus_copy(tmp_path):
    dest = tmp_path / "corpus"
    shutil.copytree(CORPUS, dest, ignore=shutil.ignore_patterns("problem25*", "problem58*", "__pycache__"))
    return dest


def test_selftest_flags_wrong_expected_value(corpus_copy, capsys):
    path = corpus_copy / "problem23.expected.json"
    data = json.loads(path.read_text())
    data["answers"][0]["ratio_text"] = "254/34"
    data["answers"][0]["ratio"]["p"] = 127
    data["answers"][0]["ratio"]["r"] = 17
    path.write_text(json.dumps(data))
    assert main(["selftest", "--corpus", str(corpus_copy)]) == 1
    out = capsys.readouterr().out
    row = next(line for line in out.splitlines() if line.startswith("problem23"))
    assert "MISMATCH" in row


def test_selftest_corrupted_expected_file(corpus_copy, capsys):
    path = corpus_copy / "problem06.expected.json"
    path.write_text("{not json")
    with pytest.raises(ConfigurationError, match="problem06.expected.json"):
        corpus_selftest(corpus_copy)
    assert main(["selftest", "--corpus", str(corpus_copy)]) == 3
    assert "problem06.expected.json" in capsys.readouterr().err


def test_selftest_missing_expected_file(corpus_copy):
    (corpus_copy / "problem15.expected.json").unlink()
    with pytest.raises(ConfigurationError, match="missing"):
        corpus_selftest(corpus_copy)


def test_selftest_missing_directory(tmp_path):
    with pytest.raises(ConfigurationError):
        corpus_selftest(tmp_path / "nope")


def test_selftest_table_format():
    rows = corpus_selftest(CORPUS)
    assert [r.problem for r in rows] == sorted(r.problem for r in rows)
    table = format_selftest(rows).splitlines()
    assert table[0].split() == ["problem", "expected", "got", "time", "status"]
