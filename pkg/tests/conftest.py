from __future__ import annotations

from functools import lru_cache
from pathlib import Path

import pytest

from geodeduce.dsl import parse_script, run
from geodeduce.dsl.runner import corpus_dir

CORPUS = corpus_dir()
PROBLEMS = ("problem06", "problem15", "problem23", "problem25", "problem47", "problem58")
RELATION_PROBLEMS = ("problem06", "problem15", "problem23", "problem47")


@lru_cache(maxsize=None)
def corpus_script(name: str):
    return parse_script((CORPUS / f"{name}.gcs").read_text(encoding="utf-8"))


@lru_cache(maxsize=None)
def corpus_report(name: str, seed: int = 0):
    return run(corpus_script(name), seed=seed)


@pytest.fixture(params=PROBLEMS)
def problem(request) -> str:
    return request.param


def corpus_path(name: str) -> Path:
    return CORPUS / f"{name}.gcs"


# one PASS/FAIL line per acceptance criterion, printed after the run

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in ACCEPTANCE_LINES:
        terminalreporter.write_line(line)
