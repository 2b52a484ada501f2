"""Script language, runner and command line."""

from .parser import EvaluateQuery, IntersectQuery, Script, parse_script, unparse
from .runner import RunReport, corpus_selftest, run

__all__ = [
    "EvaluateQuery", "IntersectQuery", "Script", "parse_script", "unparse",
    "RunReport", "corpus_selftest", "run",
]
