import functools

import pytest

from separator.cli.corpus import corpus_dir
from separator.cli.manifest import Query, parse
from separator.cli.runner import Environment, declare


@functools.lru_cache(maxsize=None)
def corpus_env(stem: str) -> Environment:
    """Declarations of a bundled manifest, evaluated once per session; queries are skipped."""
    text = (corpus_dir() / f"{stem}.sep").read_text(encoding="utf-8")
    env = Environment()
    for stmt in parse(text).statements:
        if not isinstance(stmt, Query):
            declare(env, stmt)
    return env


@functools.lru_cache(maxsize=None)
def corpus_report(stem: str, scheme: str = "T"):
    from separator.scheme import separator_check

    return separator_check(corpus_env(stem).schemes[scheme])


@functools.lru_cache(maxsize=None)
def corpus_closure(stem: str, scheme: str = "T"):
    r = corpus_report(stem, scheme)
    if r.closure is not None:
        return r.closure
    from separator.scheme import diagonal_closure

    return diagonal_closure(corpus_env(stem).schemes[scheme])


@pytest.fixture
def env():
    return corpus_env


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
