from __future__ import annotations

import pytest

from heckemoments.moments import sweep
from heckemoments.weights import weight_make


@pytest.fixture(scope="session")
def weight():
    return weight_make()


@pytest.fixture(scope="session")
def cache_path(tmp_path_factory):
    return str(tmp_path_factory.mktemp("lcache") / "lvalues.jsonl")


@pytest.fixture(scope="session")
def sweeps(weight, cache_path):
    """Central values over the X-ladder, computed once per session."""
    return {X: sweep(X, weight, workers=1, cache=cache_path) for X in (1e3, 1e4, 1e5)}


ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def criterion():
    """Record and print a verdict line for an acceptance criterion."""

    def record(number: int, ok: bool, detail: str) -> bool:
        ACCEPTANCE[number] = (bool(ok), detail)
        print(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
        return bool(ok)

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
