from __future__ import annotations

import functools

import pytest

from molslice import fixtures
from molslice.lang import compile_source
from molslice.slicing import analyze

ALL_PROGRAMS = list(fixtures.SCENARIOS) + fixtures.small_programs()


@functools.lru_cache(maxsize=None)
def program(name: str):
    return compile_source(fixtures.read(name))


@functools.lru_cache(maxsize=None)
def sdg(name: str, mode: str = "points-to"):
    return analyze(program(name), mode)


@pytest.fixture
def truck():
    return program("truck.mol")


def scenario_criteria() -> list[tuple[str, str, dict]]:
    """(program, criterion, bindings) for every criterion shipped with the scenarios."""
    import json

    out = []
    for name in fixtures.SCENARIOS:
        for a in json.loads(fixtures.aspect_spec(name))["aspects"]:
            for c in a["criteria"]:
                out.append((name, c, a.get("bind", {})))
    out.append(("dispatch.mol", "Main.main:10#result", {}))
    out.append(("truck.mol", "Truck.yearsSince:ret", {}))
    return out


def last_print_criterion(ir) -> str:
    """Criterion on the operand of the entry method's final print."""
    s = [s for s in ir.method(ir.entry).stmts if s.kind == "print"][-1]
    return f"{s.method}:{s.index}#{s.args[0]}"


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
