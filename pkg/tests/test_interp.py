from __future__ import annotations

import pytest
from hypothesis import given, settings, strategies as st

from conftest import ALL_PROGRAMS, last_print_criterion, program, scenario_criteria, sdg
from oracles import evaluate
from molslice import fixtures
from molslice.analysis.specialize import specialize
from molslice.gen import random_program
from molslice.interp import (
    NONTERMINATION, OK, RUNTIME_ERROR, RunInput, check_slice, check_statements, edge_mutants, random_inputs, run,
    trace_criterion,
)
from molslice.lang import compile_source, parse, resolve_and_check
from molslice.slicing import analyze, backward_slice, resolve_criterion

TRUCK_INPUTS = RunInput({"pv": 100, "pd": 5475, "ar": 3, "nm": 9})


def ast_of(source: str):
    return resolve_and_check(parse(source))


def run_source(source: str, **inputs):
    return run(compile_source(source), RunInput(inputs))


# -- documented runs -----------------------------------------------------------------------------


def test_constant_print():
    assert run_source("main { print(1+2); }").output == [3]


def test_truck_output():
    trace = run(program("truck.mol"), TRUCK_INPUTS)
    assert trace.status == OK
    assert trace.output == [100, 9, 85]
    # the same value from the arithmetic written out by hand
    assert trace.output[-1] == 100 - 3 * ((7300 - 5475) // 365)


def test_truck_output_agrees_with_tree_walker():
    assert evaluate(ast_of(fixtures.read("truck.mol")), dict(TRUCK_INPUTS.bindings)) == (True, [100, 9, 85])


def test_dispatch_output():
    assert run(program("dispatch.mol"), RunInput({"flag": 1, "x": 10})).output == [10]


def test_criterion_values_of_truck():
    ir = program("truck.mol")
    trace = trace_criterion(ir, resolve_criterion("Truck.residualValue@writes", ir), TRUCK_INPUTS)
    assert list(trace.criterion_values.values()) == [[85]]


def test_unexecuted_criterion_has_no_values():
    ir = compile_source('main { var int a = input("a"); var int b = 0; if (a > 0) { b = 7; } print(b); }')
    c = resolve_criterion("Main.main:5#b", ir)
    assert ir.stmt("Main.main#5").render() == "b = 7"
    assert list(trace_criterion(ir, c, RunInput({"a": 0})).criterion_values.values()) == [[]]
    assert list(trace_criterion(ir, c, RunInput({"a": 1})).criterion_values.values()) == [[7]]


def test_loop_criterion_records_every_iteration():
    ir = compile_source("main { var int i = 0; while (i < 3) { i = i + 1; } print(i); }")
    s = next(s for s in ir.method("Main.main").stmts if s.render() == "i = i + $t2")
    c = resolve_criterion(f"Main.main:{s.index}#i", ir)
    assert list(trace_criterion(ir, c).criterion_values.values()) == [[1, 2, 3]]


# -- semantics -----------------------------------------------------------------------------------------


@pytest.mark.parametrize(
    "source, expected",
    [
        ("main { print(9223372036854775807 + 1); }", [-9223372036854775808]),
        ("main { print(-7 / 2); print(-7 % 2); print(7 / -2); }", [-3, -1, -3]),
        ('main { print("a" + "b"); print("a" == "a"); }', ["ab", True]),
        ("main { var int x; print(x); var bool b; print(b); }", [0, False]),
        ('main { var int x = input("missing"); print(x); }', [0]),
        ("class A { field int f; } main { var A a = new A; print(a.f); }", [0]),
        ("class A { method int g() { return 1; } } class B extends A { method int g() { return 2; } } "
         "main { var A a = new B; print(a.g()); }", [2]),
    ],
)
def test_semantics(source, expected):
    assert run_source(source).output == expected
    assert evaluate(ast_of(source), {}) == (True, expected)


@pytest.mark.parametrize(
    "source, message",
    [
        ("main { var int z = 0; print(1 / z); }", "division by zero"),
        ("main { var int z = 0; print(1 % z); }", "modulo by zero"),
        ("class A { field int f; } main { var A a = null; print(a.f); }", "null"),
        ("class A { field int f; } main { var A a = null; a.f = 1; }", "null"),
        ("class A { method int g() { return 1; } } main { var A a = null; print(a.g()); }", "null"),
    ],
)
def test_runtime_errors(source, message):
    trace = run_source(source)
    assert trace.status == RUNTIME_ERROR and not trace.ok
    assert message in trace.error
    assert evaluate(ast_of(source), {})[0] is False


def test_output_before_error_is_kept():
    trace = run_source("main { print(1); var int z = 0; print(1 / z); }")
    assert trace.output == [1] and trace.status == RUNTIME_ERROR


def test_nontermination():
    ir = compile_source("main { var int i = 0; while (true) { i = i + 1; } }")
    trace = run(ir, RunInput({}, 500))
    assert trace.status == NONTERMINATION
    assert trace.steps <= 500


def test_step_limit_must_be_positive():
    with pytest.raises(ValueError):
        RunInput({}, 0)


@pytest.mark.parametrize("name", ALL_PROGRAMS)
def test_runs_are_deterministic(name):
    ir = program(name)
    for inp in random_inputs(ir, 5, 1):
        assert run(ir, inp) == run(ir, inp)


# -- IR interpreter against the tree-walker ------------------------------------------------------


@pytest.mark.parametrize("name", ALL_PROGRAMS)
def test_interpreter_matches_tree_walker_on_corpus(name):
    source = fixtures.read(name)
    ir, prog = program(name), ast_of(source)
    for inp in random_inputs(ir, 30, 3):
        trace = run(ir, inp)
        assert trace.status != NONTERMINATION
        assert evaluate(prog, dict(inp.bindings)) == (trace.ok, trace.output)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 100_000))
def test_interpreter_matches_tree_walker_on_random_programs(seed):
    source = random_program(seed)
    ir, prog = compile_source(source), ast_of(source)
    for inp in random_inputs(ir, 5, seed):
        trace = run(ir, inp)
        assert evaluate(prog, dict(inp.bindings)) == (trace.ok, trace.output)


# -- random inputs ---------------------------------------------------------------------------------------


def test_random_inputs_are_seeded():
    ir = program("truck.mol")
    assert random_inputs(ir, 10, 4) == random_inputs(ir, 10, 4)
    assert random_inputs(ir, 10, 4) != random_inputs(ir, 10, 5)
    assert all(set(i.bindings) == {"sn", "pv", "pd", "ar", "nm"} for i in random_inputs(ir, 10, 4))


# -- preservation ----------------------------------------------------------------------------------------


@pytest.mark.parametrize("name, criterion, bind", scenario_criteria())
def test_scenario_slices_preserve_values(name, criterion, bind):
    ir = specialize(program(name), None, bind) if bind else program(name)
    verdict = check_slice(ir, criterion, random_inputs(ir, 100, 0))
    assert verdict.passed, verdict.message
    assert verdict.compared > 0


@pytest.mark.parametrize("name", fixtures.small_programs())
def test_small_program_slices_preserve_values(name):
    ir = program(name)
    verdict = check_slice(ir, last_print_criterion(ir), random_inputs(ir, 100, 0), sdg=sdg(name))
    assert verdict.passed, verdict.message


def test_dropping_a_needed_statement_is_caught():
    g = sdg("truck.mol")
    c = resolve_criterion("Truck.residualValue@writes", g.ir)
    full = backward_slice(g, c).statements
    pd_read = next(s.id for s in g.ir.method("Main.main").stmts if s.render() == '$t2 = input("pd")')
    verdict = check_statements(g.ir, c.points, full - {pd_read}, random_inputs(g.ir, 20, 0))
    assert not verdict.passed and verdict.failure == "counterexample" and verdict.counterexamples


def test_unreconstructable_slice_is_reported_separately():
    g = sdg("truck.mol")
    c = resolve_criterion("Truck.residualValue@writes", g.ir)
    verdict = check_statements(g.ir, c.points, set(), random_inputs(g.ir, 5, 0))
    assert not verdict.passed and verdict.failure == "reconstruction"


def test_deleting_a_data_edge_yields_a_counterexample():
    g = sdg("truck.mol")
    c = resolve_criterion("Truck.residualValue@writes", g.ir)
    mutants = edge_mutants(g, c, 20, 0)
    assert mutants
    data = [m for m in mutants if m.edge[2] == "data"]
    assert data
    verdict = check_statements(g.ir, c.points, data[0].statements, random_inputs(g.ir, 100, 0))
    assert not verdict.passed


def test_points_to_soundness_on_random_programs():
    for seed in range(30):
        ir = compile_source(random_program(seed))
        g = analyze(ir)
        for inp in random_inputs(ir, 5, seed):
            for site, target in run(ir, inp).dispatches:
                assert (site, target) in g.cg.edges

