from __future__ import annotations

import pytest
from hypothesis import given, settings, strategies as st

from conftest import ALL_PROGRAMS, program, sdg
from oracles import control_dependence_oracle, immediate_post_dominator, post_dominator_sets, reaching_defs_oracle
from molslice.analysis import (
    ENTRY, EXIT, build_cfg, call_graph, control_dependences, field_data_deps, points_to, post_dominators,
    reaching_defs, specialize,
)
from molslice.analysis.specialize import input_keys
from molslice.errors import SpecError
from molslice.gen import random_program
from molslice.interp import RunInput, random_inputs, run
from molslice.lang import compile_source
from molslice.lang.printer import canonical_listing


def stmt_index(ir, method, text):
    """Index of the first statement of ``method`` whose IR form starts with ``text``."""
    for s in ir.method(method).stmts:
        if s.render().startswith(text):
            return s.index
    raise LookupError(text)


# -- control flow and post-dominance --------------------------------------------------


def test_straight_line_cfg_and_post_dominators():
    ir = compile_source("main { var int a = 1; var int b = a; print(b); }")
    m = ir.method("Main.main")
    cfg = build_cfg(m)
    assert cfg.succs[ENTRY] == (0,)
    following = [*range(1, cfg.size), EXIT]
    assert [cfg.succs[i] for i in range(cfg.size)] == [(n,) for n in following]
    pdom = post_dominators(cfg)
    assert [pdom[i] for i in range(cfg.size)] == following
    assert control_dependences(cfg, pdom) == {(i, ENTRY) for i in range(cfg.size)}


def test_compute_residual_value_is_a_single_path(truck):
    cfg = build_cfg(truck.method("Truck.computeResidualValue"))
    assert all(len(cfg.succs[n]) == 1 for n in range(cfg.size))


def test_while_loop_has_back_edge():
    ir = compile_source("main { var int i = 0; while (i < 3) { i = i + 1; } }")
    m = ir.method("Main.main")
    cfg = build_cfg(m)
    back = [(a, b) for a, b in cfg.edges if a >= 0 and b >= 0 and b < a]
    assert back and all(m.stmts[a].kind == "goto" for a, _ in back)


def test_diamond_post_dominator_is_the_join():
    ir = compile_source("main { var int x = input(\"x\"); var int y = 0; if (x > 0) { y = 1; } else { y = 2; } print(y); }")
    m = ir.method("Main.main")
    pred = next(s.index for s in m.stmts if s.kind == "if-goto")
    join = stmt_index(ir, "Main.main", "print(y)")
    assert post_dominators(build_cfg(m))[pred] == join


def test_dispatch_flag_predicate_post_dominated_by_join():
    ir = program("dispatch.mol")
    m = ir.method("Main.main")
    cfg = build_cfg(m)
    pred = next(s.index for s in m.stmts if s.kind == "if-goto")
    join = stmt_index(ir, "Main.main", "result = jre.execute")
    assert post_dominators(cfg)[pred] == join
    assert immediate_post_dominator(post_dominator_sets(cfg.succs), pred) == join


def test_dispatch_arms_depend_on_flag_predicate():
    ir = program("dispatch.mol")
    m = ir.method("Main.main")
    cfg = build_cfg(m)
    deps = control_dependences(cfg, post_dominators(cfg))
    pred = next(s.index for s in m.stmts if s.kind == "if-goto")
    arms = {stmt_index(ir, "Main.main", "jre = new DisAssembler"), stmt_index(ir, "Main.main", "jre = new Decompiler")}
    assert {d for d, p in deps if p == pred} >= arms
    assert all((a, ENTRY) not in deps for a in arms)


def test_loop_body_depends_on_loop_predicate():
    ir = compile_source("main { var int i = 0; while (i < 3) { i = i + 1; } }")
    m = ir.method("Main.main")
    cfg = build_cfg(m)
    deps = control_dependences(cfg, post_dominators(cfg))
    pred = next(s.index for s in m.stmts if s.kind == "if-goto")
    body = [s.index for s in m.stmts if s.kind == "binop" and s.op == "+"]
    assert all((b, pred) in deps for b in body)


def test_infinite_loop_gets_exit_edge():
    ir = compile_source('main { var int f = input("f"); var int i = 0; while (f == 1) { i = i + 1; } }')
    cfg = build_cfg(specialize(ir, None, {"f": 1}).method("Main.main"))
    assert cfg.augmented
    pdom = post_dominators(cfg)
    assert all(n in pdom for n in range(cfg.size))


def test_early_return_governs_later_statements():
    ir = compile_source(
        "class A { method int f(int x) { if (x > 0) { return 1; } print(x); return 2; } } main { }"
    )
    m = ir.method("A.f")
    ret = next(s.index for s in m.stmts if s.kind == "return")
    plain = build_cfg(m)
    assert plain.succs[ret] == (EXIT,)
    branching = build_cfg(m, returns_branch=True)
    deps = control_dependences(branching, post_dominators(branching))
    printed = next(s.index for s in m.stmts if s.kind == "print")
    assert (printed, ret) in deps


@pytest.mark.parametrize("name", ALL_PROGRAMS)
@pytest.mark.parametrize("returns_branch", [False, True])
def test_control_dependence_matches_path_oracle(name, returns_branch):
    for m in program(name).methods:
        cfg = build_cfg(m, returns_branch)
        assert control_dependences(cfg, post_dominators(cfg)) == control_dependence_oracle(cfg), m.qname


@pytest.mark.parametrize("name", ALL_PROGRAMS)
def test_post_dominators_match_path_oracle(name):
    for m in program(name).methods:
        cfg = build_cfg(m)
        sets = post_dominator_sets(cfg.succs)
        pdom = post_dominators(cfg)
        for n in [ENTRY, *range(cfg.size)]:
            assert pdom[n] == immediate_post_dominator(sets, n)


# -- reaching definitions ------------------------------------------------------------------


def test_single_definition_reaches_use():
    m = compile_source("main { var int x = 1; var int y = x; }").method("Main.main")
    deps = reaching_defs(build_cfg(m), m)
    x_use = next(s.index for s in m.stmts if s.kind == "copy")
    assert {(u, d) for u, d, v in deps if v == "x" and u == x_use} == {(x_use, 0)}


def test_redefinition_kills():
    m = compile_source("main { var int x = 1; x = 2; var int y = x; }").method("Main.main")
    deps = reaching_defs(build_cfg(m), m)
    y_def = next(s.index for s in m.stmts if s.target == "y")
    second = max(s.index for s in m.stmts if s.target == "x")
    assert {d for u, d, v in deps if u == y_def and v == "x"} == {second}


def test_residual_value_write_uses_second_definition(truck):
    m = truck.method("Truck.computeResidualValue")
    deps = reaching_defs(build_cfg(m), m)
    write = next(s.index for s in m.stmts if s.kind == "field-write")
    defs = [s.index for s in m.stmts if s.target == "resValue"]
    assert len(defs) == 2
    assert {d for u, d, v in deps if u == write and v == "resValue"} == {defs[1]}


@pytest.mark.parametrize("name", ALL_PROGRAMS)
def test_reaching_defs_match_round_robin_oracle(name):
    for m in program(name).methods:
        cfg = build_cfg(m)
        assert reaching_defs(cfg, m) == reaching_defs_oracle(cfg, m), m.qname


# -- points-to and call graphs ------------------------------------------------------------


def site_classes(ir, method, var, pts):
    return {ir.stmt(s).cls for s in pts.of(method, var)}


def test_visitor_points_to_excludes_renamer():
    ir = program("visitor.mol")
    pts = points_to(ir)
    assert site_classes(ir, "Node.accept", "v", pts) == {"Marker", "Shrinker"}


def test_dispatch_engine_points_to_both_sites():
    ir = program("dispatch.mol")
    assert site_classes(ir, "Main.main", "jre", points_to(ir)) == {"DisAssembler", "Decompiler"}


def test_single_allocation():
    ir = compile_source("class A { } main { var A a; a = new A; }")
    assert points_to(ir).of("Main.main", "a") == {"Main.main#0"}


def test_visitor_call_targets_by_mode():
    ir = program("visitor.mol")
    site = next(s.id for s in ir.method("Node.accept").stmts if s.kind == "virtual-call")
    cha = call_graph(ir, "cha")
    pt = call_graph(ir, "points-to")
    assert set(cha.targets(site)) == {"Visitor.visit", "Marker.visit", "Shrinker.visit", "Renamer.visit"}
    assert set(pt.targets(site)) == {"Marker.visit", "Shrinker.visit"}


def test_dispatch_call_targets():
    ir = program("dispatch.mol")
    site = next(s.id for s in ir.method("Main.main").stmts if s.kind == "virtual-call")
    assert set(call_graph(ir).targets(site)) == {"DisAssembler.execute", "Decompiler.execute"}


def test_monomorphic_call_same_in_both_modes(truck):
    for site in ("Main.main", "Truck.computeResidualValue"):
        for s in truck.method(site).stmts:
            if s.kind == "virtual-call":
                assert call_graph(truck, "cha").targets(s.id) == call_graph(truck).targets(s.id)


def test_null_receiver_is_unresolved(caplog):
    ir = compile_source("class A { method void f() { } } main { var A a = null; a.f(); }")
    cg = call_graph(ir)
    assert cg.unresolved == ("Main.main#1",)
    assert "empty receiver" in caplog.text


@pytest.mark.parametrize("name", ALL_PROGRAMS)
def test_points_to_call_graph_refines_cha(name):
    ir = program(name)
    assert call_graph(ir, "points-to").edges <= call_graph(ir, "cha").edges


@pytest.mark.parametrize("name", ALL_PROGRAMS)
def test_points_to_sound_against_interpreter(name):
    ir = program(name)
    cg = call_graph(ir)
    pts = points_to(ir)
    for inp in random_inputs(ir, 40, seed=1):
        trace = run(ir, inp)
        for site, target in trace.dispatches:
            assert (site, target) in cg.edges
        for site, cls in trace.receivers:
            s = ir.stmt(site)
            assert cls in pts.classes_of(s.method, s.args[0])


# -- field dependences -------------------------------------------------------------------


def test_truck_purchase_value_read_depends_on_main_write(truck):
    cg = call_graph(truck)
    deps = field_data_deps(truck, cg, points_to(truck))
    read = next(s.id for s in truck.method("Truck.computeResidualValue").stmts
                if s.kind == "field-read" and s.field == "Truck.purchaseValue")
    write = next(s.id for s in truck.method("Main.main").stmts
                 if s.kind == "field-write" and s.field == "Truck.purchaseValue")
    assert (read, write, "Truck.purchaseValue") in deps


def test_shrinker_reads_marker_write():
    ir = program("visitor.mol")
    deps = field_data_deps(ir, call_graph(ir), points_to(ir))
    write = next(s.id for s in ir.method("Marker.visit").stmts if s.kind == "field-write" and s.field == "Node.marked")
    read = next(s.id for s in ir.method("Shrinker.visit").stmts if s.kind == "field-read" and s.field == "Node.marked")
    assert (read, write, "Node.marked") in deps


def test_disjoint_objects_have_no_field_dependence():
    ir = compile_source(
        "class A { field int x; } class B { field int x; } "
        "main { var A a = new A; var B b = new B; a.x = 1; var int y = b.x; }"
    )
    assert field_data_deps(ir, call_graph(ir), points_to(ir)) == frozenset()


# -- specialization ---------------------------------------------------------------------------


def allocated(ir, method="Main.main"):
    return {s.cls for s in ir.method(method).stmts if s.kind == "new"}


def test_no_bindings_is_identity():
    ir = program("dispatch.mol")
    assert canonical_listing(specialize(ir)) == canonical_listing(ir)


@pytest.mark.parametrize("flag, kept, dropped", [(1, "DisAssembler", "Decompiler"), (0, "Decompiler", "DisAssembler")])
def test_flag_binding_prunes_other_engine(flag, kept, dropped):
    ir = specialize(program("dispatch.mol"), None, {"flag": flag})
    assert kept in allocated(ir) and dropped not in allocated(ir)


def test_specialization_preserves_ids():
    ir = program("dispatch.mol")
    out = specialize(ir, None, {"flag": 1})
    assert [s.id for s in out.all_stmts()] == [s.id for s in ir.all_stmts()]


def test_non_integer_binding_rejected():
    with pytest.raises(SpecError):
        specialize(program("dispatch.mol"), None, {"flag": "one"})


def test_unused_binding_warns(caplog):
    specialize(program("dispatch.mol"), None, {"nope": 1})
    assert "never read" in caplog.text


@pytest.mark.parametrize("flag", [0, 1, 7])
def test_specialization_sound_on_dispatch(flag):
    ir = program("dispatch.mol")
    out = specialize(ir, None, {"flag": flag})
    for inp in random_inputs(ir, 100, seed=flag):
        b = dict(inp.bindings, flag=flag)
        assert run(out, RunInput(b)).output == run(ir, RunInput(b)).output


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 5000), st.integers(-5, 5))
def test_specialization_sound_on_random_programs(seed, value):
    ir = compile_source(random_program(seed))
    key = sorted(input_keys(ir))[0]
    out = specialize(ir, None, {key: value})
    for inp in random_inputs(ir, 20, seed=seed):
        b = dict(inp.bindings)
        b[key] = value
        t1, t2 = run(ir, RunInput(b)), run(out, RunInput(b))
        assert (t1.status, t1.output) == (t2.status, t2.output)


def test_analyses_are_deterministic():
    a, b = sdg("visitor.mol"), compile_source(program("visitor.mol").source)
    from molslice.slicing import analyze

    assert sorted(analyze(b).edges) == sorted(a.edges)
