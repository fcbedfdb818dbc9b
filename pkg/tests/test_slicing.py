from __future__ import annotations

import json
import random

import pytest
from hypothesis import given, settings, strategies as st

from conftest import ALL_PROGRAMS, program, sdg
from oracles import summary_oracle
from props import call_closure_violations, check_pair, control_closure_violations, draw_pair
from molslice.errors import CriterionError, SliceError
from molslice.gen import random_program
from molslice.interp import check_slice, random_inputs
from molslice.lang import compile_source, reconstruct_source
from molslice.slicing import (
    analyze, backward_slice, forward_slice, merge_slices, resolve_criterion, slice_members, slice_to_json,
)
from molslice.slicing.propose import propose_criteria


def methods_of(ir, statements):
    return {ir.stmt(s).method for s in statements}


def whole(ir, method):
    return {s.id for s in ir.method(method).stmts}


def find(ir, method, text):
    return next(s.id for s in ir.method(method).stmts if s.render().startswith(text))


# -- SDG shape --------------------------------------------------------------------------


def test_years_since_parameter_nodes():
    g = sdg("truck.mol")
    params = sorted(slot for (m, slot) in g.fin if m == "Truck.yearsSince" and slot > 0)
    assert params == [1]  # d; slot 0 is the receiver
    assert "Truck.yearsSince" in g.fout
    site = find(g.ir, "Truck.computeResidualValue", "nbrYears = this.yearsSince")
    assert (site, 1) in g.ain and site in g.aout


def test_years_since_summary_edge():
    g = sdg("truck.mol")
    site = find(g.ir, "Truck.computeResidualValue", "nbrYears = this.yearsSince")
    assert (g.ain[(site, 1)], g.aout[site], "summary", "") in g.edges


def test_identity_method_has_summary_edge_at_every_call():
    ir = compile_source(
        "class A { method int id(int x) { return x; } } "
        "main { var A a = new A; var int p = a.id(1); var int q = a.id(2); print(p + q); }"
    )
    g = analyze(ir)
    calls = [s.id for s in ir.method("Main.main").stmts if s.kind == "virtual-call"]
    for c in calls:
        assert (g.ain[(c, 1)], g.aout[c], "summary", "") in g.edges


def test_constant_method_has_no_summary_from_argument():
    ir = compile_source("class A { method int k(int x) { return 7; } } main { var A a = new A; print(a.k(1)); }")
    g = analyze(ir)
    c = next(s.id for s in ir.method("Main.main").stmts if s.kind == "virtual-call")
    assert (g.ain[(c, 1)], g.aout[c], "summary", "") not in g.edges


@pytest.mark.parametrize("name", ALL_PROGRAMS)
@pytest.mark.parametrize("mode", ["points-to", "cha"])
def test_summary_edges_match_realizable_path_oracle(name, mode):
    g = sdg(name, mode)
    assert len(g.nodes) <= 500
    found = {(s, d) for s, d, tag, _ in g.edges if tag == "summary"}
    assert found == summary_oracle(g)


# -- criteria --------------------------------------------------------------------------------


def test_writes_criterion_resolves_to_single_point(truck):
    c = resolve_criterion("Truck.residualValue@writes", truck)
    (sid, designator), = c.points
    assert truck.stmt(sid).method == "Truck.computeResidualValue"
    assert designator == "Truck.residualValue"


def test_ret_criterion(truck):
    c = resolve_criterion("Truck.yearsSince:ret", truck)
    (sid, _), = c.points
    assert truck.stmt(sid).kind == "return"


@pytest.mark.parametrize(
    "text, message",
    [
        ("Truck.computeResidualValue:99#x", "out of range"),
        ("Truck.nope:0#x", "unknown"),
        ("Nope.f@writes", "unknown"),
        ("Truck.computeResidualValue:0#zzz", "zzz"),
        ("Truck.printObject:ret", "no value"),
        ("garbage", "criterion"),
    ],
)
def test_criterion_errors(truck, text, message):
    with pytest.raises(CriterionError, match=message):
        resolve_criterion(text, truck)


def test_writes_with_no_matching_statement():
    ir = compile_source("class A { field int x; } main { var A a = new A; print(a.x); }")
    with pytest.raises(CriterionError):
        resolve_criterion("A.x@writes", ir)


# -- backward slices ----------------------------------------------------------------------------


def test_truck_residual_value_slice():
    g = sdg("truck.mol")
    ir = g.ir
    r = backward_slice(g, resolve_criterion("Truck.residualValue@writes", ir, pts=g.pts))
    members = slice_members(ir, r.statements, r.criterion)
    assert set(members["methods"]) == {"Main.main", "Truck.computeResidualValue", "Truck.yearsSince"}
    assert set(members["fields"]) == {
        "Truck.purchaseValue", "Truck.purchaseDate", "Truck.amortizationRate", "Truck.residualValue",
    }
    assert whole(ir, "Truck.yearsSince") <= r.statements
    assert not whole(ir, "Main.main") <= r.statements
    assert not whole(ir, "Truck.computeResidualValue") <= r.statements
    assert find(ir, "Truck.computeResidualValue", "this.printObject") not in r.statements
    assert find(ir, "Main.main", "t.serialNumber") not in r.statements
    assert find(ir, "Main.main", "t.nextMaintenance") not in r.statements


def test_truck_slice_reconstruction_drops_print_object():
    g = sdg("truck.mol")
    r = backward_slice(g, resolve_criterion("Truck.residualValue@writes", g.ir, pts=g.pts))
    src = reconstruct_source(g.ir, r.statements)
    assert "printObject" not in src and "nextMaintenance" not in src
    compile_source(src)


def test_dispatch_unspecialized_slice_keeps_both_engines():
    g = sdg("dispatch.mol")
    r = backward_slice(g, resolve_criterion("Main.main:10#result", g.ir, pts=g.pts))
    assert {"DisAssembler.execute", "Decompiler.execute"} <= methods_of(g.ir, r.statements)


def test_statement_without_dependences():
    ir = compile_source("main { var int x = 1; var int y = 2; print(y); }")
    g = analyze(ir)
    r = backward_slice(g, resolve_criterion("Main.main:0#x", ir))
    assert r.statements == {"Main.main#0"}
    assert g.entry_of["Main.main"] in r.sdg_nodes


def test_use_criterion_keeps_faulting_operands():
    ir = compile_source(
        'class A { field int f; } main { var A a = new A; var int v = input("v"); a.f = v; print(a.f); }'
    )
    g = analyze(ir)
    write = next(s for s in ir.method("Main.main").stmts if s.kind == "field-write")
    r = backward_slice(g, resolve_criterion(f"Main.main:{write.index}#v", ir))
    assert "Main.main#0" in r.statements  # the allocation the write dereferences


# -- forward slices -----------------------------------------------------------------------------------


def test_truck_forward_from_purchase_value():
    g = sdg("truck.mol")
    ir = g.ir
    write = next(s for s in ir.method("Main.main").stmts if s.kind == "field-write" and s.field == "Truck.purchaseValue")
    value = write.args[1]
    r = forward_slice(g, resolve_criterion(f"Main.main:{write.index}#{value}", ir, "forward", pts=g.pts))
    assert find(ir, "Truck.computeResidualValue", "this.residualValue") in r.statements
    assert find(ir, "Main.main", "print(") in r.statements
    assert find(ir, "Main.main", "t.nextMaintenance") not in r.statements


def test_forward_from_dead_store():
    ir = compile_source("main { var int x = 1; var int y = 2; print(y); }")
    g = analyze(ir)
    r = forward_slice(g, resolve_criterion("Main.main:0#x", ir, "forward"))
    assert r.statements == {"Main.main#0"}


def test_dispatch_forward_from_flag():
    g = sdg("dispatch.mol")
    ir = g.ir
    r = forward_slice(g, resolve_criterion("Main.main:0#flag", ir, "forward", pts=g.pts))
    for text in ("if !", "jre = new DisAssembler", "jre = new Decompiler", "result = jre.execute"):
        assert find(ir, "Main.main", text) in r.statements


def test_direction_mismatch_rejected(truck):
    g = sdg("truck.mol")
    with pytest.raises(SliceError):
        forward_slice(g, resolve_criterion("Truck.yearsSince:ret", truck))


# -- merging ----------------------------------------------------------------------------------------


def test_merge_is_idempotent():
    g = sdg("truck.mol")
    r = backward_slice(g, resolve_criterion("Truck.yearsSince:ret", g.ir))
    assert merge_slices([r, r]).statements == r.statements


def test_side_effect_merge_equals_combined_criterion():
    g = sdg("sideeffect.mol")
    ir = g.ir
    shrunk = backward_slice(g, resolve_criterion("Model.shrunk@writes", ir, pts=g.pts))
    renamed = backward_slice(g, resolve_criterion("Model.renamed@writes", ir, pts=g.pts))
    both = backward_slice(g, resolve_criterion(["Model.shrunk@writes", "Model.renamed@writes"], ir, pts=g.pts))
    assert merge_slices([shrunk, renamed]).statements == both.statements
    size_read = next(s.id for s in ir.method("Main.main").stmts if s.kind == "input-read" and s.key == "size")
    name_read = next(s.id for s in ir.method("Main.main").stmts if s.kind == "input-read" and s.key == "name")
    assert size_read in shrunk.statements and name_read not in shrunk.statements
    assert name_read in renamed.statements and size_read not in renamed.statements


def test_merge_of_disjoint_slices_is_disjoint_union():
    ir = compile_source("main { var int x = 1; var int y = 2; print(x); print(y); }")
    g = analyze(ir)
    a = backward_slice(g, resolve_criterion("Main.main:0#x", ir))
    b = backward_slice(g, resolve_criterion("Main.main:1#y", ir))
    assert not a.statements & b.statements
    assert merge_slices([a, b]).statements == a.statements | b.statements


def test_merge_mixed_directions_rejected():
    g = sdg("truck.mol")
    a = backward_slice(g, resolve_criterion("Truck.yearsSince:ret", g.ir))
    b = forward_slice(g, resolve_criterion("Truck.yearsSince:ret", g.ir, "forward"))
    with pytest.raises(SliceError):
        merge_slices([a, b])


# -- proposal ------------------------------------------------------------------------------------------


def test_propose_side_effects():
    ir = program("sideeffect.mol")
    assert propose_criteria(ir, "Proc.process") == ["Model.shrunk@writes", "Model.renamed@writes"]


def test_propose_return(truck):
    assert propose_criteria(truck, "Truck.yearsSince") == ["Truck.yearsSince:ret"]


def test_propose_prints(truck):
    out = propose_criteria(truck, "Truck.printObject")
    assert len(out) == 2 and all(":" in c and "#" in c for c in out)
    for c in out:
        resolve_criterion(c, truck)


def test_propose_empty_warns(caplog):
    ir = compile_source("class A { method void f() { } } main { }")
    assert propose_criteria(ir, "A.f") == []
    assert "no return value" in caplog.text


# -- serialization -------------------------------------------------------------------------------------


def test_slice_json_schema_and_determinism():
    g = sdg("truck.mol")
    r = backward_slice(g, resolve_criterion("Truck.residualValue@writes", g.ir, pts=g.pts))
    text = slice_to_json(g.ir, r)
    assert text == slice_to_json(g.ir, r) and text.endswith("\n")
    data = json.loads(text)
    assert set(data) == {"criterion", "direction", "statements", "members"}
    assert data["statements"] == sorted(data["statements"])
    assert all(v == sorted(v) for v in data["members"].values())


# -- properties ---------------------------------------------------------------------------------------------


@pytest.mark.parametrize("name", ALL_PROGRAMS)
def test_algebraic_properties_on_corpus(name):
    g = sdg(name)
    rng = random.Random(name)
    for _ in range(4):
        c1, c2 = draw_pair(g, rng)
        assert check_pair(g, c1, c2) == []


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 100_000), st.sampled_from(["points-to", "cha"]))
def test_algebraic_properties_on_random_programs(seed, mode):
    g = analyze(compile_source(random_program(seed)), mode)
    c1, c2 = draw_pair(g, random.Random(seed))
    assert check_pair(g, c1, c2) == []


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 100_000))
def test_slices_preserve_criterion_values_on_random_programs(seed):
    ir = compile_source(random_program(seed))
    g = analyze(ir)
    c1, _ = draw_pair(g, random.Random(seed))
    verdict = check_slice(ir, c1, random_inputs(ir, 20, seed), sdg=g)
    assert verdict.passed, (c1, verdict.message)


def test_closure_helpers_flag_missing_members():
    g = sdg("truck.mol")
    r = backward_slice(g, resolve_criterion("Truck.yearsSince:ret", g.ir))
    broken = type(r)(frozenset(s for s in r.statements if g.ir.stmt(s).method != "Truck.computeResidualValue"),
                     frozenset(), r.criterion)
    assert call_closure_violations(g, broken)
    assert control_closure_violations(g, broken)
