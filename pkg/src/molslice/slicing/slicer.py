"""Two-phase interprocedural slicing over the SDG.

Traversal works on (node, phase) states.  Every phase-1 state also seeds the
same node in phase 2.  Field edges summarise heap flow context-insensitively,
so crossing one always restarts in phase 1, which may ascend to any caller.
"""

from __future__ import annotations

import heapq
import json
from dataclasses import dataclass
from typing import Iterable

from molslice.errors import SliceError
from molslice.lang.ir import ENTRY_METHOD, ProgramIR
from molslice.slicing.criterion import SlicingCriterion
from molslice.slicing.sdg import Sdg

_SKIP_BACKWARD = {1: frozenset({"param-out"}), 2: frozenset({"call", "param-in"})}
_SKIP_FORWARD = {1: frozenset({"param-in", "call"}), 2: frozenset({"param-out"})}


@dataclass(frozen=True)
class SliceResult:
    statements: frozenset
    sdg_nodes: frozenset
    criterion: SlicingCriterion

    @property
    def direction(self) -> str:
        return self.criterion.direction


def _traverse(g: Sdg, seeds: Iterable[int], forward: bool) -> set[int]:
    skip = _SKIP_FORWARD if forward else _SKIP_BACKWARD
    adjacency = g.out_edges if forward else g.in_edges
    seen: set[tuple[int, int]] = set()
    heap: list[tuple[int, int]] = []

    def push(node: int, phase: int) -> None:
        if (node, phase) not in seen:
            seen.add((node, phase))
            heapq.heappush(heap, (node, phase))

    for s in seeds:
        push(s, 1)
    while heap:
        node, phase = heapq.heappop(heap)
        if phase == 1:
            push(node, 2)
        for src, dst, tag, _ in sorted(adjacency[node]):
            if tag in skip[phase]:
                continue
            other = dst if forward else src
            push(other, 1 if tag == "field" else phase)
    return {n for n, _ in seen}


def _governing_closure(g: Sdg, nodes: set[int]) -> set[int]:
    """Add governing predicates, entries and call sites of every node."""
    out = set(nodes)
    stack = sorted(nodes)
    while stack:
        n = stack.pop()
        for src, _, tag, _ in g.in_edges[n]:
            if tag in ("control", "call") and src not in out:
                out.add(src)
                stack.append(src)
    return out


def _guard_operands(s) -> set[str]:
    """Operands whose values can make ``s`` fault: dereferenced bases and divisors."""
    if s.kind in ("field-read", "field-write", "virtual-call"):
        return {s.args[0]}
    if s.kind == "binop" and s.op in ("/", "%"):
        return {s.args[1]}
    return set()


def _seeds(g: Sdg, criterion: SlicingCriterion) -> tuple[set[int], set[str]]:
    """Seed nodes plus criterion statements that join the slice unexpanded."""
    ir = g.ir
    seeds: set[int] = set()
    extra: set[str] = set()
    forward = criterion.direction == "forward"
    for sid, var in sorted(criterion.points):
        if sid not in g.stmt_node:
            raise SliceError(f"statement {sid} is not in a method reachable from the entry")
        s = ir.stmt(sid)
        node = g.stmt_node[sid]
        defining = var in s.defs() or (s.kind == "field-write" and var == s.field)
        if defining:
            seeds.add(g.aout[sid] if s.kind == "virtual-call" and sid in g.aout else node)
            extra.add(sid)
            continue
        if forward:
            if s.kind == "virtual-call":
                seeds.update(g.ain[(sid, i)] for i, a in enumerate(s.args) if a == var)
                if s.args[0] == var:
                    seeds.add(node)
            else:
                seeds.add(node)
            extra.add(sid)
            continue
        # backward from a use: the definitions of that variable, of the
        # operands that decide whether the statement completes, and the
        # statement's control context
        wanted = {var} | _guard_operands(s)
        targets = {node}
        if s.kind == "virtual-call":
            targets.update(g.ain[(sid, i)] for i, a in enumerate(s.args) if a in wanted)
        for t in targets:
            for src, _, tag, label in g.in_edges[t]:
                if tag == "data" and label in wanted:
                    seeds.add(src)
        for src, _, tag, _ in g.in_edges[node]:
            if tag == "control":
                seeds.add(src)
        extra.add(sid)
    return seeds, extra


def _project(g: Sdg, nodes: Iterable[int]) -> set[str]:
    return {g.nodes[n].stmt for n in nodes if g.nodes[n].stmt is not None}


def _slice(g: Sdg, criterion: SlicingCriterion, forward: bool) -> SliceResult:
    want = "forward" if forward else "backward"
    if criterion.direction != want:
        raise SliceError(f"{want} slice requested for a {criterion.direction} criterion")
    seeds, extra = _seeds(g, criterion)
    nodes = _traverse(g, seeds, forward)
    if forward:
        nodes = _governing_closure(g, nodes)
    stmts = _project(g, nodes) | extra
    nodes |= {g.stmt_node[s] for s in extra}
    return SliceResult(frozenset(stmts), frozenset(nodes), criterion)


def backward_slice(g: Sdg, criterion: SlicingCriterion) -> SliceResult:
    return _slice(g, criterion, forward=False)


def forward_slice(g: Sdg, criterion: SlicingCriterion) -> SliceResult:
    return _slice(g, criterion, forward=True)


def compute_slice(g: Sdg, criterion: SlicingCriterion) -> SliceResult:
    return _slice(g, criterion, forward=criterion.direction == "forward")


def merge_slices(results: list[SliceResult]) -> SliceResult:
    if not results:
        raise SliceError("nothing to merge")
    directions = {r.direction for r in results}
    if len(directions) > 1:
        raise SliceError("cannot merge backward and forward slices")
    crit = results[0].criterion
    for r in results[1:]:
        crit = crit.union(r.criterion)
    return SliceResult(
        frozenset().union(*(r.statements for r in results)),
        frozenset().union(*(r.sdg_nodes for r in results)),
        crit,
    )


# -- members and serialization --------------------------------------------


def slice_members(ir: ProgramIR, statements: Iterable[str], criterion: SlicingCriterion | None = None) -> dict:
    """Classes, methods and fields a statement set touches, as sorted lists."""
    methods, fields, classes = set(), set(), set()
    for sid in statements:
        s = ir.stmt(sid)
        methods.add(s.method)
        if s.field:
            fields.add(s.field)
        if s.kind == "new":
            classes.add(s.cls)
    if criterion is not None:
        fields.update(d for _, d in criterion.points if d in ir.field_map)
    classes.update(m.split(".", 1)[0] for m in methods if m != ENTRY_METHOD)
    classes.update(f.split(".", 1)[0] for f in fields)
    return {"classes": sorted(classes), "methods": sorted(methods), "fields": sorted(fields)}


def slice_to_dict(ir: ProgramIR, result: SliceResult) -> dict:
    return {
        "criterion": result.criterion.origin,
        "direction": result.direction,
        "statements": sorted(result.statements),
        "members": slice_members(ir, result.statements, result.criterion),
    }


def slice_to_json(ir: ProgramIR, result: SliceResult) -> str:
    return json.dumps(slice_to_dict(ir, result), indent=2) + "\n"
