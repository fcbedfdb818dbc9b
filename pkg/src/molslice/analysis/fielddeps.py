"""Interprocedural data dependences through object fields."""

from __future__ import annotations

from molslice.analysis.callgraph import CallGraph
from molslice.analysis.pointsto import PointsToResult
from molslice.lang.ir import ProgramIR

FieldDep = tuple[str, str, str]  # (read stmt id, write stmt id, field key)


def may_reach(cg: CallGraph, writer: str, reader: str) -> bool:
    """Flow-insensitive approximation across calls: the reader's method is
    reachable from the writer's, or some method reaches both."""
    if reader in cg.reachable_from(writer):
        return True
    return any(
        writer in cg.reachable_from(m) and reader in cg.reachable_from(m)
        for m in {cg.entry, *cg.callees}
    )


def field_data_deps(ir: ProgramIR, cg: CallGraph, pts: PointsToResult) -> frozenset[FieldDep]:
    analysed = cg.reachable | pts.reachable
    reads: dict[str, list] = {}
    writes: dict[str, list] = {}
    for m in ir.methods:
        if m.qname not in analysed:
            continue
        for s in m.stmts:
            if s.kind == "field-read":
                reads.setdefault(s.field, []).append(s)
            elif s.kind == "field-write":
                writes.setdefault(s.field, []).append(s)
    reach_cache: dict[tuple[str, str], bool] = {}
    deps = set()
    for key, rs in reads.items():
        for r in rs:
            rbase = pts.of(r.method, r.args[0])
            for w in writes.get(key, ()):
                if not rbase & pts.of(w.method, w.args[0]):
                    continue
                pair = (w.method, r.method)
                if pair not in reach_cache:
                    reach_cache[pair] = may_reach(cg, *pair)
                if reach_cache[pair]:
                    deps.add((r.id, w.id, key))
    return frozenset(deps)
