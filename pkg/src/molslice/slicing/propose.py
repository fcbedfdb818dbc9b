"""Candidate criteria for a method: its result, its field side effects, its output."""

from __future__ import annotations

import logging
from typing import Optional

from molslice.analysis.callgraph import CallGraph, call_graph
from molslice.errors import CriterionError
from molslice.lang.ir import ProgramIR

log = logging.getLogger(__name__)


def propose_criteria(ir: ProgramIR, method: str, cg: Optional[CallGraph] = None) -> list[str]:
    """Ordered candidates: ``:ret``, then one ``@writes`` per field written by the
    method or anything it calls, then one point per ``print`` in the method."""
    m = ir.method_map.get(method)
    if m is None:
        raise CriterionError(f"unknown member {method}")
    if cg is None:
        cg = call_graph(ir, "points-to")
    out: list[str] = []
    if m.ret != "void" and any(s.kind == "return" and s.args for s in m.stmts):
        out.append(f"{m.qname}:ret")

    fields: list[str] = []
    seen = {m.qname}
    order = [m.qname]
    i = 0
    while i < len(order):  # breadth-first over callees, in call-site order
        cur = ir.method(order[i])
        i += 1
        for s in cur.stmts:
            if s.kind == "field-write" and s.field not in fields:
                fields.append(s.field)
            elif s.kind == "virtual-call":
                for t in cg.targets(s.id):
                    if t not in seen:
                        seen.add(t)
                        order.append(t)
    out.extend(f"{f}@writes" for f in fields)
    out.extend(f"{m.qname}:{s.index}#{s.args[0]}" for s in m.stmts if s.kind == "print")
    if not out:
        log.warning("%s has no return value, field writes or prints to slice on", method)
    return out
