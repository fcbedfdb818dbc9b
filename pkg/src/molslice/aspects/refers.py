"""The refers-to relation between methods and fields, and its closure."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from molslice.analysis.callgraph import CallGraph
from molslice.errors import MolError
from molslice.lang.ir import ProgramIR


@dataclass(frozen=True)
class RefersToGraph:
    methods: frozenset  # F: method ids "C.m"
    fields: frozenset  # A: field ids "C.f"
    edges: frozenset  # (method, method-or-field)

    def successors(self, member: str) -> list[str]:
        return sorted(t for s, t in self.edges if s == member)

    def to_dict(self) -> dict:
        return {
            "methods": sorted(self.methods),
            "fields": sorted(self.fields),
            "edges": sorted([s, t] for s, t in self.edges),
        }


def build_refers_to(ir: ProgramIR, cg: CallGraph) -> RefersToGraph:
    edges = set()
    for m in ir.methods:
        for s in m.stmts:
            if s.field is not None:
                edges.add((m.qname, s.field))
            elif s.kind == "virtual-call":
                edges.update((m.qname, t) for t in cg.targets(s.id))
    return RefersToGraph(
        frozenset(m.qname for m in ir.methods),
        frozenset(ir.field_map),
        frozenset(edges),
    )


def refers_to_closure(graph: RefersToGraph, roots: Iterable[str]) -> frozenset[str]:
    """Least superset of ``roots`` closed under refers-to edges."""
    roots = set(roots)
    unknown = roots - graph.methods - graph.fields
    if unknown:
        raise MolError(f"unknown member {', '.join(sorted(unknown))}")
    succ: dict[str, list[str]] = {}
    for s, t in graph.edges:
        succ.setdefault(s, []).append(t)
    seen, stack = set(roots), sorted(roots)
    while stack:
        for t in succ.get(stack.pop(), ()):
            if t not in seen:
                seen.add(t)
                stack.append(t)
    return frozenset(seen)
