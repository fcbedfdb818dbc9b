"""Whole-program call graphs: class-hierarchy and points-to resolution."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Optional

from molslice.analysis.pointsto import PointsToResult, points_to
from molslice.lang.ir import ProgramIR

log = logging.getLogger(__name__)

MODES = ("cha", "points-to")


@dataclass(frozen=True)
class CallGraph:
    mode: str
    edges: frozenset  # (call stmt id, target method qname)
    sites: tuple  # every call site considered, in program order
    entry: str

    @cached_property
    def unresolved(self) -> tuple[str, ...]:
        resolved = {s for s, _ in self.edges}
        return tuple(s for s in self.sites if s not in resolved)

    def targets(self, site: str) -> tuple[str, ...]:
        return tuple(sorted(t for s, t in self.edges if s == site))

    @cached_property
    def callees(self) -> dict[str, frozenset[str]]:
        out: dict[str, set[str]] = {}
        for site, t in self.edges:
            out.setdefault(site.rsplit("#", 1)[0], set()).add(t)
        return {k: frozenset(v) for k, v in out.items()}

    def reachable_from(self, method: str) -> frozenset[str]:
        seen, stack = {method}, [method]
        while stack:
            for t in self.callees.get(stack.pop(), ()):
                if t not in seen:
                    seen.add(t)
                    stack.append(t)
        return frozenset(seen)

    @cached_property
    def reachable(self) -> frozenset[str]:
        return self.reachable_from(self.entry)


def _cha_edges(ir: ProgramIR) -> set[tuple[str, str]]:
    edges = set()
    for s in ir.all_stmts():
        if s.kind != "virtual-call":
            continue
        for c in ir.subclasses(s.cls):
            t = ir.lookup_method(c, s.name)
            if t is not None:
                edges.add((s.id, t.qname))
    return edges


def call_graph(ir: ProgramIR, mode: str = "points-to", pts: Optional[PointsToResult] = None) -> CallGraph:
    """Resolve every virtual call.

    ``cha``: every override in the cone of the static receiver class, for all
    call sites of the program.  ``points-to``: the overrides selected by the
    classes in the receiver's points-to set, for call sites in methods reached
    from the entry; a site whose receiver set is empty is kept without targets
    and reported.
    """
    if mode not in MODES:
        raise ValueError(f"unknown call graph mode {mode!r}")
    if mode == "cha":
        sites = tuple(s.id for s in ir.all_stmts() if s.kind == "virtual-call")
        return CallGraph(mode, frozenset(_cha_edges(ir)), sites, ir.entry)
    if pts is None:
        pts = points_to(ir)
    sites = tuple(
        s.id for m in ir.methods if m.qname in pts.reachable for s in m.stmts if s.kind == "virtual-call"
    )
    edges = set()
    for site in sites:
        s = ir.stmt(site)
        for o in sorted(pts.of(s.method, s.args[0])):
            t = ir.lookup_method(pts.site_class[o], s.name)
            if t is not None:
                edges.add((site, t.qname))
    cg = CallGraph(mode, frozenset(edges), sites, ir.entry)
    for site in cg.unresolved:
        log.warning("call site %s has an empty receiver points-to set", site)
    return cg


def analysis_pointsto(ir: ProgramIR, cg: CallGraph) -> PointsToResult:
    """Points-to facts consistent with ``cg`` (recomputed over CHA edges)."""
    if cg.mode == "cha":
        return points_to(ir, cg)
    return points_to(ir)
