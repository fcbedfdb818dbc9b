"""System dependence graph construction and summary edges.

Nodes carry integer ids assigned in program order, so every traversal that
pops the smallest id first is deterministic.  Edge tags:

``control``   predicate or method entry to dependent node
``data``      definition to use, labelled with the variable
``call``      call statement to callee entry
``param-in``  actual-in to formal-in
``param-out`` formal-out to actual-out
``summary``   actual-in to actual-out across a call
``field``     field write to field read (possibly in another method)
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from molslice.analysis.callgraph import CallGraph, analysis_pointsto, call_graph
from molslice.analysis.cfg import ENTRY, build_cfg, control_dependences, post_dominators
from molslice.analysis.dataflow import reaching_defs
from molslice.analysis.fielddeps import field_data_deps
from molslice.analysis.pointsto import PointsToResult, points_to
from molslice.lang.ir import ProgramIR

TAGS = ("control", "data", "call", "param-in", "param-out", "summary", "field")
INTRA = frozenset({"control", "data", "summary"})


@dataclass(frozen=True)
class Node:
    id: int
    kind: str  # entry | stmt | actual-in | actual-out | formal-in | formal-out
    method: str
    stmt: Optional[str] = None  # statement id for stmt/actual nodes
    index: Optional[int] = None  # parameter slot for actual-in/formal-in (0 is the receiver)

    def __str__(self) -> str:
        if self.kind == "entry":
            return f"entry {self.method}"
        if self.kind == "stmt":
            return self.stmt
        if self.kind == "actual-in":
            return f"{self.stmt} ain{self.index}"
        if self.kind == "actual-out":
            return f"{self.stmt} aout"
        if self.kind == "formal-in":
            return f"{self.method} fin{self.index}"
        return f"{self.method} fout"


@dataclass(frozen=True)
class MethodDeps:
    control: frozenset  # (dependent index, predicate index or ENTRY)
    data: frozenset  # (use index, def index or ENTRY, variable)


@dataclass
class Sdg:
    ir: ProgramIR
    cg: CallGraph
    pts: PointsToResult
    nodes: list = field(default_factory=list)
    edges: set = field(default_factory=set)  # (src, dst, tag, label)
    entry_of: dict = field(default_factory=dict)
    stmt_node: dict = field(default_factory=dict)
    ain: dict = field(default_factory=dict)  # (call id, slot) -> node
    aout: dict = field(default_factory=dict)  # call id -> node
    fin: dict = field(default_factory=dict)  # (method, slot) -> node
    fout: dict = field(default_factory=dict)  # method -> node
    out_edges: dict = field(default_factory=dict)
    in_edges: dict = field(default_factory=dict)

    # -- construction helpers -------------------------------------------

    def new_node(self, kind: str, method: str, stmt: Optional[str] = None, index: Optional[int] = None) -> int:
        n = Node(len(self.nodes), kind, method, stmt, index)
        self.nodes.append(n)
        self.out_edges[n.id] = set()
        self.in_edges[n.id] = set()
        return n.id

    def add_edge(self, src: int, dst: int, tag: str, label: str = "") -> bool:
        e = (src, dst, tag, label)
        if e in self.edges:
            return False
        self.edges.add(e)
        self.out_edges[src].add(e)
        self.in_edges[dst].add(e)
        return True

    # -- queries ------------------------------------------------------------

    def edges_tagged(self, tag: str) -> set:
        return {e for e in self.edges if e[2] == tag}

    def statement_of(self, node: int) -> Optional[str]:
        """Statement a node projects to; formal and entry nodes have none."""
        return self.nodes[node].stmt

    @property
    def methods(self) -> list[str]:
        return list(self.entry_of)

    def describe(self) -> str:
        lines = [f"{len(self.nodes)} nodes, {len(self.edges)} edges"]
        for src, dst, tag, label in sorted(self.edges):
            suffix = f" [{label}]" if label else ""
            lines.append(f"{self.nodes[src]} -> {self.nodes[dst]} {tag}{suffix}")
        return "\n".join(lines)


def method_dependences(ir: ProgramIR, methods) -> dict[str, MethodDeps]:
    out = {}
    for qn in methods:
        m = ir.method(qn)
        branching = build_cfg(m, returns_branch=True)
        control = control_dependences(branching, post_dominators(branching))
        out[qn] = MethodDeps(control, reaching_defs(build_cfg(m), m))
    return out


def build_sdg(
    ir: ProgramIR,
    cg: CallGraph,
    dependences: Optional[dict] = None,
    field_deps=None,
    pts: Optional[PointsToResult] = None,
) -> Sdg:
    """Assemble the SDG of the methods reachable from the entry (no summary edges yet)."""
    if pts is None:
        pts = analysis_pointsto(ir, cg)
    methods = [m.qname for m in ir.methods if m.qname in cg.reachable]
    if dependences is None:
        dependences = method_dependences(ir, methods)
    if field_deps is None:
        field_deps = field_data_deps(ir, cg, pts)
    g = Sdg(ir, cg, pts)

    for qn in methods:
        m = ir.method(qn)
        g.entry_of[qn] = g.new_node("entry", qn)
        for i, _ in enumerate(m.formals):
            g.fin[(qn, i)] = g.new_node("formal-in", qn, index=i)
        if m.ret != "void":
            g.fout[qn] = g.new_node("formal-out", qn)
        for s in m.stmts:
            g.stmt_node[s.id] = g.new_node("stmt", qn, s.id)
            if s.kind == "virtual-call":
                for i in range(len(s.args)):
                    g.ain[(s.id, i)] = g.new_node("actual-in", qn, s.id, i)
                target = ir.lookup_method(s.cls, s.name)
                if target is not None and target.ret != "void":
                    g.aout[s.id] = g.new_node("actual-out", qn, s.id)

    for qn in methods:
        m = ir.method(qn)
        entry = g.entry_of[qn]
        deps = dependences[qn]
        for i, _ in enumerate(m.formals):
            g.add_edge(entry, g.fin[(qn, i)], "control")
        if qn in g.fout:
            g.add_edge(entry, g.fout[qn], "control")
        for n, p in sorted(deps.control):
            src = entry if p == ENTRY else g.stmt_node[m.stmt_id(p)]
            g.add_edge(src, g.stmt_node[m.stmt_id(n)], "control")
        for s in m.stmts:
            if s.kind == "virtual-call":
                node = g.stmt_node[s.id]
                for i in range(len(s.args)):
                    g.add_edge(node, g.ain[(s.id, i)], "control")
                if s.id in g.aout:
                    g.add_edge(node, g.aout[s.id], "control")
            elif s.kind == "return" and s.args and qn in g.fout:
                g.add_edge(g.stmt_node[s.id], g.fout[qn], "data", s.args[0])
        formals = {v: i for i, v in enumerate(m.formals)}
        for u, d, v in sorted(deps.data, key=lambda t: (t[0], t[1], t[2])):
            if d == ENTRY:
                src = g.fin[(qn, formals[v])] if v in formals else entry
            else:
                ds = m.stmts[d]
                src = g.aout.get(ds.id, g.stmt_node[ds.id]) if ds.kind == "virtual-call" else g.stmt_node[ds.id]
            us = m.stmts[u]
            if us.kind == "virtual-call":
                for i, a in enumerate(us.args):
                    if a == v:
                        g.add_edge(src, g.ain[(us.id, i)], "data", v)
                if us.args[0] == v:
                    g.add_edge(src, g.stmt_node[us.id], "data", v)  # receiver decides dispatch
            else:
                g.add_edge(src, g.stmt_node[us.id], "data", v)

    for site, target in sorted(cg.edges):
        if site not in g.stmt_node or target not in g.entry_of:
            continue
        g.add_edge(g.stmt_node[site], g.entry_of[target], "call")
        s = ir.stmt(site)
        for i in range(len(s.args)):
            if (target, i) in g.fin:
                g.add_edge(g.ain[(site, i)], g.fin[(target, i)], "param-in")
        if site in g.aout and target in g.fout:
            g.add_edge(g.fout[target], g.aout[site], "param-out")

    for r, w, key in sorted(field_deps):
        if r in g.stmt_node and w in g.stmt_node:
            g.add_edge(g.stmt_node[w], g.stmt_node[r], "field", key)
    return g


def _fins_reaching(g: Sdg, method: str) -> set[int]:
    """Formal-in slots of ``method`` with a same-level path to its formal-out."""
    start = g.fout[method]
    seen, stack = {start}, [start]
    slots = set()
    while stack:
        n = stack.pop()
        node = g.nodes[n]
        if node.kind == "formal-in":
            slots.add(node.index)
        for src, _, tag, _ in g.in_edges[n]:
            if tag in INTRA and src not in seen and g.nodes[src].method == method:
                seen.add(src)
                stack.append(src)
    return slots


def summary_edges(g: Sdg) -> Sdg:
    """Add actual-in to actual-out summary edges until nothing changes."""
    callers: dict[str, list[str]] = {}
    for site, target in g.cg.edges:
        if site in g.aout and target in g.fout:
            callers.setdefault(target, []).append(site)
    work = sorted(callers)
    pending = set(work)
    while work:
        method = work.pop(0)
        pending.discard(method)
        slots = _fins_reaching(g, method)
        for site in sorted(callers[method]):
            added = False
            for i in sorted(slots):
                if (site, i) in g.ain:
                    added |= g.add_edge(g.ain[(site, i)], g.aout[site], "summary")
            caller = site.rsplit("#", 1)[0]
            if added and caller in callers and caller not in pending:
                pending.add(caller)
                work.append(caller)
    return g


def analyze(ir: ProgramIR, mode: str = "points-to") -> Sdg:
    """Full pipeline: points-to, call graph, dependences, SDG with summary edges."""
    if mode == "cha":
        cg = call_graph(ir, "cha")
        pts = points_to(ir, cg)
    else:
        pts = points_to(ir)
        cg = call_graph(ir, "points-to", pts)
    return summary_edges(build_sdg(ir, cg, pts=pts))
