"""Inclusion-based points-to analysis.

Allocation-site abstraction (a site is the id of a ``new`` statement),
flow- and context-insensitive, field-sensitive on the declaring field key
``C.f``.  Call targets are discovered on the fly from receiver sets, starting
at the entry method, unless a fixed call graph is supplied.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from molslice.lang.ir import ProgramIR

RET = "@ret"

VarKey = tuple[str, str]  # (method qname, variable)


@dataclass(frozen=True)
class PointsToResult:
    vars: dict  # VarKey -> frozenset of allocation sites
    heap: dict  # (site, field key) -> frozenset of allocation sites
    site_class: dict  # site -> allocated class
    targets: dict  # call stmt id -> frozenset of target method qnames
    reachable: frozenset  # methods analysed
    mode: str = "on-the-fly"

    def of(self, method: str, var: str) -> frozenset[str]:
        return self.vars.get((method, var), frozenset())

    def classes_of(self, method: str, var: str) -> frozenset[str]:
        return frozenset(self.site_class[s] for s in self.of(method, var))

    def field(self, key: str) -> frozenset[str]:
        """Union over all objects of what field ``key`` may hold."""
        out: set[str] = set()
        for (_, f), sites in self.heap.items():
            if f == key:
                out |= sites
        return frozenset(out)


@dataclass
class _Solver:
    ir: ProgramIR
    fixed: Optional[dict] = None  # call id -> tuple of targets, when a call graph is given
    vars: dict = field(default_factory=dict)
    heap: dict = field(default_factory=dict)
    targets: dict = field(default_factory=dict)
    reachable: set = field(default_factory=set)
    order: list = field(default_factory=list)
    changed: bool = False

    def add(self, table: dict, key, sites) -> None:
        cur = table.get(key)
        if cur is None:
            cur = table[key] = set()
        before = len(cur)
        cur.update(sites)
        if len(cur) != before:
            self.changed = True

    def pts(self, key) -> set:
        return self.vars.get(key, set())

    def reach(self, qname: str) -> None:
        if qname not in self.reachable:
            self.reachable.add(qname)
            self.order.append(qname)
            self.changed = True

    def site_class(self, site: str) -> str:
        return self.ir.stmt(site).cls

    def step(self, qname: str) -> None:
        ir = self.ir
        m = ir.method(qname)
        for s in m.stmts:
            k = s.kind
            if k == "new":
                self.add(self.vars, (qname, s.target), {s.id})
            elif k == "copy":
                self.add(self.vars, (qname, s.target), self.pts((qname, s.args[0])))
            elif k == "field-read":
                for o in list(self.pts((qname, s.args[0]))):
                    self.add(self.vars, (qname, s.target), self.heap.get((o, s.field), ()))
            elif k == "field-write":
                src = self.pts((qname, s.args[1]))
                for o in list(self.pts((qname, s.args[0]))):
                    self.add(self.heap, (o, s.field), src)
            elif k == "return" and s.args:
                self.add(self.vars, (qname, RET), self.pts((qname, s.args[0])))
            elif k == "virtual-call":
                self.call(qname, s)

    def call(self, qname: str, s) -> None:
        ir = self.ir
        recv = self.pts((qname, s.args[0]))
        by_target: dict[str, set] = {}
        for o in sorted(recv):
            t = ir.lookup_method(self.site_class(o), s.name)
            if t is not None:
                by_target.setdefault(t.qname, set()).add(o)
        if self.fixed is not None:
            chosen = self.fixed.get(s.id, ())
        else:
            chosen = tuple(by_target)
        if chosen:
            self.add(self.targets, s.id, chosen)
        for tq in chosen:
            self.reach(tq)
            t = ir.method(tq)
            self.add(self.vars, (tq, "this"), by_target.get(tq, ()))
            for (pname, _), a in zip(t.params, s.args[1:]):
                self.add(self.vars, (tq, pname), self.pts((qname, a)))
            if s.target is not None:
                self.add(self.vars, (qname, s.target), self.pts((tq, RET)))

    def solve(self, entry: str) -> None:
        self.reach(entry)
        while self.changed:
            self.changed = False
            for qname in list(self.order):
                self.step(qname)


def points_to(ir: ProgramIR, call_graph=None) -> PointsToResult:
    """Solve the inclusion constraints reachable from the entry method.

    With ``call_graph`` (a :class:`~molslice.analysis.callgraph.CallGraph`) the
    call edges are taken from it instead of being discovered; receivers are
    still filtered by dynamic dispatch.
    """
    fixed = None
    if call_graph is not None:
        fixed = {}
        for site, target in sorted(call_graph.edges):
            fixed.setdefault(site, []).append(target)
        fixed = {k: tuple(v) for k, v in fixed.items()}
    solver = _Solver(ir, fixed)
    solver.solve(ir.entry)
    sites = {s.id: s.cls for s in ir.all_stmts() if s.kind == "new"}
    return PointsToResult(
        vars={k: frozenset(v) for k, v in solver.vars.items()},
        heap={k: frozenset(v) for k, v in solver.heap.items()},
        site_class=sites,
        targets={k: frozenset(v) for k, v in solver.targets.items()},
        reachable=frozenset(solver.reachable),
        mode="on-the-fly" if call_graph is None else f"fixed:{call_graph.mode}",
    )
