"""Intraprocedural reaching definitions over locals, parameters and temporaries."""

from __future__ import annotations

import heapq

from molslice.analysis.cfg import ENTRY, EXIT, Cfg
from molslice.lang.ir import MethodIR

DataDep = tuple[int, int, str]  # (use node, def node or ENTRY, variable)


def entry_definitions(m: MethodIR) -> frozenset[str]:
    """Variables holding a value on method entry: receiver, parameters and
    every local (locals start out default-initialized)."""
    return frozenset(m.var_types)


def reaching_defs(cfg: Cfg, m: MethodIR) -> frozenset[DataDep]:
    """Def-use triples; ENTRY stands for the value a variable has on entry."""
    gen = {s.index: set(s.defs()) for s in m.stmts}
    preds = cfg.preds()
    out: dict[int, frozenset] = {n: frozenset() for n in cfg.nodes}
    out[ENTRY] = frozenset((v, ENTRY) for v in entry_definitions(m))
    work = list(range(len(m.stmts)))  # statement order keeps runs deterministic
    queued = set(range(len(m.stmts)))
    heapq.heapify(work)
    while work:
        n = heapq.heappop(work)
        queued.discard(n)
        inn = frozenset().union(*(out[p] for p in preds[n]))
        new = frozenset(d for d in inn if d[0] not in gen[n]) | {(v, n) for v in gen[n]}
        if new != out[n]:
            out[n] = new
            for s in cfg.succs[n]:
                if s != EXIT and s not in queued:
                    queued.add(s)
                    heapq.heappush(work, s)
    deps: set[DataDep] = set()
    for s in m.stmts:
        inn = frozenset().union(*(out[p] for p in preds[s.index]))
        for v in set(s.uses()):
            deps.update((s.index, d, v) for var, d in inn if var == v)
    return frozenset(deps)

