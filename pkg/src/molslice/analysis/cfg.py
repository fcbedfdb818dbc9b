"""Per-method control-flow graphs, post-dominance and control dependence.

Nodes are statement indices plus the synthetic :data:`ENTRY` and
:data:`EXIT`.  A node that cannot reach the exit (an infinite loop left behind
by specialization, say) gets an extra edge to the exit so that post-dominance
is total.

For dependence purposes a ``return`` that is not the last statement can act
as a pseudo-predicate: it keeps its real edge to the exit and gains a
non-executable edge to the next statement, so code after it becomes control
dependent on it.
"""

from __future__ import annotations

from dataclasses import dataclass

from molslice.lang.ir import MethodIR

ENTRY = -1
EXIT = -2


@dataclass(frozen=True)
class Cfg:
    method: str
    size: int
    succs: dict  # node -> tuple of successor nodes
    augmented: frozenset  # nodes that received an artificial edge to EXIT

    @property
    def nodes(self) -> list[int]:
        return [ENTRY, *range(self.size), EXIT]

    @property
    def edges(self) -> set[tuple[int, int]]:
        return {(a, b) for a, bs in self.succs.items() for b in bs}

    def preds(self) -> dict[int, tuple[int, ...]]:
        out: dict[int, list[int]] = {n: [] for n in self.nodes}
        for a in self.nodes:
            for b in self.succs[a]:
                out[b].append(a)
        return {n: tuple(sorted(ps)) for n, ps in out.items()}


def _natural_succs(m: MethodIR, returns_branch: bool = False) -> dict[int, tuple[int, ...]]:
    n = len(m.stmts)

    def nxt(i: int) -> int:
        return i if i < n else EXIT

    succs: dict[int, tuple[int, ...]] = {ENTRY: (nxt(0),), EXIT: ()}
    for s in m.stmts:
        i = s.index
        if s.kind == "goto":
            out = (nxt(s.jump),)
        elif s.kind == "if-goto":
            out = tuple(dict.fromkeys((nxt(i + 1), nxt(s.jump))))
        elif s.kind == "return":
            out = (EXIT, i + 1) if returns_branch and i + 1 < n else (EXIT,)
        else:
            out = (nxt(i + 1),)
        succs[i] = out
    return succs


def _reaching_exit(succs) -> set[int]:
    rev: dict[int, list[int]] = {}
    for a, bs in succs.items():
        for b in bs:
            rev.setdefault(b, []).append(a)
    seen, stack = {EXIT}, [EXIT]
    while stack:
        for p in rev.get(stack.pop(), ()):
            if p not in seen:
                seen.add(p)
                stack.append(p)
    return seen


def build_cfg(m: MethodIR, returns_branch: bool = False) -> Cfg:
    """Control-flow graph of ``m``; ``returns_branch`` adds the return pseudo-edges."""
    succs = _natural_succs(m, returns_branch)
    augmented = set()
    while True:
        stuck = sorted(set(succs) - _reaching_exit(succs))
        if not stuck:
            break
        # prefer a loop header: the target of a backward jump inside the stuck region
        headers = sorted(
            s.jump for s in m.stmts
            if s.kind == "goto" and s.index in stuck and s.jump is not None and s.jump <= s.index and s.jump in stuck
        )
        node = headers[0] if headers else stuck[0]
        succs[node] = succs[node] + (EXIT,)
        augmented.add(node)
    return Cfg(m.qname, len(m.stmts), succs, frozenset(augmented))


def post_dominators(cfg: Cfg) -> dict[int, int]:
    """Immediate post-dominator of every node except EXIT (Cooper, Harvey, Kennedy)."""
    preds_rev = cfg.succs  # predecessors in the reversed graph are CFG successors
    succs_rev = cfg.preds()
    order: list[int] = []
    seen = {EXIT}
    stack = [(EXIT, iter(succs_rev[EXIT]))]
    while stack:
        node, it = stack[-1]
        for nxt in it:
            if nxt not in seen:
                seen.add(nxt)
                stack.append((nxt, iter(succs_rev[nxt])))
                break
        else:
            order.append(node)
            stack.pop()
    rank = {n: i for i, n in enumerate(order)}  # postorder number
    idom: dict[int, int] = {EXIT: EXIT}

    def intersect(a: int, b: int) -> int:
        while a != b:
            while rank[a] < rank[b]:
                a = idom[a]
            while rank[b] < rank[a]:
                b = idom[b]
        return a

    changed = True
    while changed:
        changed = False
        for n in reversed(order):
            if n == EXIT:
                continue
            done = [p for p in preds_rev[n] if p in idom]
            if not done:
                continue
            new = done[0]
            for p in done[1:]:
                new = intersect(p, new)
            if idom.get(n) != new:
                idom[n] = new
                changed = True
    del idom[EXIT]
    return idom


def control_dependences(cfg: Cfg, pdom: dict[int, int]) -> frozenset[tuple[int, int]]:
    """Pairs ``(dependent, predicate)``; ``predicate`` is ENTRY for top-level statements
    and for statements no predicate governs (unreachable ones, say).

    Only real branch nodes (two or more natural successors) act as predicates;
    artificial exit edges never create dependences.
    """
    deps: set[tuple[int, int]] = set()
    for p in range(cfg.size):
        succs = [s for s in cfg.succs[p] if not (p in cfg.augmented and s == EXIT)]
        if len(succs) < 2:
            continue
        stop = pdom.get(p)
        for s in succs:
            runner = s
            while runner != stop and runner != EXIT:
                deps.add((runner, p))
                runner = pdom[runner]
    # ENTRY acts as a predicate choosing between the body and EXIT: it governs
    # every node post-dominating the first statement (top-level loop headers
    # included, which otherwise depend only on themselves)
    runner = cfg.succs[ENTRY][0]
    while runner != EXIT:
        deps.add((runner, ENTRY))
        runner = pdom[runner]
    dependent = {n for n, _ in deps}
    deps.update((n, ENTRY) for n in range(cfg.size) if n not in dependent)
    return frozenset(deps)
