"""Entry specialization: bind inputs to constants and prune infeasible code.

Bound ``input(k)`` reads become constant assignments.  A conditional
constant propagation over ``int``/``bool`` locals then decides branches:
a predicate that always falls through becomes ``nop``, one that always jumps
becomes ``goto``, and statements on no executable path become ``nop``.  No
statement is renumbered, so ids stay valid across specialization.
"""

from __future__ import annotations

import logging
from dataclasses import replace
from typing import Mapping, Optional

from molslice.analysis.cfg import ENTRY, EXIT, build_cfg
from molslice.errors import MolRuntimeError, SpecError
from molslice.lang.ir import MethodIR, ProgramIR, Stmt
from molslice.lang.values import binop, default_value, wrap

log = logging.getLogger(__name__)

BOTTOM = object()  # not a constant
_TRACKED = ("int", "bool")


def _meet(a, b):
    if a is BOTTOM or b is BOTTOM:
        return BOTTOM
    if type(a) is type(b) and a == b:
        return a
    return BOTTOM


def _meet_env(a: Optional[dict], b: dict) -> dict:
    if a is None:
        return dict(b)
    return {v: _meet(a[v], b[v]) for v in a}


def _transfer(s: Stmt, env: dict) -> dict:
    if s.target is None or s.target not in env:
        return env
    out = dict(env)
    if s.kind == "const-assign":
        out[s.target] = s.literal
    elif s.kind == "copy":
        out[s.target] = env.get(s.args[0], BOTTOM)
    elif s.kind == "binop":
        a, b = (env.get(x, BOTTOM) for x in s.args)
        if a is BOTTOM or b is BOTTOM:
            out[s.target] = BOTTOM
        else:
            try:
                out[s.target] = binop(s.op, a, b)
            except MolRuntimeError:
                out[s.target] = BOTTOM
    else:
        out[s.target] = BOTTOM
    return out


def propagate(m: MethodIR) -> tuple[set[int], dict[int, dict]]:
    """Executable statements and the constant environment before each one."""
    cfg = build_cfg(m)
    types = m.var_types
    params = {p for p, _ in m.params} | {"this"}
    start = {
        v: (BOTTOM if v in params else default_value(t))
        for v, t in types.items()
        if t in _TRACKED
    }
    env_in: dict[int, dict] = {}
    executable: set[int] = set()
    work = [(ENTRY, cfg.succs[ENTRY][0], start)]
    while work:
        _, node, env = work.pop(0)
        if node == EXIT:
            continue
        merged = _meet_env(env_in.get(node), env)
        if node in executable and merged == env_in[node]:
            continue
        env_in[node] = merged
        executable.add(node)
        s = m.stmts[node]
        out = _transfer(s, merged)
        if s.kind == "if-goto":
            c = merged.get(s.args[0], BOTTOM)
            fall = node + 1 if node + 1 < len(m.stmts) else EXIT
            jump = s.jump if s.jump < len(m.stmts) else EXIT
            if c is True:
                nxt = [fall]
            elif c is False:
                nxt = [jump]
            else:
                nxt = [fall, jump]
        else:
            nxt = [x for x in cfg.succs[node] if not (node in cfg.augmented and x == EXIT)]
        for x in nxt:
            work.append((node, x, out))
    return executable, env_in


def _specialize_method(m: MethodIR) -> MethodIR:
    executable, env_in = propagate(m)
    stmts = []
    for s in m.stmts:
        if s.index not in executable:
            s = replace(s, kind="nop", target=None, args=(), op=None, literal=None,
                        field=None, cls=None, name=None, key=None, jump=None)
        elif s.kind == "if-goto":
            c = env_in[s.index].get(s.args[0], BOTTOM)
            if c is True:
                s = replace(s, kind="nop", args=(), jump=None)
            elif c is False:
                s = replace(s, kind="goto", args=())
        stmts.append(s)
    return replace(m, stmts=tuple(stmts))


def input_keys(ir: ProgramIR) -> set[str]:
    return {s.key for s in ir.all_stmts() if s.kind == "input-read"}


def specialize(ir: ProgramIR, entry: Optional[str] = None, bindings: Mapping[str, int] = ()) -> ProgramIR:
    """Specialize ``ir`` for inputs fixed by ``bindings``.

    With no bindings the program is returned unchanged.
    """
    bindings = dict(bindings)
    for k, v in bindings.items():
        if isinstance(v, bool) or not isinstance(v, int):
            raise SpecError(f"binding {k}={v!r} is not an integer")
    entry = entry or ir.entry
    if entry != ir.entry:
        ir.method(entry)  # validates the name
    keys = input_keys(ir)
    for k in sorted(set(bindings) - keys):
        log.warning("binding %s is never read by the program", k)
    if not bindings:
        return ir
    methods = []
    for m in ir.methods:
        stmts = tuple(
            replace(s, kind="const-assign", literal=wrap(bindings[s.key]), key=None)
            if s.kind == "input-read" and s.key in bindings
            else s
            for s in m.stmts
        )
        methods.append(_specialize_method(replace(m, stmts=stmts)))
    return ProgramIR(ir.classes, tuple(methods), ir.entry, ir.source)
