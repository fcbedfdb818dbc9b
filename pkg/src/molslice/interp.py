"""Reference interpreter for the IR and the slice-preservation harness."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

from molslice.analysis.specialize import input_keys
from molslice.errors import MolError, MolRuntimeError
from molslice.lang.ir import ProgramIR
from molslice.lang.values import binop, default_value, wrap

DEFAULT_STEP_LIMIT = 1_000_000

OK = "ok"
RUNTIME_ERROR = "runtime-error"
NONTERMINATION = "nontermination"


@dataclass(frozen=True)
class RunInput:
    bindings: Mapping[str, int] = field(default_factory=dict)
    step_limit: int = DEFAULT_STEP_LIMIT

    def __post_init__(self):
        if self.step_limit <= 0:
            raise ValueError("step limit must be positive")


@dataclass
class Trace:
    output: list
    criterion_values: dict  # point key -> list of values
    steps: int
    status: str = OK
    error: Optional[str] = None
    dispatches: set = field(default_factory=set)  # (call id, target method)
    receivers: set = field(default_factory=set)  # (call id, runtime receiver class)

    @property
    def ok(self) -> bool:
        return self.status == OK


class Obj:
    __slots__ = ("cls", "fields")

    def __init__(self, cls: str, fields: dict):
        self.cls = cls
        self.fields = fields

    def __repr__(self) -> str:
        return f"<{self.cls}>"


def point_key(sid: str, designator: str) -> str:
    return f"{sid}:{designator}"


def observe(value):
    """Comparable form of a runtime value; objects compare by class."""
    if isinstance(value, Obj):
        return f"<{value.cls}>"
    return value


class _Frame:
    __slots__ = ("method", "stmts", "env", "pc", "call")

    def __init__(self, method, env, call=None):
        self.method = method
        self.stmts = method.stmts
        self.env = env
        self.pc = 0
        self.call = call  # the caller's call statement awaiting this frame's result


def _field_defaults(ir: ProgramIR, cls: str) -> dict:
    out = {}
    for c in ir.chain(cls):
        for f in c.fields:
            out[f.qname] = default_value(f.type)
    return out


def run(ir: ProgramIR, inp: RunInput = RunInput(), points: Iterable[tuple[str, str]] = ()) -> Trace:
    """Execute from the entry method; ``points`` are recorded as they complete."""
    watch: dict[str, list[str]] = {}
    for sid, d in points:
        watch.setdefault(sid, []).append(d)
    values: dict[str, list] = {point_key(sid, d): [] for sid, ds in watch.items() for d in ds}
    trace = Trace([], values, 0)
    bindings = inp.bindings
    limit = inp.step_limit
    ir_lookup = ir.lookup_method
    defaults_cache: dict[str, dict] = {}

    def new_env(m) -> dict:
        return {v: default_value(t) for v, t in m.var_types.items()}

    def record(s, frame, written=None) -> None:
        for d in watch[s.id]:
            if s.kind == "field-write" and d == s.field:
                v = written
            else:
                v = frame.env.get(d)
            values[point_key(s.id, d)].append(observe(v))

    entry = ir.method(ir.entry)
    frames = [_Frame(entry, new_env(entry))]
    steps = 0
    try:
        while frames:
            f = frames[-1]
            if f.pc >= len(f.stmts):
                _return(frames, trace, default_value(f.method.ret), record, watch)
                continue
            s = f.stmts[f.pc]
            steps += 1
            if steps > limit:
                trace.status = NONTERMINATION
                trace.error = f"step limit {limit} exceeded"
                break
            k = s.kind
            env = f.env
            f.pc += 1
            written = None
            if k == "const-assign":
                env[s.target] = s.literal
            elif k == "copy":
                env[s.target] = env[s.args[0]]
            elif k == "binop":
                env[s.target] = binop(s.op, env[s.args[0]], env[s.args[1]])
            elif k == "field-read":
                o = env[s.args[0]]
                if o is None:
                    raise MolRuntimeError(f"null dereference at {s.id}")
                env[s.target] = o.fields[s.field]
            elif k == "field-write":
                o = env[s.args[0]]
                if o is None:
                    raise MolRuntimeError(f"null dereference at {s.id}")
                written = o.fields[s.field] = env[s.args[1]]
            elif k == "new":
                if s.cls not in defaults_cache:
                    defaults_cache[s.cls] = _field_defaults(ir, s.cls)
                env[s.target] = Obj(s.cls, dict(defaults_cache[s.cls]))
            elif k == "input-read":
                env[s.target] = wrap(int(bindings.get(s.key, 0)))
            elif k == "print":
                trace.output.append(env[s.args[0]])
            elif k == "if-goto":
                if not env[s.args[0]]:
                    f.pc = s.jump
            elif k == "goto":
                f.pc = s.jump
            elif k == "return":
                value = env[s.args[0]] if s.args else None
                if s.id in watch:
                    record(s, f)
                _return(frames, trace, value, record, watch)
                continue
            elif k == "virtual-call":
                o = env[s.args[0]]
                if o is None:
                    raise MolRuntimeError(f"null receiver at {s.id}")
                target = ir_lookup(o.cls, s.name)
                trace.dispatches.add((s.id, target.qname))
                trace.receivers.add((s.id, o.cls))
                callee_env = new_env(target)
                callee_env["this"] = o
                for (p, _), a in zip(target.params, s.args[1:]):
                    callee_env[p] = env[a]
                frames.append(_Frame(target, callee_env, s))
                continue
            # nop: nothing
            if s.id in watch:
                record(s, f, written)
    except MolRuntimeError as e:
        trace.status = RUNTIME_ERROR
        trace.error = str(e)
    trace.steps = min(steps, limit)
    return trace


def _return(frames, trace, value, record, watch) -> None:
    done = frames.pop()
    if not frames:
        return
    caller = frames[-1]
    s = done.call
    if s.target is not None:
        caller.env[s.target] = value
    if s.id in watch:
        record(s, caller)


def trace_criterion(ir: ProgramIR, criterion, inp: RunInput = RunInput()) -> Trace:
    """Run while recording every point of ``criterion`` (a SlicingCriterion)."""
    return run(ir, inp, criterion.points)


# -- random inputs -----------------------------------------------------------


def random_inputs(ir: ProgramIR, n: int, seed: int = 0, step_limit: int = DEFAULT_STEP_LIMIT) -> list[RunInput]:
    """Seeded input vectors: half the values near zero, the rest in [-100, 100]."""
    rng = random.Random(seed)
    keys = sorted(input_keys(ir))
    out = []
    for _ in range(n):
        b = {}
        for k in keys:
            b[k] = rng.randint(-2, 2) if rng.random() < 0.5 else rng.randint(-100, 100)
        out.append(RunInput(b, step_limit))
    return out


# -- slice preservation --------------------------------------------------------


@dataclass
class Verdict:
    passed: bool
    counterexamples: list  # RunInput values where the slice disagrees
    failure: Optional[str] = None  # None | "reconstruction" | "counterexample"
    message: str = ""
    statements: frozenset = frozenset()
    compared: int = 0  # inputs on which the original run terminated normally
    source: str = ""

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "failure": self.failure,
            "message": self.message,
            "compared": self.compared,
            "counterexamples": [dict(sorted(c.bindings.items())) for c in self.counterexamples],
            "statements": sorted(self.statements),
        }


def remap_points(ir: ProgramIR, rec, new_ir: ProgramIR, points) -> dict:
    """Map criterion points of ``ir`` to the re-lowered reconstruction ``new_ir``."""
    out = {}
    for sid, d in points:
        s = ir.stmt(sid)
        start, end = rec.origins[sid]
        best = None
        for t in new_ir.method(s.method).stmts:
            if t.kind == s.kind and start <= t.span[0] and t.span[1] <= end:
                if best is None or (t.span[1] - t.span[0]) > (best.span[1] - best.span[0]):
                    best = t
        if best is None:
            raise MolError(f"criterion statement {sid} has no counterpart in the reconstruction")
        if s.kind == "field-write" and d == s.field:
            out[(sid, d)] = (best.id, best.field)
        else:
            slot = s.slots().index(d)
            out[(sid, d)] = (best.id, best.slots()[slot])
    return out


def check_statements(
    ir: ProgramIR, points, statements: Iterable[str], inputs: Sequence[RunInput], stop_early: bool = False,
) -> Verdict:
    """Compare criterion values of ``ir`` against the program rebuilt from ``statements``."""
    from molslice.lang.lower import compile_source
    from molslice.lang.printer import reconstruct

    statements = frozenset(statements)
    try:
        rec = reconstruct(ir, statements)
        new_ir = compile_source(rec.source)
        mapping = remap_points(ir, rec, new_ir, points)
    except MolError as e:
        return Verdict(False, [], "reconstruction", str(e), statements)
    counter = []
    compared = 0
    for inp in inputs:
        t1 = run(ir, inp, mapping.keys())
        if not t1.ok:
            continue
        compared += 1
        t2 = run(new_ir, inp, mapping.values())
        same = t2.ok and all(
            t1.criterion_values[point_key(*p)] == t2.criterion_values[point_key(*q)] for p, q in mapping.items()
        )
        if not same:
            counter.append(inp)
            if stop_early:
                break
    if counter:
        return Verdict(False, counter, "counterexample", f"{len(counter)} counterexample input(s)",
                       statements, compared, rec.source)
    return Verdict(True, [], None, "", statements, compared, rec.source)


def check_slice(ir: ProgramIR, criterion, inputs: Sequence[RunInput], mode: str = "points-to", sdg=None) -> Verdict:
    """Slice backward, rebuild source, re-lower and compare criterion values per input.

    ``criterion`` is a criterion string, a list of them, or a resolved
    :class:`~molslice.slicing.criterion.SlicingCriterion`.  Inputs on which the
    original program does not terminate normally are skipped.
    """
    from molslice.slicing.criterion import SlicingCriterion, resolve_criterion
    from molslice.slicing.sdg import analyze
    from molslice.slicing.slicer import backward_slice

    g = sdg if sdg is not None else analyze(ir, mode)
    if not isinstance(criterion, SlicingCriterion):
        criterion = resolve_criterion(criterion, ir, "backward", pts=g.pts)
    result = backward_slice(g, criterion)
    return check_statements(ir, criterion.points, result.statements, inputs)


# -- seeded faults ---------------------------------------------------------------


@dataclass(frozen=True)
class Mutant:
    edge: tuple  # (src node, dst node, tag, label) removed from the SDG
    statements: frozenset  # slice computed without that edge


def edge_mutants(sdg, criterion, count: int = 20, seed: int = 0) -> list[Mutant]:
    """Single data/control edge deletions that change the backward slice."""
    from molslice.slicing.sdg import summary_edges
    from molslice.slicing.slicer import backward_slice

    base = backward_slice(sdg, criterion).statements
    inside = base_nodes(sdg, base)
    candidates = sorted(e for e in sdg.edges if e[2] in ("data", "control") and e[0] in inside and e[1] in inside)
    rng = random.Random(seed)
    rng.shuffle(candidates)
    out = []
    for e in candidates:
        if len(out) >= count:
            break
        g = _without(sdg, e)
        summary_edges(g)
        stmts = backward_slice(g, criterion).statements
        if stmts != base:
            out.append(Mutant(e, stmts))
    return out


def base_nodes(sdg, statements) -> set[int]:
    return {n.id for n in sdg.nodes if n.stmt is None or n.stmt in statements}


def _without(sdg, edge):
    from molslice.slicing.sdg import Sdg

    g = Sdg(sdg.ir, sdg.cg, sdg.pts)
    g.nodes = list(sdg.nodes)
    g.entry_of, g.stmt_node = dict(sdg.entry_of), dict(sdg.stmt_node)
    g.ain, g.aout, g.fin, g.fout = dict(sdg.ain), dict(sdg.aout), dict(sdg.fin), dict(sdg.fout)
    g.out_edges = {n.id: set() for n in g.nodes}
    g.in_edges = {n.id: set() for n in g.nodes}
    for e in sdg.edges:
        if e != edge and e[2] != "summary":
            g.add_edge(*e)
    return g
