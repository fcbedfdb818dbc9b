"""Canonical IR listings and source reconstruction from statement subsets."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable

from molslice.errors import SliceError
from molslice.lang.ir import (
    ENTRY_METHOD, IfShape, MethodIR, ProgramIR, Shape, Simple, Stmt, WhileShape, render_literal,
)

_STRUCTURAL = ("goto", "nop", "if-goto")


def pretty_print(ir: ProgramIR) -> str:
    """Deterministic listing: one statement per line, ids included."""
    lines = [
        "; MOL three-address listing",
        f"; entry {ir.entry}",
    ]
    for c in ir.classes:
        ext = f" extends {c.superclass}" if c.superclass else ""
        lines.append(f"class {c.name}{ext}")
        for f in c.fields:
            lines.append(f"  field {f.type} {f.name}")
    for m in ir.methods:
        params = ", ".join(f"{t} {n}" for n, t in m.params)
        lines.append(f"method {m.ret} {m.qname}({params})")
        if m.locals:
            lines.append("  locals " + ", ".join(f"{t} {n}" for n, t in m.locals))
        for s in m.stmts:
            lines.append(f"  {s.id}: {s.render()}")
    return "\n".join(lines) + "\n"


# -- reconstruction --------------------------------------------------------


def _source_literal(value: object) -> str:
    return render_literal(value)


def statement_source(s: Stmt) -> str:
    """MOL text for one IR statement; it lowers back to exactly that statement."""
    k, t = s.kind, s.target
    if k == "const-assign":
        return f"{t} = {_source_literal(s.literal)};"
    if k == "return":
        return f"return {s.args[0]};" if s.args else "return;"
    if k == "print":
        return f"print({s.args[0]});"
    if k == "field-write":
        return f"{s.args[0]}.{_field_name(s)} = {s.args[1]};"
    rhs = _rhs(s, lambda v: v)
    return f"{t} = {rhs};" if t is not None else f"{rhs};"


def _field_name(s: Stmt) -> str:
    return s.field.split(".", 1)[1]


def _rhs(s: Stmt, operand) -> str:
    k = s.kind
    if k == "const-assign":
        return _source_literal(s.literal)
    if k == "copy":
        return operand(s.args[0])
    if k == "binop":
        return f"({operand(s.args[0])} {s.op} {operand(s.args[1])})"
    if k == "field-read":
        return f"{operand(s.args[0])}.{_field_name(s)}"
    if k == "new":
        return f"new {s.cls}"
    if k == "virtual-call":
        args = ", ".join(operand(a) for a in s.args[1:])
        return f"{operand(s.args[0])}.{s.name}({args})"
    if k == "input-read":
        return f'input("{s.key}")'
    raise ValueError(f"no expression form for {k}")


@dataclass(frozen=True)
class Reconstruction:
    source: str
    closure: frozenset[str]  # statement ids present in the emitted program
    origins: dict  # statement id -> (start, end) of the text emitted for it


class _Writer:
    def __init__(self):
        self.parts: list[str] = []
        self.offset = 0

    def write(self, text: str) -> tuple[int, int]:
        start = self.offset
        self.parts.append(text)
        self.offset += len(text)
        return start, self.offset

    def text(self) -> str:
        return "".join(self.parts)


def _closure_of_shape(m: MethodIR, shape: Iterable[Shape], keep: set[int]) -> bool:
    """Add to ``keep`` (indices) every live predicate governing a kept statement.

    Statements of a loop header run once per iteration, so they count as
    governed by the loop predicate as well.
    """
    any_kept = False
    for item in shape:
        if isinstance(item, Simple):
            any_kept |= item.index in keep
            continue
        if isinstance(item, IfShape):
            inner = _closure_of_shape(m, item.then, keep)
            if item.orelse is not None:
                inner |= _closure_of_shape(m, item.orelse, keep)
        else:
            inner = _closure_of_shape(m, item.body, keep)
            inner |= any(i in keep for i in item.cond)
        if inner and m.stmts[item.pred].kind == "if-goto":
            keep.add(item.pred)
        any_kept |= inner or item.pred in keep or any(i in keep for i in item.cond)
    return any_kept


def _inlinable(m: MethodIR, cond: tuple[int, ...], pred: int, kept: set[int]) -> set[int]:
    """Kept condition statements feeding the predicate through kept statements."""
    defs = {m.stmts[i].target: i for i in cond if i in kept}
    out: set[int] = set()
    stack = [m.stmts[pred].args[0]]
    while stack:
        i = defs.get(stack.pop())
        if i is not None and i not in out:
            out.add(i)
            stack.extend(m.stmts[i].args)
    return out


class _Reconstructor:
    def __init__(self, ir: ProgramIR, keep: set[str]):
        self.ir = ir
        self.full = keep >= set(ir.stmt_map)
        self.kept: dict[str, set[int]] = {}
        for sid in keep:
            s = ir.stmt(sid)
            self.kept.setdefault(s.method, set()).add(s.index)
        for qn, idx in self.kept.items():
            m = ir.method(qn)
            _closure_of_shape(m, m.shape, idx)
        self.w = _Writer()
        self.origins: dict[str, tuple[int, int]] = {}

    # -- member selection --------------------------------------------------

    def select(self) -> None:
        ir = self.ir
        if self.full:
            self.methods = {m.qname for m in ir.methods}
            self.classes = {c.name for c in ir.classes}
            self.fields = set(ir.field_map)
            self.locals = {m.qname: {n for n, _ in m.locals} for m in ir.methods}
            return
        methods = set(self.kept) | {ENTRY_METHOD}
        fields: set[str] = set()
        classes: set[str] = set()
        used_locals: dict[str, set[str]] = {}
        # receivers of kept calls are allocated by kept statements, so only
        # overrides in those classes can run
        made = set()
        for qn, idx in self.kept.items():
            made.update(ir.method(qn).stmts[i].cls for i in idx if ir.method(qn).stmts[i].kind == "new")
        for qn, idx in self.kept.items():
            m = ir.method(qn)
            names = used_locals.setdefault(qn, set())
            for i in idx:
                s = m.stmts[i]
                for v in s.slots():
                    if v is not None and v != "this" and v not in dict(m.params):
                        names.add(v)
                if s.field:
                    fields.add(s.field)
                if s.kind == "new":
                    classes.add(s.cls)
                if s.kind == "virtual-call":
                    for c in ir.subclasses(s.cls):
                        target = ir.lookup_method(c, s.name)
                        if target is not None and (c == s.cls or c in made):
                            methods.add(target.qname)
        types: set[str] = set()
        for qn in methods:
            m = ir.method(qn)
            if qn != ENTRY_METHOD:
                classes.add(m.owner)
            types.add(m.ret)
            types.update(t for _, t in m.params)
            types.update(m.var_types[v] for v in used_locals.get(qn, ()))
        for f in fields:
            classes.add(f.split(".", 1)[0])
            types.add(ir.field_map[f].type)
        classes.update(t for t in types if t in ir.class_map)
        closed: set[str] = set()
        for c in classes:
            closed.update(x.name for x in ir.chain(c))
        self.methods = methods
        self.classes = closed
        self.fields = fields
        self.locals = used_locals

    # -- emission ------------------------------------------------------------

    def emit_program(self) -> str:
        ir, w = self.ir, self.w
        for c in ir.classes:
            if c.name not in self.classes:
                continue
            ext = f" extends {c.superclass}" if c.superclass else ""
            w.write(f"class {c.name}{ext} {{\n")
            for f in c.fields:
                if f.qname in self.fields:
                    w.write(f"  field {f.type} {f.name};\n")
            for m in ir.methods_of(c.name):
                if m.qname in self.methods:
                    ret = "void" if m.ret == "void" else m.ret
                    params = ", ".join(f"{t} {n}" for n, t in m.params)
                    w.write(f"  method {ret} {m.name}({params}) {{\n")
                    self.emit_body(m, 2)
                    w.write("  }\n")
            w.write("}\n\n")
        w.write("main {\n")
        self.emit_body(ir.method(ENTRY_METHOD), 1)
        w.write("}\n")
        return w.text()

    def emit_body(self, m: MethodIR, depth: int) -> None:
        kept = self.kept.get(m.qname, set())
        declared = self.locals.get(m.qname, set()) - _inlined_temps(m, m.shape, kept)
        pad = "  " * depth
        for name, ty in m.locals:
            if name in declared:
                self.w.write(f"{pad}var {ty} {name};\n")
        self.emit_shape(m, m.shape, self.kept.get(m.qname, set()), depth)

    def emit_stmt(self, m: MethodIR, i: int, depth: int) -> None:
        s = m.stmts[i]
        self.w.write("  " * depth)
        self.origins[s.id] = self.w.write(statement_source(s))
        self.w.write("\n")

    def emit_plain(self, m: MethodIR, indices: Iterable[int], kept: set[int], depth: int) -> None:
        for i in indices:
            if i in kept and m.stmts[i].kind not in _STRUCTURAL:
                self.emit_stmt(m, i, depth)

    def emit_condition(self, m: MethodIR, cond: tuple[int, ...], pred: int) -> None:
        kept = self.kept.get(m.qname, set())
        defs = {m.stmts[i].target: m.stmts[i] for i in _inlinable(m, cond, pred, kept)}
        start = self.w.offset
        self._write_operand(m.stmts[pred].args[0], defs)
        self.origins[m.stmts[pred].id] = (start, self.w.offset)

    def _write_operand(self, v: str, defs: dict[str, Stmt]) -> None:
        s = defs.get(v)
        if s is None:
            self.w.write(v)
            return
        start = self.w.offset
        k = s.kind
        if k == "binop":
            self.w.write("(")
            self._write_operand(s.args[0], defs)
            self.w.write(f" {s.op} ")
            self._write_operand(s.args[1], defs)
            self.w.write(")")
        elif k == "field-read":
            self._write_operand(s.args[0], defs)
            self.w.write(f".{_field_name(s)}")
        elif k == "virtual-call":
            self._write_operand(s.args[0], defs)
            self.w.write(f".{s.name}(")
            for j, a in enumerate(s.args[1:]):
                if j:
                    self.w.write(", ")
                self._write_operand(a, defs)
            self.w.write(")")
        elif k == "copy":
            self._write_operand(s.args[0], defs)
        else:
            self.w.write(_rhs(s, lambda x: x))
        self.origins[s.id] = (start, self.w.offset)

    def emit_shape(self, m: MethodIR, shape, kept: set[int], depth: int) -> None:
        pad = "  " * depth
        for item in shape:
            if isinstance(item, Simple):
                self.emit_plain(m, (item.index,), kept, depth)
                continue
            pred = m.stmts[item.pred]
            if isinstance(item, IfShape):
                if pred.kind == "if-goto" and item.pred in kept:
                    inl = _inlinable(m, item.cond, item.pred, kept)
                    self.emit_plain(m, (i for i in item.cond if i not in inl), kept, depth)
                    self.w.write(f"{pad}if (")
                    self.emit_condition(m, item.cond, item.pred)
                    self.w.write(") {\n")
                    self.emit_shape(m, item.then, kept, depth + 1)
                    if item.orelse is not None:
                        self.w.write(f"{pad}}} else {{\n")
                        self.emit_shape(m, item.orelse, kept, depth + 1)
                    self.w.write(f"{pad}}}\n")
                else:
                    self.emit_plain(m, item.cond, kept, depth)
                    if pred.kind == "nop":
                        self.emit_shape(m, item.then, kept, depth)
                    elif pred.kind == "goto" and item.orelse is not None:
                        self.emit_shape(m, item.orelse, kept, depth)
            else:
                if pred.kind == "if-goto" and item.pred in kept:
                    inl = _inlinable(m, item.cond, item.pred, kept)
                    self.emit_plain(m, (i for i in item.cond if i not in inl), kept, depth)
                    self.w.write(f"{pad}while (")
                    self.emit_condition(m, item.cond, item.pred)
                    self.w.write(") {\n")
                    self.emit_shape(m, item.body, kept, depth + 1)
                    self.w.write(f"{pad}}}\n")
                elif pred.kind == "nop":
                    self.w.write(f"{pad}while (true) {{\n")
                    self.emit_plain(m, item.cond, kept, depth + 1)
                    self.emit_shape(m, item.body, kept, depth + 1)
                    self.w.write(f"{pad}}}\n")
                else:
                    self.emit_plain(m, item.cond, kept, depth)


def _inlined_temps(m: MethodIR, shape, kept: set[int]) -> set[str]:
    """Temporaries that only live inside a condition emitted as an expression."""
    out: set[str] = set()
    for item in shape:
        if isinstance(item, Simple):
            continue
        if item.pred in kept and m.stmts[item.pred].kind == "if-goto":
            out.update(m.stmts[i].target for i in _inlinable(m, item.cond, item.pred, kept))
        if isinstance(item, IfShape):
            out |= _inlined_temps(m, item.then, kept)
            if item.orelse is not None:
                out |= _inlined_temps(m, item.orelse, kept)
        else:
            out |= _inlined_temps(m, item.body, kept)
    return out


def canonical_listing(ir: ProgramIR) -> str:
    """:func:`pretty_print` with compiler temporaries renumbered by first use.

    Two programs are isomorphic when their canonical listings are equal.
    """
    pattern = re.compile(r"\$t\d+")
    lines = [
        "; MOL three-address listing",
        f"; entry {ir.entry}",
    ]
    for c in ir.classes:
        ext = f" extends {c.superclass}" if c.superclass else ""
        lines.append(f"class {c.name}{ext}")
        lines.extend(f"  field {f.type} {f.name}" for f in c.fields)
    for m in ir.methods:
        names: dict[str, str] = {}

        def rename(match) -> str:
            return names.setdefault(match.group(0), f"$t{len(names)}")

        body = [f"  #{s.index}: {pattern.sub(rename, s.render())}" for s in m.stmts]
        params = ", ".join(f"{t} {n}" for n, t in m.params)
        lines.append(f"method {m.ret} {m.qname}({params})")
        decls = sorted(f"{t} {names.get(n, n)}" for n, t in m.locals if not pattern.fullmatch(n) or n in names)
        if decls:
            lines.append("  locals " + ", ".join(decls))
        lines.extend(body)
    return "\n".join(lines) + "\n"


def reconstruct(ir: ProgramIR, keep: Iterable[str]) -> Reconstruction:
    keep = set(keep)
    if not keep:
        raise SliceError("empty slice")
    unknown = keep - set(ir.stmt_map)
    if unknown:
        raise SliceError(f"unknown statements: {', '.join(sorted(unknown))}")
    r = _Reconstructor(ir, keep)
    r.select()
    text = r.emit_program()
    closure = frozenset(
        m.stmt_id(i)
        for qn, idx in r.kept.items()
        for m in (ir.method(qn),)
        for i in idx
        if m.stmts[i].kind not in ("goto", "nop")
    )
    return Reconstruction(text, closure, dict(r.origins))


def reconstruct_source(ir: ProgramIR, keep: Iterable[str]) -> str:
    """Runnable MOL source holding the executability closure of ``keep``."""
    return reconstruct(ir, keep).source
