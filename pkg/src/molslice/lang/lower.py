"""Lowering of checked MOL trees to the three-address IR."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from molslice.errors import MolError
from molslice.lang import ast
from molslice.lang.ir import (
    ENTRY_METHOD, ClassIR, FieldIR, IfShape, MethodIR, ProgramIR, Simple, Stmt, WhileShape,
)

_LITERALS = (ast.IntLit, ast.BoolLit, ast.StrLit, ast.NullLit)


@dataclass
class _Pending:
    kind: str
    span: tuple[int, int]
    kw: dict


class _MethodLowerer:
    def __init__(self, qname: str, declared: dict[str, str], visible: set[str]):
        self.qname = qname
        self.locals = dict(declared)
        self.visible = set(visible) | set(declared)
        self.pending: list[_Pending] = []
        self.counter = 0
        self.field_types: dict[str, str] = {}
        self.param_types: dict[tuple[str, str], list[str]] = {}
        self.ret_type = "void"

    # -- emission --------------------------------------------------------

    def emit(self, kind: str, span, **kw) -> int:
        self.pending.append(_Pending(kind, tuple(span), kw))
        return len(self.pending) - 1

    def here(self) -> int:
        return len(self.pending)

    def temp(self, ty: str) -> str:
        while True:
            name = f"$t{self.counter}"
            self.counter += 1
            if name not in self.visible:
                break
        self.visible.add(name)
        self.locals[name] = ty
        return name

    # -- expressions -----------------------------------------------------

    def to_var(self, e: ast.Expr, expected: Optional[str] = None) -> str:
        if isinstance(e, ast.Var):
            return e.name
        ty = e.ty
        if isinstance(e, ast.NullLit) or ty == "null":
            if expected is None:
                raise MolError("cannot infer a type for null")
            ty = expected
        t = self.temp(ty)
        self.into(e, t)
        return t

    def into(self, e: ast.Expr, target: Optional[str]) -> None:
        sp = e.span
        if isinstance(e, _LITERALS):
            value = None if isinstance(e, ast.NullLit) else e.value
            self.emit("const-assign", sp, target=target, literal=value)
        elif isinstance(e, ast.Var):
            self.emit("copy", sp, target=target, args=(e.name,))
        elif isinstance(e, ast.New):
            self.emit("new", sp, target=target, cls=e.cls)
        elif isinstance(e, ast.Input):
            self.emit("input-read", sp, target=target, key=e.key)
        elif isinstance(e, ast.FieldAccess):
            base = self.to_var(e.obj)
            self.emit("field-read", sp, target=target, args=(base,), field=e.field)
        elif isinstance(e, ast.Call):
            recv = self.to_var(e.obj)
            ptypes = self.param_types[(e.static_class, e.name)]
            args = tuple(self.to_var(a, pt) for a, pt in zip(e.args, ptypes))
            self.emit(
                "virtual-call", sp, target=target, args=(recv,) + args,
                cls=e.static_class, name=e.name,
            )
        elif isinstance(e, ast.Binary):
            lt = e.right.ty if e.left.ty == "null" else None
            rt = e.left.ty if e.right.ty == "null" else None
            left = self.to_var(e.left, lt)
            right = self.to_var(e.right, rt)
            self.emit("binop", sp, target=target, args=(left, right), op=e.op)
        elif isinstance(e, ast.Unary):
            if e.op == "!":
                v = self.to_var(e.operand)
                f = self.temp("bool")
                self.emit("const-assign", sp, target=f, literal=False)
                self.emit("binop", sp, target=target, args=(v, f), op="==")
            else:
                z = self.temp("int")
                self.emit("const-assign", sp, target=z, literal=0)
                v = self.to_var(e.operand)
                self.emit("binop", sp, target=target, args=(z, v), op="-")
        else:
            raise TypeError(f"unexpected expression {e!r}")

    # -- statements ------------------------------------------------------

    def block(self, b: ast.Block) -> list:
        shape: list = []
        for s in b.stmts:
            shape.extend(self.stmt(s))
        return shape

    def simple_range(self, start: int) -> list:
        return [Simple(i) for i in range(start, self.here())]

    def stmt(self, s: ast.Stmt) -> list:
        start = self.here()
        if isinstance(s, ast.VarDecl):
            if s.init is not None:
                self.into(s.init, s.name)
            return self.simple_range(start)
        if isinstance(s, ast.Assign):
            self.into(s.value, s.name)
            return self.simple_range(start)
        if isinstance(s, ast.FieldAssign):
            base = self.to_var(s.target.obj)
            value = self.to_var(s.value, self.field_types[s.target.field])
            self.emit("field-write", s.span, args=(base, value), field=s.target.field)
            return self.simple_range(start)
        if isinstance(s, ast.Print):
            v = self.to_var(s.value)
            self.emit("print", s.span, args=(v,))
            return self.simple_range(start)
        if isinstance(s, ast.Return):
            args = () if s.value is None else (self.to_var(s.value, self.ret_type),)
            self.emit("return", s.span, args=args)
            return self.simple_range(start)
        if isinstance(s, ast.ExprStmt):
            self.into(s.expr, None)
            return self.simple_range(start)
        if isinstance(s, ast.If):
            c = self.to_var(s.cond)
            cond = tuple(range(start, self.here()))
            pred = self.emit("if-goto", s.cond.span, args=(c,), jump=None)
            then = self.block(s.then)
            skip = None
            orelse = None
            if s.orelse is not None:
                skip = self.emit("goto", s.span, jump=None)
                self.pending[pred].kw["jump"] = self.here()
                orelse = tuple(self.block(s.orelse))
                self.pending[skip].kw["jump"] = self.here()
            else:
                self.pending[pred].kw["jump"] = self.here()
            return [IfShape(cond, pred, tuple(then), orelse, skip, s.span)]
        if isinstance(s, ast.While):
            c = self.to_var(s.cond)
            cond = tuple(range(start, self.here()))
            pred = self.emit("if-goto", s.cond.span, args=(c,), jump=None)
            body = self.block(s.body)
            back = self.emit("goto", s.span, jump=start)
            self.pending[pred].kw["jump"] = self.here()
            return [WhileShape(cond, pred, tuple(body), back, s.span)]
        raise TypeError(f"unexpected statement {s!r}")

    def finish(self, shape: list, end_span) -> tuple[tuple[Stmt, ...], tuple]:
        n = self.here()
        if any(p.kw.get("jump") == n for p in self.pending):
            self.emit("nop", end_span)
            shape.append(Simple(n))
        stmts = tuple(
            Stmt(id=f"{self.qname}#{i}", index=i, kind=p.kind, span=p.span, **p.kw)
            for i, p in enumerate(self.pending)
        )
        return stmts, tuple(shape)


def lower(prog: ast.Program) -> ProgramIR:
    """Lower a checked program; each source statement maps to one or more IR statements."""
    if not prog.checked:
        raise MolError("program must be checked before lowering")
    classes = tuple(
        ClassIR(c.name, c.superclass, tuple(FieldIR(c.name, f.name, f.type.name) for f in c.fields))
        for c in prog.classes
    )
    field_types = {f.qname: f.type for c in classes for f in c.fields}
    param_types: dict[tuple[str, str], list[str]] = {}
    table = {c.name: c for c in prog.classes}

    def sig(cls: str, name: str) -> list[str]:
        while cls is not None:
            c = table[cls]
            for m in c.methods:
                if m.name == name:
                    return [p.type.name for p in m.params]
            cls = c.superclass
        raise MolError(f"unknown method {name}")

    # every (static class, name) pair reachable through inheritance
    for c in prog.classes:
        cls = c.name
        chain_names = set()
        k = cls
        while k is not None:
            for m in table[k].methods:
                chain_names.add(m.name)
            k = table[k].superclass
        for name in chain_names:
            param_types[(cls, name)] = sig(cls, name)

    methods = []

    def lower_method(owner, decl_name, params, ret, declared, body, span) -> MethodIR:
        qname = f"{owner}.{decl_name}"
        visible = {p for p, _ in params} | ({"this"} if qname != ENTRY_METHOD else set())
        lw = _MethodLowerer(qname, declared, visible)
        lw.field_types = field_types
        lw.param_types = param_types
        lw.ret_type = ret
        shape = lw.block(body)
        stmts, shape = lw.finish(shape, (body.span[1] - 1, body.span[1]))
        return MethodIR(owner, decl_name, tuple(params), ret, tuple(lw.locals.items()), stmts, shape, span)

    for c in prog.classes:
        for m in c.methods:
            params = [(p.name, p.type.name) for p in m.params]
            methods.append(lower_method(c.name, m.name, params, m.ret_type, m.locals, m.body, m.span))
    owner, name = ENTRY_METHOD.split(".")
    methods.append(lower_method(owner, name, [], "void", prog.main_locals, prog.main, prog.main_span))
    return ProgramIR(classes, tuple(methods), ENTRY_METHOD, prog.source)


def compile_source(source: str) -> ProgramIR:
    """parse + resolve_and_check + lower."""
    from molslice.lang.checker import resolve_and_check
    from molslice.lang.parser import parse

    return lower(resolve_and_check(parse(source)))
