"""Name resolution and type checking.

Annotates the tree in place: expression ``ty``, ``FieldAccess.field`` (the
declaring ``C.f``), ``Call.static_class`` and the per-method ``locals`` table.
Locals are method-scoped: a ``var`` makes the name visible to every later
statement of the method, and names may not be redeclared.
"""

from __future__ import annotations

from typing import Optional

from molslice.errors import Diagnostic, MolCheckError
from molslice.lang import ast
from molslice.lang.lexer import position

PRIMITIVES = frozenset({"int", "bool", "string"})
PRINTABLE = PRIMITIVES


class ClassTable:
    """Inheritance-aware lookup over the class declarations of a program."""

    def __init__(self, prog: ast.Program):
        self.classes = {c.name: c for c in prog.classes}

    def exists(self, name: str) -> bool:
        return name in self.classes

    def chain(self, name: str) -> list[ast.ClassDecl]:
        out, seen = [], set()
        while name is not None and name in self.classes and name not in seen:
            seen.add(name)
            c = self.classes[name]
            out.append(c)
            name = c.superclass
        return out

    def is_subclass(self, sub: str, sup: str) -> bool:
        return any(c.name == sup for c in self.chain(sub))

    def lookup_field(self, cls: str, name: str) -> Optional[tuple[str, ast.FieldDecl]]:
        for c in self.chain(cls):
            for f in c.fields:
                if f.name == name:
                    return c.name, f
        return None

    def lookup_method(self, cls: str, name: str) -> Optional[tuple[str, ast.MethodDecl]]:
        for c in self.chain(cls):
            for m in c.methods:
                if m.name == name:
                    return c.name, m
        return None


def is_ref(ty: Optional[str]) -> bool:
    return ty is not None and ty not in PRIMITIVES and ty != "void"


class _Checker:
    def __init__(self, prog: ast.Program):
        self.prog = prog
        self.source = prog.source
        self.table = ClassTable(prog)
        self.diags: list[Diagnostic] = []
        # per-method state
        self.scope: dict[str, str] = {}
        self.ret_type = "void"
        self.in_main = False

    def error(self, span, message: str) -> None:
        line, col = position(self.source, span[0])
        self.diags.append(Diagnostic(line, col, message, span[0]))

    # -- declarations ----------------------------------------------------

    def valid_type(self, t: ast.TypeRef) -> bool:
        if t.name in PRIMITIVES or self.table.exists(t.name):
            return True
        self.error(t.span, f"unknown type {t.name}")
        return False

    def assignable(self, src: Optional[str], dst: str) -> bool:
        if src is None:
            return True  # already reported
        if src == dst:
            return True
        if src == "null":
            return is_ref(dst)
        if is_ref(src) and is_ref(dst):
            return self.table.is_subclass(src, dst)
        return False

    def check_hierarchy(self) -> None:
        for c in self.prog.classes:
            if c.superclass is not None and not self.table.exists(c.superclass):
                self.error(c.super_span or c.span, f"unknown class {c.superclass}")
        for c in self.prog.classes:
            seen, name = set(), c.name
            while name is not None and name in self.table.classes:
                if name in seen:
                    self.error(c.span, f"inheritance cycle involving {c.name}")
                    return
                seen.add(name)
                name = self.table.classes[name].superclass

    def check_members(self) -> None:
        for c in self.prog.classes:
            for f in c.fields:
                self.valid_type(f.type)
            inherited = self.table.chain(c.superclass) if c.superclass else []
            for f in c.fields:
                for anc in inherited:
                    if any(x.name == f.name for x in anc.fields + anc.methods):
                        self.error(f.span, f"field {c.name}.{f.name} hides inherited member {anc.name}.{f.name}")
                        break
            for m in c.methods:
                if m.ret is not None:
                    self.valid_type(m.ret)
                for p in m.params:
                    self.valid_type(p.type)
                for anc in inherited:
                    if any(x.name == m.name for x in anc.fields):
                        self.error(m.span, f"method {c.name}.{m.name} hides inherited field {anc.name}.{m.name}")
                        break
                    over = next((x for x in anc.methods if x.name == m.name), None)
                    if over is not None:
                        if [p.type.name for p in over.params] != [p.type.name for p in m.params] or (
                            over.ret_type != m.ret_type
                        ):
                            self.error(
                                m.span,
                                f"override signature clash: {c.name}.{m.name} vs {anc.name}.{m.name}",
                            )
                        break

    # -- bodies ------------------------------------------------------------

    def check_bodies(self) -> None:
        for c in self.prog.classes:
            for m in c.methods:
                self.scope = {"this": c.name}
                for p in m.params:
                    self.scope[p.name] = p.type.name
                self.ret_type = m.ret_type
                self.in_main = False
                m.locals = {}
                self.locals = m.locals
                self.block(m.body)
        self.scope = {}
        self.ret_type = "void"
        self.in_main = True
        self.prog.main_locals = {}
        self.locals = self.prog.main_locals
        self.block(self.prog.main)

    def block(self, b: ast.Block) -> None:
        for s in b.stmts:
            self.stmt(s)

    def stmt(self, s: ast.Stmt) -> None:
        if isinstance(s, ast.VarDecl):
            ok = self.valid_type(s.type)
            if s.init is not None:
                ty = self.expr(s.init)
                if ok and not self.assignable(ty, s.type.name):
                    self.error(s.init.span, f"type mismatch: cannot assign {ty} to {s.type.name}")
            if s.name in self.scope or s.name == "this":
                self.error(s.span, f"duplicate declaration of variable {s.name}")
            else:
                self.scope[s.name] = s.type.name
                self.locals[s.name] = s.type.name
        elif isinstance(s, ast.Assign):
            ty = self.expr(s.value)
            target = self.scope.get(s.name)
            if target is None:
                self.error(s.span, f"unknown variable {s.name}")
            elif not self.assignable(ty, target):
                self.error(s.value.span, f"type mismatch: cannot assign {ty} to {target}")
        elif isinstance(s, ast.FieldAssign):
            target = self.expr(s.target)
            ty = self.expr(s.value)
            if target is not None and not self.assignable(ty, target):
                self.error(s.value.span, f"type mismatch: cannot assign {ty} to {target}")
        elif isinstance(s, ast.If):
            self.condition(s.cond)
            self.block(s.then)
            if s.orelse is not None:
                self.block(s.orelse)
        elif isinstance(s, ast.While):
            self.condition(s.cond)
            self.block(s.body)
        elif isinstance(s, ast.Return):
            if s.value is None:
                if self.ret_type != "void":
                    self.error(s.span, f"missing return value of type {self.ret_type}")
            else:
                ty = self.expr(s.value)
                if self.ret_type == "void":
                    self.error(s.span, "void method cannot return a value")
                elif not self.assignable(ty, self.ret_type):
                    self.error(s.value.span, f"type mismatch: cannot return {ty} as {self.ret_type}")
        elif isinstance(s, ast.Print):
            ty = self.expr(s.value)
            if ty is not None and ty not in PRINTABLE:
                self.error(s.value.span, f"cannot print value of type {ty}")
        elif isinstance(s, ast.ExprStmt):
            self.expr(s.expr, allow_void=True)

    def condition(self, e: ast.Expr) -> None:
        ty = self.expr(e)
        if ty is not None and ty != "bool":
            self.error(e.span, f"type mismatch: condition must be bool, got {ty}")

    def expr(self, e: ast.Expr, allow_void: bool = False) -> Optional[str]:
        ty = self._expr(e)
        if ty == "void" and not allow_void:
            self.error(e.span, "void method result used as a value")
            ty = None
        e.ty = ty
        return ty

    def _expr(self, e: ast.Expr) -> Optional[str]:
        if isinstance(e, ast.IntLit):
            return "int"
        if isinstance(e, ast.BoolLit):
            return "bool"
        if isinstance(e, ast.StrLit):
            return "string"
        if isinstance(e, ast.NullLit):
            return "null"
        if isinstance(e, ast.Input):
            return "int"
        if isinstance(e, ast.New):
            if not self.table.exists(e.cls):
                self.error(e.span, f"unknown class {e.cls}")
                return None
            return e.cls
        if isinstance(e, ast.Var):
            if e.name == "this" and self.in_main:
                self.error(e.span, "'this' is not available in main")
                return None
            ty = self.scope.get(e.name)
            if ty is None:
                self.error(e.span, f"unknown variable {e.name}")
            return ty
        if isinstance(e, ast.FieldAccess):
            obj = self.expr(e.obj)
            if obj is None:
                return None
            if not is_ref(obj) or obj == "null":
                self.error(e.span, f"field access on non-object type {obj}")
                return None
            found = self.table.lookup_field(obj, e.name)
            if found is None:
                self.error(e.span, f"unknown field {obj}.{e.name}")
                return None
            owner, decl = found
            e.field = f"{owner}.{decl.name}"
            return decl.type.name
        if isinstance(e, ast.Call):
            obj = self.expr(e.obj)
            arg_types = [self.expr(a) for a in e.args]
            if obj is None:
                return None
            if not is_ref(obj) or obj == "null":
                self.error(e.span, f"method call on non-object type {obj}")
                return None
            found = self.table.lookup_method(obj, e.name)
            if found is None:
                self.error(e.span, f"unknown method {obj}.{e.name}")
                return None
            _, decl = found
            e.static_class = obj
            if len(decl.params) != len(e.args):
                self.error(e.span, f"{obj}.{e.name} expects {len(decl.params)} arguments, got {len(e.args)}")
            else:
                for a, aty, p in zip(e.args, arg_types, decl.params):
                    if not self.assignable(aty, p.type.name):
                        self.error(a.span, f"type mismatch: cannot pass {aty} as {p.type.name}")
            return decl.ret_type
        if isinstance(e, ast.Unary):
            ty = self.expr(e.operand)
            want = "bool" if e.op == "!" else "int"
            if ty is not None and ty != want:
                self.error(e.span, f"type mismatch: operator {e.op} needs {want}, got {ty}")
            return want
        if isinstance(e, ast.Binary):
            lt = self.expr(e.left)
            rt = self.expr(e.right)
            if lt is None or rt is None:
                return _RESULT.get(e.op)
            op = e.op
            if op in ("-", "*", "/", "%", "<", "<=", ">", ">="):
                if lt != "int" or rt != "int":
                    self.error(e.span, f"type mismatch: operator {op} needs int operands, got {lt} and {rt}")
            elif op == "+":
                if not (lt == rt and lt in ("int", "string")):
                    self.error(e.span, f"type mismatch: operator + needs int or string operands, got {lt} and {rt}")
                return lt if lt in ("int", "string") else "int"
            elif op in ("&&", "||"):
                if lt != "bool" or rt != "bool":
                    self.error(e.span, f"type mismatch: operator {op} needs bool operands, got {lt} and {rt}")
            elif op in ("==", "!="):
                if lt == "null" and rt == "null":
                    self.error(e.span, "cannot compare null with null")
                elif is_ref(lt) and is_ref(rt):
                    pass
                elif lt != rt:
                    self.error(e.span, f"type mismatch: cannot compare {lt} with {rt}")
            return _RESULT[op]
        raise TypeError(f"unexpected expression {e!r}")


_RESULT = {
    "+": "int", "-": "int", "*": "int", "/": "int", "%": "int",
    "<": "bool", "<=": "bool", ">": "bool", ">=": "bool",
    "==": "bool", "!=": "bool", "&&": "bool", "||": "bool",
}


def resolve_and_check(prog: ast.Program) -> ast.Program:
    """Bind names and type every expression; raises :class:`MolCheckError`."""
    c = _Checker(prog)
    c.check_hierarchy()
    if c.diags:
        raise MolCheckError(c.diags)
    c.check_members()
    c.check_bodies()
    if c.diags:
        raise MolCheckError(sorted(c.diags, key=lambda d: d.offset))
    prog.checked = True
    return prog
