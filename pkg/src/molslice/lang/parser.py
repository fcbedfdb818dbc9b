"""Recursive-descent parser for MOL.

Grammar (authoritative; see README for the prose version)::

    program    := classdecl* "main" block
    classdecl  := "class" ID ("extends" ID)? "{" (fielddecl | methoddecl)* "}"
    fielddecl  := "field" type ID ";"
    methoddecl := "method" (type | "void") ID "(" params? ")" block
    params     := type ID ("," type ID)*
    type       := "int" | "bool" | "string" | ID
    block      := "{" stmt* "}"
    stmt       := "var" type ID ("=" expr)? ";"
                | ID "=" expr ";"
                | postfix "." ID "=" expr ";"
                | "if" "(" expr ")" block ("else" (block | ifstmt))?
                | "while" "(" expr ")" block
                | "return" expr? ";"
                | "print" "(" expr ")" ";"
                | postfix "." ID "(" args? ")" ";"
    expr       := or ;  precedence  || < && < == != < relational < + - < * / % < unary ! -
    postfix    := primary ("." ID ("(" args? ")")?)*
    primary    := INT | STRING | "true" | "false" | "null" | "this" | ID
                | "new" ID | "input" "(" STRING ")" | "(" expr ")"
"""

from __future__ import annotations

from molslice.errors import Diagnostic, MolSyntaxError
from molslice.lang import ast
from molslice.lang.lexer import Token, position, tokenize

_BINARY_LEVELS = [
    ("||",),
    ("&&",),
    ("==", "!="),
    ("<", "<=", ">", ">="),
    ("+", "-"),
    ("*", "/", "%"),
]

_PRIMITIVES = ("int", "bool", "string")


class _Parser:
    def __init__(self, source: str):
        self.source = source
        self.tokens = tokenize(source)
        self.pos = 0

    # -- token helpers ---------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def peek(self, k: int = 1) -> Token:
        return self.tokens[min(self.pos + k, len(self.tokens) - 1)]

    def at(self, *texts: str) -> bool:
        t = self.tok
        return t.kind in ("kw", "op") and t.text in texts

    def advance(self) -> Token:
        t = self.tok
        if t.kind != "eof":
            self.pos += 1
        return t

    def fail(self, expected: str):
        t = self.tok
        raise MolSyntaxError(
            [Diagnostic(t.line, t.col, f"expected {expected}, got {t.describe()}", t.start)]
        )

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.fail(repr(text))
        return self.advance()

    def expect_id(self, what: str = "identifier") -> Token:
        if self.tok.kind != "id":
            self.fail(what)
        return self.advance()

    # -- declarations ----------------------------------------------------

    def program(self) -> ast.Program:
        classes = []
        while self.at("class"):
            classes.append(self.classdecl())
        if not self.at("main"):
            self.fail("'class' or 'main'")
        start = self.advance().start
        body = self.block()
        if self.tok.kind != "eof":
            self.fail("end of input")
        return ast.Program(classes, body, (start, body.span[1]), self.source, (0, len(self.source)))

    def classdecl(self) -> ast.ClassDecl:
        start = self.expect("class").start
        name = self.expect_id("class name").text
        sup, sup_span = None, None
        if self.at("extends"):
            self.advance()
            st = self.expect_id("superclass name")
            sup, sup_span = st.text, (st.start, st.end)
        self.expect("{")
        fields, methods = [], []
        while not self.at("}"):
            if self.at("field"):
                fields.append(self.fielddecl())
            elif self.at("method"):
                methods.append(self.methoddecl())
            else:
                self.fail("'field', 'method' or '}'")
        end = self.expect("}").end
        return ast.ClassDecl(name, sup, fields, methods, (start, end), sup_span)

    def type_ref(self) -> ast.TypeRef:
        t = self.tok
        if (t.kind == "kw" and t.text in _PRIMITIVES) or t.kind == "id":
            self.advance()
            return ast.TypeRef(t.text, (t.start, t.end))
        self.fail("type")

    def fielddecl(self) -> ast.FieldDecl:
        start = self.expect("field").start
        ty = self.type_ref()
        name = self.expect_id("field name").text
        end = self.expect(";").end
        return ast.FieldDecl(ty, name, (start, end))

    def methoddecl(self) -> ast.MethodDecl:
        start = self.expect("method").start
        if self.at("void"):
            self.advance()
            ret = None
        else:
            ret = self.type_ref()
        name = self.expect_id("method name").text
        self.expect("(")
        params = []
        if not self.at(")"):
            while True:
                ty = self.type_ref()
                pt = self.expect_id("parameter name")
                params.append(ast.Param(ty, pt.text, (ty.span[0], pt.end)))
                if not self.at(","):
                    break
                self.advance()
        self.expect(")")
        body = self.block()
        return ast.MethodDecl(ret, name, params, body, (start, body.span[1]))

    # -- statements ------------------------------------------------------

    def block(self) -> ast.Block:
        start = self.expect("{").start
        stmts = []
        while not self.at("}"):
            if self.tok.kind == "eof":
                self.fail("'}'")
            stmts.append(self.statement())
        end = self.advance().end
        return ast.Block(stmts, (start, end))

    def statement(self) -> ast.Stmt:
        t = self.tok
        if self.at("var"):
            self.advance()
            ty = self.type_ref()
            name = self.expect_id("variable name").text
            init = None
            if self.at("="):
                self.advance()
                init = self.expr()
            end = self.expect(";").end
            return ast.VarDecl(ty, name, init, (t.start, end))
        if self.at("if"):
            return self.if_stmt()
        if self.at("while"):
            self.advance()
            self.expect("(")
            cond = self.expr()
            self.expect(")")
            body = self.block()
            return ast.While(cond, body, (t.start, body.span[1]))
        if self.at("return"):
            self.advance()
            value = None if self.at(";") else self.expr()
            end = self.expect(";").end
            return ast.Return(value, (t.start, end))
        if self.at("print"):
            self.advance()
            self.expect("(")
            value = self.expr()
            self.expect(")")
            end = self.expect(";").end
            return ast.Print(value, (t.start, end))
        if t.kind == "id" or self.at("this", "(", "new"):
            lhs = self.postfix()
            if self.at("="):
                self.advance()
                value = self.expr()
                end = self.expect(";").end
                if isinstance(lhs, ast.Var) and lhs.name != "this":
                    return ast.Assign(lhs.name, value, (t.start, end))
                if isinstance(lhs, ast.FieldAccess):
                    return ast.FieldAssign(lhs, value, (t.start, end))
                raise MolSyntaxError(
                    [Diagnostic(t.line, t.col, "invalid assignment target", t.start)]
                )
            if isinstance(lhs, ast.Call):
                end = self.expect(";").end
                return ast.ExprStmt(lhs, (t.start, end))
            self.fail("'=' or method call")
        self.fail("statement")

    def if_stmt(self) -> ast.If:
        start = self.expect("if").start
        self.expect("(")
        cond = self.expr()
        self.expect(")")
        then = self.block()
        orelse = None
        end = then.span[1]
        if self.at("else"):
            self.advance()
            if self.at("if"):
                nested = self.if_stmt()
                orelse = ast.Block([nested], nested.span)
            else:
                orelse = self.block()
            end = orelse.span[1]
        return ast.If(cond, then, orelse, (start, end))

    # -- expressions -----------------------------------------------------

    def expr(self, level: int = 0) -> ast.Expr:
        if level == len(_BINARY_LEVELS):
            return self.unary()
        left = self.expr(level + 1)
        while self.tok.kind == "op" and self.tok.text in _BINARY_LEVELS[level]:
            op = self.advance().text
            right = self.expr(level + 1)
            left = ast.Binary(op, left, right, (left.span[0], right.span[1]))
        return left

    def unary(self) -> ast.Expr:
        if self.at("-") and self.peek().kind == "int":
            t = self.advance()
            lit = self.advance()
            return ast.IntLit(-lit.value, (t.start, lit.end))
        if self.at("!", "-"):
            t = self.advance()
            operand = self.unary()
            return ast.Unary(t.text, operand, (t.start, operand.span[1]))
        return self.postfix()

    def postfix(self) -> ast.Expr:
        e = self.primary()
        while self.at("."):
            self.advance()
            nt = self.expect_id("member name")
            if self.at("("):
                self.advance()
                args = []
                if not self.at(")"):
                    while True:
                        args.append(self.expr())
                        if not self.at(","):
                            break
                        self.advance()
                end = self.expect(")").end
                e = ast.Call(e, nt.text, args, (e.span[0], end))
            else:
                e = ast.FieldAccess(e, nt.text, (e.span[0], nt.end))
        return e

    def primary(self) -> ast.Expr:
        t = self.tok
        sp = (t.start, t.end)
        if t.kind == "int":
            self.advance()
            return ast.IntLit(t.value, sp)
        if t.kind == "string":
            self.advance()
            return ast.StrLit(t.value, sp)
        if t.kind == "id":
            self.advance()
            return ast.Var(t.text, sp)
        if self.at("true", "false"):
            self.advance()
            return ast.BoolLit(t.text == "true", sp)
        if self.at("null"):
            self.advance()
            return ast.NullLit(sp)
        if self.at("this"):
            self.advance()
            return ast.Var("this", sp)
        if self.at("new"):
            self.advance()
            ct = self.expect_id("class name")
            return ast.New(ct.text, (t.start, ct.end))
        if self.at("input"):
            self.advance()
            self.expect("(")
            if self.tok.kind != "string":
                self.fail("string key")
            key = self.advance().value
            end = self.expect(")").end
            return ast.Input(key, (t.start, end))
        if self.at("("):
            self.advance()
            e = self.expr()
            e.span = (t.start, self.expect(")").end)  # cover the parentheses
            return e
        self.fail("expression")


def _check_duplicates(prog: ast.Program, source: str) -> None:
    diags = []

    def dup(span, what):
        line, col = position(source, span[0])
        diags.append(Diagnostic(line, col, f"duplicate declaration of {what}", span[0]))

    seen_classes = set()
    for c in prog.classes:
        if c.name in seen_classes or c.name == "Main":
            dup(c.span, f"class {c.name}")
        seen_classes.add(c.name)
        members = set()
        for f in c.fields:
            if f.name in members:
                dup(f.span, f"member {c.name}.{f.name}")
            members.add(f.name)
        for m in c.methods:
            if m.name in members:
                dup(m.span, f"member {c.name}.{m.name}")
            members.add(m.name)
            names = set()
            for p in m.params:
                if p.name in names or p.name == "this":
                    dup(p.span, f"parameter {p.name}")
                names.add(p.name)
    if diags:
        raise MolSyntaxError(diags)


def parse(source: str) -> ast.Program:
    """Parse MOL text; raises :class:`MolSyntaxError` with positioned diagnostics."""
    prog = _Parser(source).program()
    _check_duplicates(prog, source)
    return prog
