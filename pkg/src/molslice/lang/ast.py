"""Syntax tree for MOL.

Every node carries ``span = (start, end)`` byte offsets into the source text.
The checker fills in ``ty`` on expressions and the resolution slots
(``field``, ``static_class``) in place.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

Span = tuple[int, int]


@dataclass(eq=False)
class TypeRef:
    name: str
    span: Span


# -- expressions -----------------------------------------------------------


@dataclass(eq=False)
class IntLit:
    value: int
    span: Span
    ty: Optional[str] = None


@dataclass(eq=False)
class BoolLit:
    value: bool
    span: Span
    ty: Optional[str] = None


@dataclass(eq=False)
class StrLit:
    value: str
    span: Span
    ty: Optional[str] = None


@dataclass(eq=False)
class NullLit:
    span: Span
    ty: Optional[str] = None


@dataclass(eq=False)
class New:
    cls: str
    span: Span
    ty: Optional[str] = None


@dataclass(eq=False)
class Input:
    key: str
    span: Span
    ty: Optional[str] = None


@dataclass(eq=False)
class Var:
    name: str  # includes "this"
    span: Span
    ty: Optional[str] = None


@dataclass(eq=False)
class FieldAccess:
    obj: "Expr"
    name: str
    span: Span
    ty: Optional[str] = None
    field: Optional[str] = None  # declaring "C.f" after checking


@dataclass(eq=False)
class Call:
    obj: "Expr"
    name: str
    args: list["Expr"]
    span: Span
    ty: Optional[str] = None
    static_class: Optional[str] = None


@dataclass(eq=False)
class Binary:
    op: str
    left: "Expr"
    right: "Expr"
    span: Span
    ty: Optional[str] = None


@dataclass(eq=False)
class Unary:
    op: str  # "!" or "-"
    operand: "Expr"
    span: Span
    ty: Optional[str] = None


Expr = Union[IntLit, BoolLit, StrLit, NullLit, New, Input, Var, FieldAccess, Call, Binary, Unary]


# -- statements ------------------------------------------------------------


@dataclass(eq=False)
class Block:
    stmts: list["Stmt"]
    span: Span


@dataclass(eq=False)
class VarDecl:
    type: TypeRef
    name: str
    init: Optional[Expr]
    span: Span


@dataclass(eq=False)
class Assign:
    name: str
    value: Expr
    span: Span


@dataclass(eq=False)
class FieldAssign:
    target: FieldAccess
    value: Expr
    span: Span


@dataclass(eq=False)
class If:
    cond: Expr
    then: Block
    orelse: Optional[Block]
    span: Span


@dataclass(eq=False)
class While:
    cond: Expr
    body: Block
    span: Span


@dataclass(eq=False)
class Return:
    value: Optional[Expr]
    span: Span


@dataclass(eq=False)
class Print:
    value: Expr
    span: Span


@dataclass(eq=False)
class ExprStmt:
    expr: Call
    span: Span


Stmt = Union[VarDecl, Assign, FieldAssign, If, While, Return, Print, ExprStmt]


# -- declarations ----------------------------------------------------------


@dataclass(eq=False)
class Param:
    type: TypeRef
    name: str
    span: Span


@dataclass(eq=False)
class FieldDecl:
    type: TypeRef
    name: str
    span: Span


@dataclass(eq=False)
class MethodDecl:
    ret: Optional[TypeRef]  # None means void
    name: str
    params: list[Param]
    body: Block
    span: Span
    locals: dict[str, str] = field(default_factory=dict)  # filled by the checker

    @property
    def ret_type(self) -> str:
        return self.ret.name if self.ret is not None else "void"


@dataclass(eq=False)
class ClassDecl:
    name: str
    superclass: Optional[str]
    fields: list[FieldDecl]
    methods: list[MethodDecl]
    span: Span
    super_span: Optional[Span] = None


@dataclass(eq=False)
class Program:
    classes: list[ClassDecl]
    main: Block
    main_span: Span
    source: str = field(repr=False, default="")
    span: Span = (0, 0)
    main_locals: dict[str, str] = field(default_factory=dict)
    checked: bool = False

    def class_named(self, name: str) -> Optional[ClassDecl]:
        for c in self.classes:
            if c.name == name:
                return c
        return None
