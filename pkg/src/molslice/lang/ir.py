"""Three-address intermediate representation.

A method body is a flat tuple of :class:`Stmt`; statement ``k`` of method
``C.m`` has id ``C.m#k``.  Operands are always variable names (locals,
parameters, ``this`` or compiler temporaries ``$tN``); literals only appear in
``const-assign``.  Next to the flat list every method keeps the structured
shape it was lowered from (:class:`Simple`, :class:`IfShape`,
:class:`WhileShape`), which source reconstruction walks.

``if-goto`` jumps to ``jump`` when its operand is *false* and falls through
otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator, Optional, Union

from molslice.errors import MolError

Span = tuple[int, int]

KINDS = (
    "const-assign", "copy", "binop", "field-read", "field-write", "new",
    "virtual-call", "print", "input-read", "if-goto", "goto", "return", "nop",
)

ENTRY_METHOD = "Main.main"


@dataclass(frozen=True)
class Stmt:
    id: str
    index: int
    kind: str
    span: Span
    target: Optional[str] = None
    args: tuple[str, ...] = ()
    op: Optional[str] = None
    literal: object = None
    field: Optional[str] = None  # declaring "C.f"
    cls: Optional[str] = None  # allocated class, or static receiver class of a call
    name: Optional[str] = None  # called method name
    key: Optional[str] = None  # input key
    jump: Optional[int] = None

    @property
    def method(self) -> str:
        return self.id.rsplit("#", 1)[0]

    def defs(self) -> tuple[str, ...]:
        return (self.target,) if self.target is not None else ()

    def uses(self) -> tuple[str, ...]:
        return self.args

    def slots(self) -> tuple[Optional[str], ...]:
        """Operand positions: the defined variable first, then the used ones."""
        return (self.target,) + self.args

    def render(self) -> str:
        k = self.kind
        t = self.target
        if k == "const-assign":
            return f"{t} = {render_literal(self.literal)}"
        if k == "copy":
            return f"{t} = {self.args[0]}"
        if k == "binop":
            return f"{t} = {self.args[0]} {self.op} {self.args[1]}"
        if k == "field-read":
            return f"{t} = {self.args[0]}.{self.field.split('.', 1)[1]}"
        if k == "field-write":
            return f"{self.args[0]}.{self.field.split('.', 1)[1]} = {self.args[1]}"
        if k == "new":
            return f"{t} = new {self.cls}"
        if k == "virtual-call":
            call = f"{self.args[0]}.{self.name}({', '.join(self.args[1:])})"
            return f"{t} = {call}" if t is not None else call
        if k == "print":
            return f"print({self.args[0]})"
        if k == "input-read":
            return f'{t} = input("{self.key}")'
        if k == "if-goto":
            return f"if !{self.args[0]} goto {self.jump}"
        if k == "goto":
            return f"goto {self.jump}"
        if k == "return":
            return f"return {self.args[0]}" if self.args else "return"
        return "nop"


def render_literal(value: object) -> str:
    from molslice.lang.lexer import escape

    if value is None:
        return "null"
    if value is True:
        return "true"
    if value is False:
        return "false"
    if isinstance(value, str):
        return f'"{escape(value)}"'
    return str(value)


# -- structured shape ------------------------------------------------------


@dataclass(frozen=True)
class Simple:
    index: int


@dataclass(frozen=True)
class IfShape:
    cond: tuple[int, ...]
    pred: int
    then: tuple["Shape", ...]
    orelse: Optional[tuple["Shape", ...]]
    skip: Optional[int]  # goto over the else arm
    span: Span


@dataclass(frozen=True)
class WhileShape:
    cond: tuple[int, ...]
    pred: int
    body: tuple["Shape", ...]
    back: int
    span: Span


Shape = Union[Simple, IfShape, WhileShape]


# -- program ---------------------------------------------------------------


@dataclass(frozen=True)
class FieldIR:
    owner: str
    name: str
    type: str

    @property
    def qname(self) -> str:
        return f"{self.owner}.{self.name}"


@dataclass(frozen=True)
class ClassIR:
    name: str
    superclass: Optional[str]
    fields: tuple[FieldIR, ...]


@dataclass(frozen=True)
class MethodIR:
    owner: str
    name: str
    params: tuple[tuple[str, str], ...]  # (name, type), excluding the receiver
    ret: str
    locals: tuple[tuple[str, str], ...]  # declared locals and temporaries, in order
    stmts: tuple[Stmt, ...]
    shape: tuple[Shape, ...]
    span: Span

    @property
    def qname(self) -> str:
        return f"{self.owner}.{self.name}"

    @property
    def is_entry(self) -> bool:
        return self.qname == ENTRY_METHOD

    @property
    def formals(self) -> tuple[str, ...]:
        """Formal-in slots: ``this`` (absent for the entry) then parameters."""
        names = tuple(p for p, _ in self.params)
        return names if self.is_entry else ("this",) + names

    @cached_property
    def var_types(self) -> dict[str, str]:
        types = dict(self.locals)
        types.update(self.params)
        if not self.is_entry:
            types["this"] = self.owner
        return types

    def stmt_id(self, k: int) -> str:
        return f"{self.qname}#{k}"


@dataclass(frozen=True)
class ProgramIR:
    classes: tuple[ClassIR, ...]
    methods: tuple[MethodIR, ...]
    entry: str = ENTRY_METHOD
    source: str = field(default="", repr=False, compare=False)

    @cached_property
    def class_map(self) -> dict[str, ClassIR]:
        return {c.name: c for c in self.classes}

    @cached_property
    def method_map(self) -> dict[str, MethodIR]:
        return {m.qname: m for m in self.methods}

    @cached_property
    def stmt_map(self) -> dict[str, Stmt]:
        return {s.id: s for m in self.methods for s in m.stmts}

    @cached_property
    def field_map(self) -> dict[str, FieldIR]:
        return {f.qname: f for c in self.classes for f in c.fields}

    def method(self, qname: str) -> MethodIR:
        try:
            return self.method_map[qname]
        except KeyError:
            raise MolError(f"unknown method {qname}") from None

    def stmt(self, sid: str) -> Stmt:
        try:
            return self.stmt_map[sid]
        except KeyError:
            raise MolError(f"unknown statement {sid}") from None

    def all_stmts(self) -> Iterator[Stmt]:
        for m in self.methods:
            yield from m.stmts

    def chain(self, cls: str) -> list[ClassIR]:
        out = []
        while cls is not None and cls in self.class_map:
            c = self.class_map[cls]
            out.append(c)
            cls = c.superclass
        return out

    def is_subclass(self, sub: str, sup: str) -> bool:
        return any(c.name == sup for c in self.chain(sub))

    def subclasses(self, cls: str) -> list[str]:
        """The cone of ``cls``: itself and every transitive subclass, in declaration order."""
        return [c.name for c in self.classes if self.is_subclass(c.name, cls)]

    def lookup_method(self, cls: str, name: str) -> Optional[MethodIR]:
        for c in self.chain(cls):
            m = self.method_map.get(f"{c.name}.{name}")
            if m is not None:
                return m
        return None

    def resolve_field(self, cls: str, name: str) -> Optional[FieldIR]:
        for c in self.chain(cls):
            for f in c.fields:
                if f.name == name:
                    return f
        return None

    def methods_of(self, cls: str) -> list[MethodIR]:
        return [m for m in self.methods if m.owner == cls]
