"""Tokenizer for MOL source text."""

from __future__ import annotations

import re
from dataclasses import dataclass

from molslice.errors import Diagnostic, MolSyntaxError

KEYWORDS = frozenset(
    {
        "class", "extends", "field", "method", "void", "main", "var", "if", "else",
        "while", "return", "print", "new", "input", "null", "true", "false", "this",
        "int", "bool", "string",
    }
)

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>//[^\n]*)
  | (?P<int>[0-9]+)
  | (?P<id>[A-Za-z_$][A-Za-z0-9_$]*)
  | (?P<string>"(?:[^"\\\n]|\\.)*")
  | (?P<op>==|!=|<=|>=|&&|\|\||[{}();,.=+\-*/%<>!])
    """,
    re.VERBOSE,
)

_ESCAPES = {"n": "\n", "t": "\t", '"': '"', "\\": "\\"}


@dataclass(frozen=True)
class Token:
    kind: str  # "int", "id", "string", "kw", "op", "eof"
    text: str
    start: int
    end: int
    line: int
    col: int

    @property
    def value(self):
        if self.kind == "int":
            return int(self.text)
        if self.kind == "string":
            return unescape(self.text[1:-1])
        return self.text

    def describe(self) -> str:
        return "end of input" if self.kind == "eof" else repr(self.text)


def unescape(body: str) -> str:
    return re.sub(r"\\(.)", lambda m: _ESCAPES.get(m.group(1), m.group(1)), body)


def escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n").replace("\t", "\\t")


def position(source: str, offset: int) -> tuple[int, int]:
    """1-based (line, column) of a byte offset."""
    line = source.count("\n", 0, offset) + 1
    col = offset - (source.rfind("\n", 0, offset) + 1) + 1
    return line, col


def tokenize(source: str) -> list[Token]:
    tokens: list[Token] = []
    pos = 0
    line, line_start = 1, 0
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            raise MolSyntaxError(
                [Diagnostic(line, pos - line_start + 1, f"unexpected character {source[pos]!r}", pos)]
            )
        kind = m.lastgroup
        text = m.group()
        if kind not in ("ws", "comment"):
            if kind == "id" and text in KEYWORDS:
                kind = "kw"
            tokens.append(Token(kind, text, pos, m.end(), line, pos - line_start + 1))
        newlines = text.count("\n")
        if newlines:
            line += newlines
            line_start = pos + text.rfind("\n") + 1
        pos = m.end()
    tokens.append(Token("eof", "", pos, pos, line, pos - line_start + 1))
    return tokens
