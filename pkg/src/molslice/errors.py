"""Exception types shared across the toolchain."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Diagnostic:
    line: int
    col: int
    message: str
    offset: int = 0

    def __str__(self) -> str:
        return f"{self.line}:{self.col}: {self.message}"


class MolError(Exception):
    """Base class for every analysis/criterion/spec error (CLI exit status 1)."""


class MolDiagnosticError(MolError):
    """Raised with one or more positioned diagnostics."""

    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = list(diagnostics)
        super().__init__("\n".join(str(d) for d in self.diagnostics))


class MolSyntaxError(MolDiagnosticError):
    pass


class MolCheckError(MolDiagnosticError):
    pass


class CriterionError(MolError):
    pass


class SliceError(MolError):
    pass


class SpecError(MolError):
    pass


class MolRuntimeError(Exception):
    """Raised inside the interpreter; turned into a trace marker by ``run``."""
