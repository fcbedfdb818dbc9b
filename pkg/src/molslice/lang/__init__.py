"""MOL front end: parsing, checking, lowering to three-address IR, printing."""

from molslice.lang.checker import resolve_and_check
from molslice.lang.ir import ProgramIR, Stmt
from molslice.lang.lower import compile_source, lower
from molslice.lang.parser import parse
from molslice.lang.printer import pretty_print, reconstruct_source

__all__ = [
    "ProgramIR", "Stmt", "compile_source", "lower", "parse", "pretty_print",
    "reconstruct_source", "resolve_and_check",
]
