"""Runtime value semantics shared by the interpreter and constant propagation."""

from __future__ import annotations

from molslice.errors import MolRuntimeError

_BITS = 64
_MOD = 1 << _BITS
_HALF = 1 << (_BITS - 1)


def wrap(n: int) -> int:
    """Two's-complement wrap to a signed 64-bit integer."""
    n &= _MOD - 1
    return n - _MOD if n >= _HALF else n


def default_value(ty: str):
    if ty == "int":
        return 0
    if ty == "bool":
        return False
    if ty == "string":
        return ""
    return None


def _div(a: int, b: int) -> int:
    if b == 0:
        raise MolRuntimeError("division by zero")
    q = abs(a) // abs(b)
    return wrap(q if (a < 0) == (b < 0) else -q)


def _mod(a: int, b: int) -> int:
    if b == 0:
        raise MolRuntimeError("modulo by zero")
    return wrap(a - b * _div(a, b))


def _same(a, b) -> bool:
    if isinstance(a, (bool, int, str)) or a is None:
        return type(a) is type(b) and a == b
    return a is b


def binop(op: str, a, b):
    """Apply a MOL binary operator; ``&&`` and ``||`` evaluate both sides."""
    if op == "+":
        return a + b if isinstance(a, str) else wrap(a + b)
    if op == "-":
        return wrap(a - b)
    if op == "*":
        return wrap(a * b)
    if op == "/":
        return _div(a, b)
    if op == "%":
        return _mod(a, b)
    if op == "<":
        return a < b
    if op == "<=":
        return a <= b
    if op == ">":
        return a > b
    if op == ">=":
        return a >= b
    if op == "==":
        return _same(a, b)
    if op == "!=":
        return not _same(a, b)
    if op == "&&":
        return a and b
    if op == "||":
        return a or b
    raise ValueError(f"unknown operator {op}")


def show(value) -> str:
    """Printed form: integers in decimal, booleans as true/false, strings raw."""
    if value is True:
        return "true"
    if value is False:
        return "false"
    return str(value)
