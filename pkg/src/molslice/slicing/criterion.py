"""Slicing criteria: parsing and resolution to (statement, designator) points.

Grammar::

    <Class>.<method>:<k>#<var>    variable var at statement k of the method
    <Class>.<method>:ret          the returned value at every return
    <Class>.<field>@writes        the field value at every write that may
                                  target a Class (or subclass) object
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Optional

from molslice.analysis.pointsto import PointsToResult, points_to
from molslice.errors import CriterionError
from molslice.lang.ir import ProgramIR

_ID = r"[A-Za-z_$][A-Za-z0-9_$]*"
_POINT = re.compile(rf"^({_ID})\.({_ID}):(\d+)#({_ID})$")
_RET = re.compile(rf"^({_ID})\.({_ID}):ret$")
_WRITES = re.compile(rf"^({_ID})\.({_ID})@writes$")

DIRECTIONS = ("backward", "forward")


@dataclass(frozen=True)
class SlicingCriterion:
    direction: str
    points: frozenset  # (statement id, variable name or field key "C.f")
    origin: str

    def __post_init__(self):
        if self.direction not in DIRECTIONS:
            raise CriterionError(f"unknown direction {self.direction!r}")
        if not self.points:
            raise CriterionError("criterion has no points")

    @property
    def statements(self) -> frozenset[str]:
        return frozenset(s for s, _ in self.points)

    def union(self, other: "SlicingCriterion") -> "SlicingCriterion":
        if other.direction != self.direction:
            raise CriterionError("cannot combine criteria of different directions")
        origin = ", ".join(dict.fromkeys(self.origin.split(", ") + other.origin.split(", ")))
        return SlicingCriterion(self.direction, self.points | other.points, origin)


def _method(ir: ProgramIR, cls: str, name: str):
    m = ir.method_map.get(f"{cls}.{name}")
    if m is None:
        raise CriterionError(f"unknown member {cls}.{name}")
    return m


def resolve_points(text: str, ir: ProgramIR, pts: Optional[PointsToResult] = None) -> frozenset:
    text = text.strip()
    if mt := _POINT.match(text):
        cls, name, k, var = mt.groups()
        m = _method(ir, cls, name)
        k = int(k)
        if k >= len(m.stmts):
            raise CriterionError(f"statement index {k} out of range for {m.qname} ({len(m.stmts)} statements)")
        s = m.stmts[k]
        if var not in s.defs() and var not in s.uses():
            raise CriterionError(f"variable {var} is not defined or used at {s.id}")
        return frozenset({(s.id, var)})
    if mt := _RET.match(text):
        m = _method(ir, *mt.groups())
        if m.ret == "void":
            raise CriterionError(f"{m.qname} returns no value")
        points = frozenset((s.id, s.args[0]) for s in m.stmts if s.kind == "return" and s.args)
        if not points:
            raise CriterionError(f"{m.qname} has no return statement")
        return points
    if mt := _WRITES.match(text):
        cls, fname = mt.groups()
        if cls not in ir.class_map:
            raise CriterionError(f"unknown member {cls}.{fname}")
        f = ir.resolve_field(cls, fname)
        if f is None:
            raise CriterionError(f"unknown member {cls}.{fname}")
        if pts is None:
            pts = points_to(ir)
        points = set()
        for s in ir.all_stmts():
            if s.kind == "field-write" and s.field == f.qname:
                classes = pts.classes_of(s.method, s.args[0])
                if any(ir.is_subclass(c, cls) for c in classes):
                    points.add((s.id, f.qname))
        if not points:
            raise CriterionError(f"{cls}.{fname}@writes matches no field write")
        return frozenset(points)
    raise CriterionError(f"malformed criterion {text!r}")


def resolve_criterion(
    text: str | Iterable[str],
    ir: ProgramIR,
    direction: str = "backward",
    pts: Optional[PointsToResult] = None,
) -> SlicingCriterion:
    """Resolve one criterion string, or several (their points are united)."""
    texts = [text] if isinstance(text, str) else list(text)
    if not texts:
        raise CriterionError("no criterion given")
    points: set = set()
    for t in texts:
        points |= resolve_points(t, ir, pts)
    return SlicingCriterion(direction, frozenset(points), ", ".join(t.strip() for t in texts))
