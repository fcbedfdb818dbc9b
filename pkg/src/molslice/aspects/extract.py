"""Functional aspects: named criterion sets turned into member sets."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

from molslice.analysis.specialize import specialize
from molslice.errors import CriterionError, SpecError
from molslice.lang.ir import ProgramIR
from molslice.slicing.criterion import resolve_criterion
from molslice.slicing.sdg import Sdg, analyze
from molslice.slicing.slicer import SliceResult, backward_slice, merge_slices, slice_members

_STRUCTURAL = ("goto", "nop")


def method_body(ir: ProgramIR, method: str) -> frozenset[str]:
    """Statements that make up a method's body (jumps and fillers excluded)."""
    return frozenset(s.id for s in ir.method(method).stmts if s.kind not in _STRUCTURAL)


@dataclass(frozen=True)
class AspectSlice:
    name: str
    criteria: tuple
    slice: SliceResult
    members: dict  # "classes" / "methods" / "fields" -> frozenset
    partial_methods: dict  # method -> included statement ids, for partly included methods
    bind: dict = field(default_factory=dict)

    @property
    def statements(self) -> frozenset[str]:
        return self.slice.statements

    def is_whole(self, method: str) -> bool:
        return method in self.members["methods"] and method not in self.partial_methods


def extract_aspect(
    ir: ProgramIR,
    sdg: Optional[Sdg],
    name: str,
    criteria: Sequence[str],
    bind: Optional[Mapping[str, int]] = None,
    mode: str = "points-to",
) -> AspectSlice:
    """Merge the backward slices of every criterion into one aspect.

    With ``bind`` the program is specialized first and a fresh SDG is built.
    """
    if not criteria:
        raise SpecError(f"aspect {name}: no criteria")
    bind = dict(bind or {})
    if bind:
        ir = specialize(ir, None, bind)
        sdg = analyze(ir, mode)
    elif sdg is None:
        sdg = analyze(ir, mode)
    try:
        results = [backward_slice(sdg, resolve_criterion(c, ir, pts=sdg.pts)) for c in criteria]
    except CriterionError as e:
        raise CriterionError(f"aspect {name}: {e}") from None
    return aspect_from_slice(ir, name, merge_slices(results), tuple(criteria), bind)


def aspect_from_slice(
    ir: ProgramIR, name: str, result: SliceResult, criteria: Sequence[str] = (), bind: Optional[Mapping] = None,
) -> AspectSlice:
    """Wrap an already computed slice as a named aspect."""
    members = {k: frozenset(v) for k, v in slice_members(ir, result.statements, result.criterion).items()}
    partial = {}
    for m in members["methods"]:
        included = frozenset(s for s in result.statements if ir.stmt(s).method == m)
        if not method_body(ir, m) <= included:
            partial[m] = included
    return AspectSlice(name, tuple(criteria), result, members, partial, dict(bind or {}))


@dataclass(frozen=True)
class AspectSpec:
    name: str
    criteria: tuple
    bind: dict


def parse_aspect_spec(text: str) -> list[AspectSpec]:
    """Validate an aspect specification document (JSON)."""
    import json

    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise SpecError(f"aspect spec is not valid JSON: {e}") from None
    if not isinstance(data, dict) or not isinstance(data.get("aspects"), list):
        raise SpecError('aspect spec needs an "aspects" list')
    out = []
    for i, a in enumerate(data["aspects"]):
        if not isinstance(a, dict):
            raise SpecError(f"aspect #{i} is not an object")
        extra = set(a) - {"name", "criteria", "bind"}
        if extra:
            raise SpecError(f"aspect #{i}: unknown keys {', '.join(sorted(extra))}")
        name = a.get("name")
        if not isinstance(name, str) or not name:
            raise SpecError(f"aspect #{i}: name must be a non-empty string")
        crit = a.get("criteria")
        if not isinstance(crit, list) or not crit or not all(isinstance(c, str) for c in crit):
            raise SpecError(f"aspect {name}: criteria must be a non-empty list of strings")
        bind = a.get("bind", {})
        if not isinstance(bind, dict) or not all(
            isinstance(k, str) and isinstance(v, int) and not isinstance(v, bool) for k, v in bind.items()
        ):
            raise SpecError(f"aspect {name}: bind must map names to integers")
        out.append(AspectSpec(name, tuple(crit), dict(bind)))
    names = [a.name for a in out]
    for n in names:
        if names.count(n) > 1:
            raise SpecError(f"duplicate aspect name {n}")
    if not out:
        raise SpecError("aspect spec declares no aspects")
    return out


def extract_all(ir: ProgramIR, specs: Sequence[AspectSpec], mode: str = "points-to") -> list[AspectSlice]:
    """Extract every aspect; the unspecialized SDG is built once and shared."""
    shared: Optional[Sdg] = None
    out = []
    for spec in specs:
        if not spec.bind and shared is None:
            shared = analyze(ir, mode)
        out.append(extract_aspect(ir, shared, spec.name, spec.criteria, spec.bind, mode))
    return out
