"""Member classification, aspect diffs and their JSON/HTML renderings."""

from __future__ import annotations

import html
import json
from dataclasses import dataclass
from typing import Optional, Sequence

from molslice.aspects.extract import AspectSlice
from molslice.errors import MolError, SpecError
from molslice.lang.ir import ENTRY_METHOD, ProgramIR

EXCLUSIVE = "exclusive"
SHARED = "shared"
MULTIPLY_DEFINED = "multiply-defined"

KINDS = ("classes", "methods", "fields", "statements")


@dataclass(frozen=True)
class MemberClassification:
    categories: dict  # member -> (category, aspect name or None)

    def of(self, member: str) -> tuple[str, Optional[str]]:
        return self.categories[member]

    def to_dict(self, names: Sequence[str]) -> dict:
        shared = sorted(m for m, (c, _) in self.categories.items() if c == SHARED)
        multi = sorted(m for m, (c, _) in self.categories.items() if c == MULTIPLY_DEFINED)
        exclusive = {
            n: sorted(m for m, (c, a) in self.categories.items() if c == EXCLUSIVE and a == n)
            for n in sorted(names)
        }
        return {"shared": shared, "multiply_defined": multi, "exclusive": exclusive}


def _check_names(aspects: Sequence[AspectSlice]) -> None:
    names = [a.name for a in aspects]
    dup = sorted({n for n in names if names.count(n) > 1})
    if dup:
        raise SpecError(f"duplicate aspect name {', '.join(dup)}")


def classify_members(aspects: Sequence[AspectSlice]) -> MemberClassification:
    """Exclusive to one aspect, shared whole by several, or multiply-defined."""
    _check_names(aspects)
    owners: dict[str, list[AspectSlice]] = {}
    methods = set()
    for a in aspects:
        for kind in ("classes", "methods", "fields"):
            for m in a.members[kind]:
                owners.setdefault(m, []).append(a)
        methods |= a.members["methods"]
    out = {}
    for member, having in owners.items():
        if len(having) == 1:
            out[member] = (EXCLUSIVE, having[0].name)
        elif member in methods and not all(a.is_whole(member) for a in having):
            out[member] = (MULTIPLY_DEFINED, None)
        else:
            out[member] = (SHARED, None)
    return MemberClassification(out)


@dataclass(frozen=True)
class DiffReport:
    aspects: tuple  # aspect names, sorted
    cells: dict  # frozenset of names -> {kind: frozenset of ids}
    stats: tuple  # one dict per aspect, sorted by aspect name
    classification: dict  # as MemberClassification.to_dict

    def members_of(self, name: str, kind: str) -> frozenset:
        out: set = set()
        for key, cell in self.cells.items():
            if name in key:
                out |= cell[kind]
        return frozenset(out)

    def cell_of(self, member: str, kind: str) -> Optional[frozenset]:
        for key, cell in self.cells.items():
            if member in cell[kind]:
                return key
        return None


def _sets(a: AspectSlice) -> dict:
    return {
        "classes": a.members["classes"],
        "methods": a.members["methods"],
        "fields": a.members["fields"],
        "statements": a.statements,
    }


def diff(aspects: Sequence[AspectSlice]) -> DiffReport:
    """Bucket every member and statement by the exact set of aspects containing it."""
    if not aspects:
        raise SpecError("no aspects to compare")
    _check_names(aspects)
    per = {a.name: _sets(a) for a in aspects}
    where: dict[tuple[str, str], set] = {}
    for name, sets in per.items():
        for kind, items in sets.items():
            for x in items:
                where.setdefault((kind, x), set()).add(name)
    cells: dict = {}
    for (kind, x), names in where.items():
        key = frozenset(names)
        cell = cells.setdefault(key, {k: set() for k in KINDS})
        cell[kind].add(x)
    cells = {k: {kind: frozenset(v) for kind, v in c.items()} for k, c in cells.items()}
    stats = []
    for name in sorted(per):
        sets = per[name]
        exclusive = cells.get(frozenset({name}), {}).get("classes", frozenset())
        stats.append({
            "aspect": name,
            "sliced_classes": len(sets["classes"]),
            "exclusive_classes": len(exclusive),
            "methods": len(sets["methods"]),
            "fields": len(sets["fields"]),
            "statements": len(sets["statements"]),
        })
    classification = classify_members(aspects).to_dict(per)
    return DiffReport(tuple(sorted(per)), cells, tuple(stats), classification)


# -- JSON ----------------------------------------------------------------------


def _cell_order(key: frozenset) -> tuple:
    return (len(key), sorted(key))


def report_to_dict(report: DiffReport) -> dict:
    cells = []
    for key in sorted(report.cells, key=_cell_order):
        cell = report.cells[key]
        if not any(cell[k] for k in KINDS):
            continue
        entry = {"in": sorted(key)}
        entry.update({k: sorted(cell[k]) for k in KINDS})
        cells.append(entry)
    return {
        "aspects": list(report.aspects),
        "cells": cells,
        "stats": [dict(s) for s in report.stats],
        "classification": report.classification,
    }


def report_from_json(text: str) -> DiffReport:
    data = json.loads(text)
    try:
        cells = {
            frozenset(c["in"]): {k: frozenset(c.get(k, ())) for k in KINDS}
            for c in data["cells"]
        }
        return DiffReport(tuple(data["aspects"]), cells, tuple(data["stats"]), data["classification"])
    except (KeyError, TypeError) as e:
        raise SpecError(f"malformed report: {e}") from None


# -- HTML ------------------------------------------------------------------------

_STYLE = """
body { font-family: sans-serif; margin: 2em; color: #222; }
h1 { font-size: 1.4em; }
section.cls { border: 1px solid #ccc; border-radius: 4px; margin: 1em 0; padding: 0.5em 1em; }
.badge { display: inline-block; font-size: 0.8em; padding: 0 0.5em; margin-left: 0.4em;
         border-radius: 3px; background: #eee; }
.exclusive { background: #d4f0d4; }
.shared { background: #d4e4f7; }
.multiply-defined { background: #f7e0c4; }
ul { list-style: none; padding-left: 1em; }
pre.stmts { margin: 0.2em 0 0.6em 1.5em; font-size: 0.85em; }
.hidden { display: none; }
table.stats { border-collapse: collapse; }
table.stats td, table.stats th { border: 1px solid #ccc; padding: 0.2em 0.6em; }
"""

_SCRIPT = """
function refresh() {
  var on = [];
  document.querySelectorAll('input.aspect').forEach(function (box) {
    if (box.checked) { on.push(box.value); }
  });
  document.querySelectorAll('[data-in]').forEach(function (el) {
    var names = el.getAttribute('data-in').split(' ');
    var show = names.some(function (n) { return on.indexOf(n) >= 0; });
    el.classList.toggle('hidden', !show);
  });
}
"""


def _category(report: DiffReport, member: str) -> tuple[str, str]:
    c = report.classification
    if member in c["shared"]:
        return SHARED, "shared"
    if member in c["multiply_defined"]:
        return MULTIPLY_DEFINED, "multiply-defined"
    for name, items in c["exclusive"].items():
        if member in items:
            return EXCLUSIVE, f"exclusive to {name}"
    return "", ""


def _badge(report: DiffReport, member: str, key: frozenset) -> str:
    css, label = _category(report, member)
    names = "{" + ", ".join(sorted(key)) + "}"
    title = html.escape(label)
    return f'<span class="badge {css}" title="{title}">{html.escape(names)}</span>'


def render_html(report: DiffReport, ir: Optional[ProgramIR] = None) -> str:
    e = html.escape
    out = [
        "<!DOCTYPE html>",
        '<html lang="en"><head><meta charset="utf-8">',
        "<title>Functional aspect report</title>",
        f"<style>{_STYLE}</style>",
        f"<script>{_SCRIPT}</script>",
        "</head><body>",
        "<h1>Functional aspect report</h1>",
        '<div class="toggles">Aspects: ',
    ]
    for name in report.aspects:
        out.append(
            f'<label><input type="checkbox" class="aspect" value="{e(name)}" checked onchange="refresh()"> '
            f"{e(name)}</label> "
        )
    out.append("</div>")
    out.append(
        '<p class="legend">Legend: <span class="badge exclusive">exclusive</span> used by one aspect; '
        '<span class="badge shared">shared</span> included whole by several aspects; '
        '<span class="badge multiply-defined">multiply-defined</span> sliced differently by several aspects.</p>'
    )
    out.append('<table class="stats"><tr><th>aspect</th><th>sliced classes</th><th>exclusive classes</th>'
               "<th>methods</th><th>fields</th><th>statements</th></tr>")
    for s in report.stats:
        out.append(
            f"<tr><td>{e(s['aspect'])}</td><td>{s['sliced_classes']}</td><td>{s['exclusive_classes']}</td>"
            f"<td>{s['methods']}</td><td>{s['fields']}</td><td>{s['statements']}</td></tr>"
        )
    out.append("</table>")

    owners: dict[str, dict[str, list]] = {}
    for kind in ("methods", "fields"):
        for key in report.cells:
            for member in report.cells[key][kind]:
                owner = member.split(".", 1)[0]
                owners.setdefault(owner, {"methods": [], "fields": []})[kind].append((member, key))
    for key in report.cells:
        for cls in report.cells[key]["classes"]:
            owners.setdefault(cls, {"methods": [], "fields": []})
    statements = {}
    for key, cell in report.cells.items():
        for sid in cell["statements"]:
            statements[sid] = key

    def cls_order(name: str) -> tuple:
        if ir is not None and name in ir.class_map:
            return (0, [c.name for c in ir.classes].index(name), name)
        return (1, 0, name)

    for owner in sorted(owners, key=cls_order):
        key = report.cell_of(owner, "classes")
        title = "main" if owner == ENTRY_METHOD.split(".")[0] else f"class {owner}"
        data_in = " ".join(sorted(key)) if key else " ".join(
            sorted({n for _, k in owners[owner]["methods"] + owners[owner]["fields"] for n in k})
        )
        out.append(f'<section class="cls" id="class-{e(owner)}" data-in="{e(data_in)}"><h2>{e(title)}')
        if key:
            out.append(_badge(report, owner, key))
        out.append("</h2>")
        if owners[owner]["fields"]:
            out.append("<h3>fields</h3><ul>")
            for member, k in sorted(owners[owner]["fields"]):
                out.append(f'<li data-in="{e(" ".join(sorted(k)))}">{e(member)}{_badge(report, member, k)}</li>')
            out.append("</ul>")
        if owners[owner]["methods"]:
            out.append("<h3>methods</h3><ul>")
            for member, k in sorted(owners[owner]["methods"]):
                out.append(f'<li data-in="{e(" ".join(sorted(k)))}">{e(member)}{_badge(report, member, k)}')
                if ir is not None and member in ir.method_map:
                    lines = []
                    for s in ir.method(member).stmts:
                        sk = statements.get(s.id)
                        if sk is None:
                            continue
                        snippet = ir.source[s.span[0]:s.span[1]].replace("\n", " ")
                        lines.append(
                            f'<span data-in="{e(" ".join(sorted(sk)))}">{e(s.id)}  {e(s.render())}'
                            f'  <span class="badge">{e("{" + ", ".join(sorted(sk)) + "}")}</span>'
                            f"  // {e(snippet)}</span>"
                        )
                    if lines:
                        out.append('<pre class="stmts">' + "\n".join(lines) + "</pre>")
                out.append("</li>")
            out.append("</ul>")
        out.append("</section>")
    out.append("</body></html>")
    return "\n".join(out) + "\n"


def render_report(report: DiffReport, fmt: str = "json", ir: Optional[ProgramIR] = None) -> str:
    if fmt == "json":
        return json.dumps(report_to_dict(report), indent=2) + "\n"
    if fmt == "html":
        return render_html(report, ir)
    raise MolError(f"unknown report format {fmt!r}")
