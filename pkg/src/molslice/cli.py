"""Command-line entry point: ``mol <command> ...``.

Exit statuses: 0 success, 1 analysis/criterion/spec error (or a failed
preservation check), 2 I/O error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from molslice.analysis.specialize import specialize
from molslice.aspects import (
    aspect_from_slice, build_refers_to, diff, extract_all, parse_aspect_spec, refers_to_closure, render_report,
)
from molslice.errors import MolDiagnosticError, MolError, SpecError
from molslice.interp import RunInput, check_slice, observe, point_key, random_inputs, run
from molslice.lang.ir import ProgramIR
from molslice.lang.lower import compile_source
from molslice.lang.printer import pretty_print, reconstruct_source
from molslice.slicing import analyze, compute_slice, resolve_criterion
from molslice.slicing.propose import propose_criteria
from molslice.slicing.slicer import SliceResult, slice_to_dict

log = logging.getLogger("molslice")

OK, FAILED, IO_ERROR = 0, 1, 2


class InputOutputError(Exception):
    pass


# -- helpers -------------------------------------------------------------------


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as e:
        raise InputOutputError(f"cannot read {path}: {e.strerror or e}") from None


def _write(path: Path, text: str) -> None:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
    except OSError as e:
        raise InputOutputError(f"cannot write {path}: {e.strerror or e}") from None


def _dumps(data) -> str:
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


def _bindings(pairs: Sequence[str]) -> dict[str, int]:
    out = {}
    for p in pairs or ():
        key, sep, value = p.partition("=")
        if not sep or not key:
            raise SpecError(f"binding {p!r} is not of the form name=value")
        try:
            out[key] = int(value)
        except ValueError:
            raise SpecError(f"binding {p!r} does not have an integer value") from None
    return out


def _load(path: str) -> ProgramIR:
    source = _read(path)
    try:
        return compile_source(source)
    except MolDiagnosticError as e:
        raise MolError("\n".join(f"{path}:{d}" for d in e.diagnostics)) from None


def _program(args) -> ProgramIR:
    ir = _load(args.program)
    bind = _bindings(getattr(args, "bind", None))
    return specialize(ir, None, bind) if bind else ir


def _criteria(args) -> list[str]:
    if not args.criterion:
        raise MolError("at least one -c/--criterion is required")
    return list(args.criterion)


def _emit(args, text: str, name: str) -> None:
    """Print ``text`` and, with ``--out``, also store it as ``name``."""
    sys.stdout.write(text)
    if getattr(args, "out", None):
        _write(Path(args.out) / name, text)


# -- commands ------------------------------------------------------------------


def cmd_check(args) -> int:
    ir = _load(args.program)
    stmts = sum(len(m.stmts) for m in ir.methods)
    print(f"{args.program}: ok ({len(ir.classes)} classes, {len(ir.methods)} methods, {stmts} statements)")
    return OK


def cmd_run(args) -> int:
    ir = _program(args)
    inputs = _bindings(args.input)
    points = resolve_criterion(args.criterion, ir).points if args.criterion else frozenset()
    trace = run(ir, RunInput(inputs), sorted(points))
    data = {
        "status": trace.status,
        "error": trace.error,
        "output": [observe(v) for v in trace.output],
        "steps": trace.steps,
    }
    if points:
        data["criterion_values"] = {point_key(*p): trace.criterion_values[point_key(*p)] for p in sorted(points)}
    _emit(args, _dumps(data), "run.json")
    return OK if trace.ok else FAILED


def cmd_slice(args) -> int:
    ir = _program(args)
    g = analyze(ir, args.mode)
    result = compute_slice(g, resolve_criterion(_criteria(args), ir, args.dir, pts=g.pts))
    data = slice_to_dict(ir, result)
    data["mode"] = args.mode
    data["bind"] = _bindings(args.bind)
    if args.emit_source:
        source = reconstruct_source(ir, result.statements)
        data["source"] = source
        if args.out:
            _write(Path(args.out) / "slice.mol", source)
    _emit(args, _dumps(data), "slice.json")
    return OK


def cmd_aspect(args) -> int:
    ir = _load(args.program)
    specs = parse_aspect_spec(_read(args.spec))
    aspects = extract_all(ir, specs, args.mode)
    report = diff(aspects)
    text = render_report(report, args.format, ir)
    sys.stdout.write(text)
    if args.out:
        out = Path(args.out)
        _write(out / "report.json", render_report(report, "json", ir))
        _write(out / "report.html", render_report(report, "html", ir))
        for a in aspects:
            base = specialize(ir, None, a.bind) if a.bind else ir
            _write(out / f"{a.name}.mol", reconstruct_source(base, a.statements))
    return OK


def cmd_refers_to(args) -> int:
    ir = _load(args.program)
    g = analyze(ir, args.mode)
    graph = build_refers_to(ir, g.cg)
    closure = refers_to_closure(graph, args.root)
    _emit(args, _dumps({"roots": sorted(args.root), "closure": sorted(closure)}), "refers-to.json")
    return OK


def _slice_from_file(ir: ProgramIR, path: str, pts) -> SliceResult:
    try:
        data = json.loads(_read(path))
        statements = frozenset(data["statements"])
        texts = [t for t in str(data["criterion"]).split(", ") if t]
        direction = data.get("direction", "backward")
    except (json.JSONDecodeError, KeyError, TypeError) as e:
        raise MolError(f"{path}: not a slice file ({e})") from None
    unknown = sorted(s for s in statements if s not in ir.stmt_map)
    if unknown:
        raise MolError(f"{path}: unknown statement {unknown[0]}")
    criterion = resolve_criterion(texts, ir, direction, pts=pts)
    return SliceResult(statements, frozenset(), criterion)


def cmd_diff(args) -> int:
    ir = _load(args.program)
    g = analyze(ir, args.mode)
    names = [Path(p).stem for p in args.slices]
    if len(set(names)) != len(names):
        raise SpecError("slice files must have distinct names")
    aspects = [aspect_from_slice(ir, n, _slice_from_file(ir, p, g.pts)) for n, p in zip(names, args.slices)]
    report = diff(aspects)
    _emit(args, render_report(report, args.format, ir), f"report.{args.format}")
    return OK


def cmd_check_slice(args) -> int:
    ir = _program(args)
    inputs = random_inputs(ir, args.inputs, args.seed)
    verdict = check_slice(ir, _criteria(args), inputs, args.mode)
    data = verdict.to_dict()
    data["inputs"] = args.inputs
    data["seed"] = args.seed
    _emit(args, _dumps(data), "check-slice.json")
    return OK if verdict.passed else FAILED


def cmd_specialize(args) -> int:
    ir = _program(args)
    if args.emit_source:
        text = reconstruct_source(ir, ir.stmt_map)
    else:
        text = pretty_print(ir)
    _emit(args, text if text.endswith("\n") else text + "\n", "specialized.mol" if args.emit_source else "specialized.ir")
    return OK


def cmd_propose(args) -> int:
    ir = _load(args.program)
    g = analyze(ir, args.mode)
    _emit(args, _dumps({"method": args.method, "criteria": propose_criteria(ir, args.method, g.cg)}), "propose.json")
    return OK


# -- argument parsing -------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mol", description="Slice functional aspects out of MOL programs.")
    p.add_argument("-v", "--verbose", action="count", default=0, help="more logging (repeatable)")
    sub = p.add_subparsers(dest="command", required=True)

    def command(name: str, func, help: str, program: bool = True) -> argparse.ArgumentParser:
        c = sub.add_parser(name, help=help, description=help)
        if program:
            c.add_argument("program", help="MOL source file")
        c.set_defaults(func=func)
        return c

    def mode(c):
        c.add_argument("--mode", choices=("points-to", "cha"), default="points-to", help="call-graph construction")

    def bind(c):
        c.add_argument("--bind", action="append", default=[], metavar="K=V", help="fix an input to a constant")

    def out(c):
        c.add_argument("--out", metavar="DIR", help="also write results into DIR")

    def criterion(c):
        c.add_argument("-c", "--criterion", action="append", default=[], help="slicing criterion (repeatable)")

    command("check", cmd_check, "parse, check and lower a program")

    c = command("run", cmd_run, "execute a program")
    c.add_argument("--input", "-i", action="append", default=[], metavar="K=V", help="input value")
    criterion(c)
    bind(c)
    out(c)

    c = command("slice", cmd_slice, "slice a program")
    criterion(c)
    c.add_argument("--dir", choices=("backward", "forward"), default="backward")
    mode(c)
    bind(c)
    c.add_argument("--emit-source", action="store_true", help="include the reconstructed program")
    out(c)

    c = command("aspect", cmd_aspect, "extract the aspects of a specification and report on them")
    c.add_argument("spec", help="aspect specification (JSON)")
    mode(c)
    c.add_argument("--format", choices=("json", "html"), default="json")
    out(c)

    c = command("refers-to", cmd_refers_to, "closure of the refers-to relation from root members")
    c.add_argument("root", nargs="+", help="method or field id, e.g. Truck.printObject")
    mode(c)
    out(c)

    c = command("diff", cmd_diff, "compare slices saved by `mol slice`")
    c.add_argument("slices", nargs="+", help="slice JSON files; each file name becomes an aspect name")
    mode(c)
    c.add_argument("--format", choices=("json", "html"), default="json")
    out(c)

    c = command("check-slice", cmd_check_slice, "check that a backward slice preserves criterion values")
    criterion(c)
    mode(c)
    bind(c)
    c.add_argument("--inputs", type=int, default=100, metavar="N", help="number of random input vectors")
    c.add_argument("--seed", type=int, default=0, metavar="N")
    out(c)

    c = command("specialize", cmd_specialize, "fix inputs to constants and prune decided branches")
    bind(c)
    c.add_argument("--emit-source", action="store_true", help="print MOL source instead of the IR listing")
    out(c)

    c = command("propose", cmd_propose, "suggest slicing criteria for a method")
    c.add_argument("method", help="method id, e.g. Proc.process")
    mode(c)
    out(c)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.WARNING if args.verbose == 0 else logging.INFO if args.verbose == 1 else logging.DEBUG
    logging.basicConfig(level=level, format="mol: %(levelname)s: %(message)s", stream=sys.stderr, force=True)
    try:
        return args.func(args)
    except InputOutputError as e:
        print(f"mol: error: {e}", file=sys.stderr)
        return IO_ERROR
    except MolError as e:
        print(f"mol: error: {e}", file=sys.stderr)
        return FAILED


if __name__ == "__main__":
    sys.exit(main())
