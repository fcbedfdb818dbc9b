"""Refers-to baseline, functional aspect extraction, classification and reports."""

from molslice.aspects.extract import AspectSlice, aspect_from_slice, extract_aspect, extract_all, parse_aspect_spec
from molslice.aspects.refers import RefersToGraph, build_refers_to, refers_to_closure
from molslice.aspects.report import DiffReport, classify_members, diff, render_report, report_from_json

__all__ = [
    "AspectSlice", "DiffReport", "aspect_from_slice", "RefersToGraph", "build_refers_to", "classify_members", "diff",
    "extract_all", "extract_aspect", "parse_aspect_spec", "refers_to_closure", "render_report",
    "report_from_json",
]
