"""System dependence graphs, slicing criteria and two-phase slicing."""

from molslice.slicing.criterion import SlicingCriterion, resolve_criterion
from molslice.slicing.sdg import Sdg, analyze, build_sdg, summary_edges
from molslice.slicing.slicer import (
    SliceResult, backward_slice, compute_slice, forward_slice, merge_slices, slice_members, slice_to_json,
)

__all__ = [
    "Sdg", "SliceResult", "SlicingCriterion", "analyze", "backward_slice", "build_sdg",
    "compute_slice", "forward_slice", "merge_slices", "resolve_criterion", "slice_members",
    "slice_to_json", "summary_edges",
]
