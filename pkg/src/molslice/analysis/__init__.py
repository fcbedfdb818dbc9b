"""Control flow, dominance, dataflow, points-to and call-graph analyses."""

from molslice.analysis.callgraph import CallGraph, call_graph
from molslice.analysis.cfg import ENTRY, EXIT, Cfg, build_cfg, control_dependences, post_dominators
from molslice.analysis.dataflow import reaching_defs
from molslice.analysis.fielddeps import field_data_deps
from molslice.analysis.pointsto import PointsToResult, points_to
from molslice.analysis.specialize import specialize

__all__ = [
    "CallGraph", "Cfg", "ENTRY", "EXIT", "PointsToResult", "build_cfg", "call_graph",
    "control_dependences", "field_data_deps", "points_to", "post_dominators",
    "reaching_defs", "specialize",
]
