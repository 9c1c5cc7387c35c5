"""Sequential and parallel enumeration of simple, temporal and hop-limited cycles."""

from .api import EnumerationResult, enumerate_cycles
from .coarse import coarse_enumerate
from .constrained import hop_johnson_enumerate, temporal_johnson_enumerate, temporal_read_tarjan_enumerate
from .estimator import CycleEnumerator
from .fg_johnson import (
    cfgj_copy_on_steal,
    cfgj_copy_on_steal_complete,
    fg_hop_enumerate,
    fg_temporal_enumerate,
    fgj_copy_on_steal,
    fgj_copy_on_steal_complete,
    fgj_enumerate,
)
from .fg_read_tarjan import fgrt_enumerate
from .generators import generate_adversarial
from .graph import EdgeListParseError, TemporalEdge, TemporalGraph, load_edge_list, write_edge_list
from .metrics import MetricsSnapshot, VisitCounters, export, merge
from .pruning import (
    CycleBundle,
    Constraints,
    StartUnit,
    WindowConstraint,
    bundle_count,
    canonical_cycle,
    canonical_set,
    cycle_union_of_edge,
    scc_of_edge,
    trim_acyclic,
)
from .runtime import Runtime, StealInjector, parallel_for_edges
from .sequential import RTOptions, johnson_enumerate, read_tarjan_enumerate, tiernan_enumerate

__all__ = [
    "Constraints",
    "CycleBundle",
    "CycleEnumerator",
    "EdgeListParseError",
    "EnumerationResult",
    "MetricsSnapshot",
    "RTOptions",
    "Runtime",
    "StartUnit",
    "StealInjector",
    "TemporalEdge",
    "TemporalGraph",
    "VisitCounters",
    "WindowConstraint",
    "bundle_count",
    "canonical_cycle",
    "canonical_set",
    "cfgj_copy_on_steal",
    "cfgj_copy_on_steal_complete",
    "coarse_enumerate",
    "cycle_union_of_edge",
    "enumerate_cycles",
    "export",
    "fg_hop_enumerate",
    "fg_temporal_enumerate",
    "fgj_copy_on_steal",
    "fgj_copy_on_steal_complete",
    "fgj_enumerate",
    "fgrt_enumerate",
    "generate_adversarial",
    "hop_johnson_enumerate",
    "johnson_enumerate",
    "load_edge_list",
    "merge",
    "parallel_for_edges",
    "read_tarjan_enumerate",
    "scc_of_edge",
    "temporal_johnson_enumerate",
    "temporal_read_tarjan_enumerate",
    "tiernan_enumerate",
    "trim_acyclic",
    "write_edge_list",
]
