"""Hourglass analysis of hierarchical dependency networks.

Quantifies how strongly a dependency network narrows through a small
waist of path-central vertices: condensation to a DAG, exact ST-path
counting, greedy core identification with path-equivalence grouping,
the H-score against a flattened baseline, and generative models for
comparison.
"""
from .centrality import (
    Engine,
    PathStats,
    avg_st_path_length,
    compute_path_stats,
    location_of,
)
from .core import (
    APPROXIMATION_FACTOR,
    Core,
    CoreElement,
    brute_force_core,
    coverage,
    covered_paths,
    enumerate_cores,
    greedy_core,
    identify_pes,
    jaccard_core_similarity,
)
from .errors import HourglassError, InputError, InvariantError
from .generative import (
    ConstIndegree,
    EdgeCopyConfig,
    FitResult,
    FitRow,
    LayeredScaffold,
    PoissonPlusOne,
    RpConfig,
    SweepRow,
    edge_copy_generate_fitted,
    ensemble_sweep,
    fit_alpha,
    grid_points,
    layered_scaffold_from,
    rank_distribution,
    rp_generate,
    rp_generate_fitted,
)
from .graph import (
    CondensationReport,
    DependencyNetwork,
    RawDigraph,
    VertexClass,
    build_raw,
    class_counts,
    classify,
    condense,
    exclude_vertices,
    largest_wcc,
)
from .io import (
    AnalysisReport,
    CoreElementReport,
    CoreSummary,
    NetworkSummary,
    Provenance,
    TOOL_VERSION,
    build_report,
    parse_edgelist,
    parse_reactions,
    write_dot,
    write_edgelist,
    write_metrics_csv,
)
from .metrics import (
    HourglassReport,
    avg_core_location,
    core_vertex_coverage,
    flatten,
    h_from_sizes,
    h_score,
)

__version__ = TOOL_VERSION

__all__ = [
    "APPROXIMATION_FACTOR",
    "AnalysisReport",
    "CondensationReport",
    "ConstIndegree",
    "Core",
    "CoreElement",
    "CoreElementReport",
    "CoreSummary",
    "DependencyNetwork",
    "EdgeCopyConfig",
    "Engine",
    "FitResult",
    "FitRow",
    "HourglassError",
    "HourglassReport",
    "InputError",
    "InvariantError",
    "LayeredScaffold",
    "NetworkSummary",
    "PathStats",
    "PoissonPlusOne",
    "Provenance",
    "RawDigraph",
    "RpConfig",
    "SweepRow",
    "TOOL_VERSION",
    "VertexClass",
    "avg_core_location",
    "avg_st_path_length",
    "brute_force_core",
    "build_raw",
    "build_report",
    "class_counts",
    "classify",
    "compute_path_stats",
    "condense",
    "core_vertex_coverage",
    "coverage",
    "covered_paths",
    "edge_copy_generate_fitted",
    "ensemble_sweep",
    "enumerate_cores",
    "exclude_vertices",
    "fit_alpha",
    "flatten",
    "greedy_core",
    "grid_points",
    "h_from_sizes",
    "h_score",
    "identify_pes",
    "jaccard_core_similarity",
    "largest_wcc",
    "layered_scaffold_from",
    "location_of",
    "parse_edgelist",
    "parse_reactions",
    "rank_distribution",
    "rp_generate",
    "rp_generate_fitted",
    "write_dot",
    "write_edgelist",
    "write_metrics_csv",
]
