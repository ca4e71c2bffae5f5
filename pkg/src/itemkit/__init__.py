"""Independent temporal motifs: extraction, sampling and graph fingerprints."""

from __future__ import annotations

from .catalog import (
    AtomicMotif,
    CatalogError,
    MotifCatalog,
    TemporalMotif,
    default_catalog,
    load_catalog,
    parse_catalog,
    serialize_catalog,
    temporal_variants,
)
from .enumeration import (
    EnumerationConfig,
    InstanceLimitExceeded,
    MotifInstance,
    brute_force_instances,
    find_fringe,
    find_instances,
)
from .features import (
    FeatureVector,
    SchemaMismatch,
    SimilarityMatrix,
    burst_growth,
    distance,
    feature_schema,
    feature_vector,
    normalize,
    pairwise_and_gap_aggregate,
    series_anomaly,
)
from .graph import (
    EdgeListError,
    TemporalEdge,
    TemporalGraph,
    WindowGraph,
    birth_times,
    graph_stats,
    load_edge_list,
    load_vertex_file,
    window_partition,
)
from .independence import (
    ITeMResult,
    MotifResult,
    OverlapGraph,
    SelectionRefused,
    build_overlap_graph,
    extract_items,
    extract_many,
    instance_structural_contribution,
    orbit_occupancy,
    select_independent,
)
from .sampling import SampledDistribution, SamplingPlan, estimate_distribution, select_windows
from .synthgen import GenSpec, generate_base, inject_burst, stretch_perturb

__version__ = "0.1.0"

__all__ = [
    "AtomicMotif",
    "CatalogError",
    "MotifCatalog",
    "TemporalMotif",
    "default_catalog",
    "load_catalog",
    "parse_catalog",
    "serialize_catalog",
    "temporal_variants",
    "EnumerationConfig",
    "InstanceLimitExceeded",
    "MotifInstance",
    "brute_force_instances",
    "find_fringe",
    "find_instances",
    "FeatureVector",
    "SchemaMismatch",
    "SimilarityMatrix",
    "burst_growth",
    "distance",
    "feature_schema",
    "feature_vector",
    "normalize",
    "pairwise_and_gap_aggregate",
    "series_anomaly",
    "EdgeListError",
    "TemporalEdge",
    "TemporalGraph",
    "WindowGraph",
    "birth_times",
    "graph_stats",
    "load_edge_list",
    "load_vertex_file",
    "window_partition",
    "ITeMResult",
    "MotifResult",
    "OverlapGraph",
    "SelectionRefused",
    "build_overlap_graph",
    "extract_items",
    "extract_many",
    "instance_structural_contribution",
    "orbit_occupancy",
    "select_independent",
    "SampledDistribution",
    "SamplingPlan",
    "estimate_distribution",
    "select_windows",
    "GenSpec",
    "generate_base",
    "inject_burst",
    "stretch_perturb",
    "__version__",
]
