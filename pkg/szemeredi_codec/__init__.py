"""Lossy compression of dense graphs through approximately ε-regular partitions,
with the synthetic benchmarks and measures used to evaluate it."""

from .codec.errors import (  # noqa: F401
    CodecError,
    FormatError,
    InvalidArgumentError,
    NoPartitionFoundError,
    ParseError,
)

from .codec.graph import (  # noqa: F401
    Graph,
    density_matrix,
    indegree_within,
    internal_density,
    pair_density,
)

from .codec.synthgen import (  # noqa: F401
    SynthParams,
    cluster_sizes,
    expected_density,
    generate,
)

from .codec.regularity import (  # noqa: F401
    PairStats,
    PairVerdict,
    average_degree,
    check_pair,
    count_irregular,
    neighborhood_deviation,
    pair_stats,
    set_deviation,
    sze_index,
)

from .codec.refinement import (  # noqa: F401
    Partition,
    RefineOutcome,
    RefineStatus,
    densification_split,
    initial_partition,
    pair_score,
    refine,
    sparsification_split,
    unzip_by_indegree,
)

from .codec.pipeline import (  # noqa: F401
    CodecConfig,
    CodecResult,
    CompressedGraph,
    approx_alon,
    best_partition,
    compress,
    decompress,
    median_filter,
    run_codec,
    sweep,
    threshold_search,
)

from .codec.measures import (  # noqa: F401
    ContingencyCounts,
    MeasureReport,
    ari,
    contingency_counts,
    kvs_best_ari,
    kvs_predict,
    l1_dist,
    l2_dist,
    l2_reconstruction_error,
)

from .codec.fileio import (  # noqa: F401
    load_compressed,
    load_graph,
    save_compressed,
    save_ids,
    save_matrix,
    write_pgm,
)

from .codec.config import load_config  # noqa: F401

from .codec.experiment import (  # noqa: F401
    ExperimentSpec,
    describe_runs,
    run_experiment,
    run_network,
    summarize,
)

from .codec.report import emit_report  # noqa: F401

from .codec.trend import ThresholdRule, ThresholdTrend  # noqa: F401

__all__ = [
    "CodecError",
    "FormatError",
    "InvalidArgumentError",
    "NoPartitionFoundError",
    "ParseError",
    "Graph",
    "density_matrix",
    "indegree_within",
    "internal_density",
    "pair_density",
    "SynthParams",
    "cluster_sizes",
    "expected_density",
    "generate",
    "PairStats",
    "PairVerdict",
    "average_degree",
    "check_pair",
    "count_irregular",
    "neighborhood_deviation",
    "pair_stats",
    "set_deviation",
    "sze_index",
    "Partition",
    "RefineOutcome",
    "RefineStatus",
    "densification_split",
    "initial_partition",
    "pair_score",
    "refine",
    "sparsification_split",
    "unzip_by_indegree",
    "CodecConfig",
    "CodecResult",
    "CompressedGraph",
    "approx_alon",
    "best_partition",
    "compress",
    "decompress",
    "median_filter",
    "run_codec",
    "sweep",
    "threshold_search",
    "ContingencyCounts",
    "MeasureReport",
    "ari",
    "contingency_counts",
    "kvs_best_ari",
    "kvs_predict",
    "l1_dist",
    "l2_dist",
    "l2_reconstruction_error",
    "load_compressed",
    "load_graph",
    "save_compressed",
    "save_ids",
    "save_matrix",
    "write_pgm",
    "load_config",
    "ExperimentSpec",
    "describe_runs",
    "run_experiment",
    "run_network",
    "summarize",
    "emit_report",
    "ThresholdRule",
    "ThresholdTrend",
]
