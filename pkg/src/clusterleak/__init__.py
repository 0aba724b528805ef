"""Privacy auditor for federated k-means under cluster-sum disclosure.

Simulates Lloyd's k-means over exact integers while recording what an
honest-but-curious aggregator sees, mounts a trajectory-based
reconstruction attack on that record, certifies exact recoveries by
rational RREF, and verifies them against simulator ground truth.
"""

from .attack import TrajectoryReconstructor
from .data import CsvFormatError, QuantizationError, gen_synthetic, load_csv
from .experiment import (
    AggregateReport,
    ExperimentConfig,
    TrialRecord,
    emit_reconstructions,
    emit_report,
    load_dataset,
    render_table,
    run_trials,
)
from .pgm import PgmFormatError, load_pgm_dir, read_pgm, write_pgm
from .rref import (
    LeakageCertificate,
    RrefResult,
    SingularMatrixError,
    leakage_rows,
    rref_augmented,
    solve_exact_square,
)
from .simulation import (
    ClusterConfig,
    ConfigurationError,
    Dataset,
    DisclosureTrace,
    FederatedKMeans,
    GroundTruthAssignments,
    LloydResult,
    assign,
    cluster_sums,
    init_centroids,
    init_centroids_plusplus,
    run,
    trace_from_centroid_disclosures,
)
from .trajectory import (
    IndexSets,
    InsufficientTraceError,
    RecordMatrix,
    build_initial,
    build_record,
    compute_deltas,
    dedup_columns,
    fill_one,
    index_sets,
    recursive_step,
    stationary_blocks,
    truncate_trace,
)
from .verification import (
    TrialReport,
    TrueSystem,
    classify,
    true_system,
    truncate_ground_truth,
)

__version__ = "0.1.0"

__all__ = [
    "AggregateReport",
    "ClusterConfig",
    "ConfigurationError",
    "CsvFormatError",
    "Dataset",
    "DisclosureTrace",
    "ExperimentConfig",
    "FederatedKMeans",
    "GroundTruthAssignments",
    "IndexSets",
    "InsufficientTraceError",
    "LeakageCertificate",
    "LloydResult",
    "PgmFormatError",
    "QuantizationError",
    "RecordMatrix",
    "RrefResult",
    "SingularMatrixError",
    "TrajectoryReconstructor",
    "TrialRecord",
    "TrialReport",
    "TrueSystem",
    "assign",
    "build_initial",
    "build_record",
    "classify",
    "cluster_sums",
    "compute_deltas",
    "dedup_columns",
    "emit_reconstructions",
    "emit_report",
    "fill_one",
    "gen_synthetic",
    "index_sets",
    "init_centroids",
    "init_centroids_plusplus",
    "leakage_rows",
    "load_csv",
    "load_dataset",
    "load_pgm_dir",
    "read_pgm",
    "recursive_step",
    "render_table",
    "rref_augmented",
    "run",
    "run_trials",
    "solve_exact_square",
    "stationary_blocks",
    "trace_from_centroid_disclosures",
    "true_system",
    "truncate_ground_truth",
    "truncate_trace",
    "write_pgm",
]
