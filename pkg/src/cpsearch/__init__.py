"""Bayesian-network structure learning over scored candidate parent sets.

The pipeline: score a discrete dataset's candidate parent sets (BDeu with
subset-dominance pruning), then search node orderings for the best
consistent structure, optionally fanning out to parallel workers that each
solve a half-normal-sampled slice of the table under a shared budget.
"""

from .budget import Budget, IterationBudget, TimeBudget
from .engine import (
    ComparisonTable,
    EngineError,
    RunConfig,
    RunReport,
    WorkerResult,
    compare_runs,
    delta,
    ps_minobs,
)
from .fileio import (
    CyclicStructureError,
    DagFormatError,
    DatasetFormatError,
    FormatError,
    ScoreFileError,
    ScoreFileHeaderInfo,
    parse_dag,
    parse_dataset,
    parse_score_file,
    parse_score_file_ex,
    parse_snapshot_csv,
    write_dag,
    write_score_file,
    write_snapshot_csv,
)
from .model import (
    CodeOutOfRangeError,
    Dag,
    Dataset,
    ModelError,
    NodeScoreTable,
    Ordering,
    ParentSet,
    RaggedRowError,
    ScoredParentSet,
    ScoreTable,
    check_acyclic,
    validate_dataset,
)
from .ordersearch import (
    IncrementalEvaluator,
    OrderingEvaluation,
    SearchConfig,
    consistent_best_parents,
    crossover,
    inobs_local_search,
    insert_move,
    minobs_search,
    mutate,
    obs_local_search,
    ordering_score,
    restart_search,
    swap_adjacent,
)
from .sampling import (
    CombinationVolume,
    RequiredWorkers,
    SamplingConfig,
    half_normal_weights,
    required_m,
    sample_node_subset,
    sample_score_table,
    subset_combinations,
)
from .scoring import (
    CapExceededError,
    ContingencyCounts,
    ScoreOverflowError,
    ScoringConfig,
    bdeu_local_score,
    build_score_table,
    count_configurations,
    count_dags,
    enumerate_scored,
    max_cps_count,
    prune_table,
)

__version__ = "0.1.0"

__all__ = [
    "Budget",
    "IterationBudget",
    "TimeBudget",
    "ComparisonTable",
    "EngineError",
    "RunConfig",
    "RunReport",
    "WorkerResult",
    "compare_runs",
    "delta",
    "ps_minobs",
    "CyclicStructureError",
    "DagFormatError",
    "DatasetFormatError",
    "FormatError",
    "ScoreFileError",
    "ScoreFileHeaderInfo",
    "parse_dag",
    "parse_dataset",
    "parse_score_file",
    "parse_score_file_ex",
    "parse_snapshot_csv",
    "write_dag",
    "write_score_file",
    "write_snapshot_csv",
    "CodeOutOfRangeError",
    "Dag",
    "Dataset",
    "ModelError",
    "NodeScoreTable",
    "Ordering",
    "ParentSet",
    "RaggedRowError",
    "ScoredParentSet",
    "ScoreTable",
    "check_acyclic",
    "validate_dataset",
    "IncrementalEvaluator",
    "OrderingEvaluation",
    "SearchConfig",
    "consistent_best_parents",
    "crossover",
    "inobs_local_search",
    "insert_move",
    "minobs_search",
    "mutate",
    "obs_local_search",
    "ordering_score",
    "restart_search",
    "swap_adjacent",
    "CombinationVolume",
    "RequiredWorkers",
    "SamplingConfig",
    "half_normal_weights",
    "required_m",
    "sample_node_subset",
    "sample_score_table",
    "subset_combinations",
    "CapExceededError",
    "ContingencyCounts",
    "ScoreOverflowError",
    "ScoringConfig",
    "bdeu_local_score",
    "build_score_table",
    "count_configurations",
    "count_dags",
    "enumerate_scored",
    "max_cps_count",
    "prune_table",
    "__version__",
]
