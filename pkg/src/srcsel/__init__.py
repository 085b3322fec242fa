"""Truth-aware source selection over an inverted value index."""

from .coverage import cov_set, cov_source, marginal_inclusion_exclusion, marginal_index
from .index import CoverageIndex, IndexEntry, build_index
from .model import Claim, CatalogError, Query, SourceCatalog, estimate_truth_probabilities, ingest_claims
from .pruning import derive_value_threshold, prune_values
from .selection import (
    Objective,
    SelectionConfig,
    SelectionReport,
    brute_force_optimal,
    run_max_contribution,
    run_min_cost,
    run_selection,
    select_max_round,
)

__version__ = "0.1.0"

__all__ = [
    "CatalogError", "Claim", "CoverageIndex", "IndexEntry", "Objective", "Query",
    "SelectionConfig", "SelectionReport", "SourceCatalog", "brute_force_optimal", "build_index",
    "cov_set", "cov_source", "derive_value_threshold", "estimate_truth_probabilities",
    "ingest_claims", "marginal_inclusion_exclusion", "marginal_index", "prune_values",
    "run_max_contribution", "run_min_cost", "run_selection", "select_max_round",
]
