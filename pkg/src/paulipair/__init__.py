"""Pair-adaptive upload-circuit selection over low-weight Pauli features."""

from .config import STRATEGIES, RunConfig
from .data import Dataset, fixture_path, load_csv
from .pauli import enumerate_family, expectation, feature_matrix, greedy_group
from .report import build_report, emit, load
from .search import SearchConfig, run_pipeline
from .sim import GATE_LIBRARY, dense_unitary_oracle, encode

__all__ = [
    "STRATEGIES",
    "RunConfig",
    "Dataset",
    "fixture_path",
    "load_csv",
    "enumerate_family",
    "expectation",
    "feature_matrix",
    "greedy_group",
    "build_report",
    "emit",
    "load",
    "SearchConfig",
    "run_pipeline",
    "GATE_LIBRARY",
    "dense_unitary_oracle",
    "encode",
]

__version__ = "0.1.0"
