"""
Regression table preparation, correlation summaries and export.
"""
from forkentropy.analysis.correlation import CorrelationResult, correlation_summary, spearman
from forkentropy.analysis.export import export, read_metrics_csv, write_csv, write_ndjson
from forkentropy.analysis.table import (
    RegressionTable,
    interaction_terms,
    invert_standardization,
    prepare_table,
    raw_table,
)

__all__ = [
    "CorrelationResult",
    "RegressionTable",
    "correlation_summary",
    "export",
    "interaction_terms",
    "invert_standardization",
    "prepare_table",
    "raw_table",
    "read_metrics_csv",
    "spearman",
    "write_csv",
    "write_ndjson",
]
