"""
Outcome and control variables per snapshot.
"""
from forkentropy.metrics.bugs import BUG_KEYWORDS, count_bug_reports, is_bug_report
from forkentropy.metrics.controls import control_variables, hot_files
from forkentropy.metrics.merge import MergeReason, MergeVerdict, detect_merged, merge_verdicts
from forkentropy.metrics.outcomes import acceptance_rate, external_productivity
from forkentropy.metrics.snapshot import (
    CONTROL_COLUMNS,
    METRIC_COLUMNS,
    OUTCOME_COLUMNS,
    SnapshotMetrics,
    compute_snapshot_metrics,
    snapshot_matrices,
)

__all__ = [
    "BUG_KEYWORDS",
    "CONTROL_COLUMNS",
    "METRIC_COLUMNS",
    "MergeReason",
    "MergeVerdict",
    "OUTCOME_COLUMNS",
    "SnapshotMetrics",
    "acceptance_rate",
    "compute_snapshot_metrics",
    "control_variables",
    "count_bug_reports",
    "detect_merged",
    "external_productivity",
    "hot_files",
    "is_bug_report",
    "merge_verdicts",
    "snapshot_matrices",
]
