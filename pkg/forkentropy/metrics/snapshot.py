"""
Per-snapshot metrics row: fork entropy, outcomes and controls.
"""
from dataclasses import asdict, dataclass
from typing import Any, Dict, Optional, Tuple

from forkentropy.dataset.records import EventDataset
from forkentropy.entropy.core import DEFAULT_GAMMA, quadratic_entropy
from forkentropy.entropy.vectors import FileModificationMatrix
from forkentropy.errors import EmptyPopulation
from forkentropy.logging_config import get_logger
from forkentropy.metrics.bugs import count_bug_reports
from forkentropy.metrics.controls import DEFAULT_HOT_WINDOW_DAYS, control_variables
from forkentropy.metrics.outcomes import acceptance_rate, external_productivity
from forkentropy.population.matrix import build_matrix, build_pr_filtered_matrix
from forkentropy.population.snapshots import Snapshot

logger = get_logger(__name__)

METRIC_COLUMNS: Tuple[str, ...] = (
    "project_id",
    "month",
    "fork_entropy",
    "fork_entropy_pr_variant",
    "external_productivity",
    "prs_merged",
    "prs_closed",
    "acceptance_rate",
    "bug_reports",
    "num_forks",
    "num_files",
    "project_age_days",
    "num_stars",
    "ratio_old_contributors",
    "ratio_prs_with_tests",
    "ratio_prs_touch_hot_files",
)

OUTCOME_COLUMNS: Tuple[str, ...] = ("external_productivity", "acceptance_rate", "bug_reports")
CONTROL_COLUMNS: Tuple[str, ...] = (
    "num_forks",
    "num_files",
    "project_age_days",
    "num_stars",
    "ratio_old_contributors",
    "ratio_prs_with_tests",
    "ratio_prs_touch_hot_files",
)


@dataclass(frozen=True)
class SnapshotMetrics:
    """One project-month of the regression table. ``None`` marks an undefined value."""

    project_id: str
    month: str
    fork_entropy: Optional[float]
    fork_entropy_pr_variant: Optional[float]
    external_productivity: int
    prs_merged: int
    prs_closed: int
    acceptance_rate: Optional[float]
    bug_reports: int
    num_forks: int
    num_files: int
    project_age_days: int
    num_stars: int
    ratio_old_contributors: Optional[float]
    ratio_prs_with_tests: Optional[float]
    ratio_prs_touch_hot_files: Optional[float]

    @property
    def has_population(self) -> bool:
        return self.num_forks > 0

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "SnapshotMetrics":
        return cls(**{name: data.get(name) for name in METRIC_COLUMNS})


def snapshot_matrices(
    dataset: EventDataset, snapshot: Snapshot
) -> Tuple[Optional[FileModificationMatrix], Optional[FileModificationMatrix]]:
    """Full and PR-filtered matrices, each None when its population is empty."""
    if snapshot.is_empty:
        return None, None
    matrix = build_matrix(dataset, snapshot)
    try:
        pr_matrix: Optional[FileModificationMatrix] = build_pr_filtered_matrix(dataset, snapshot)
    except EmptyPopulation:
        pr_matrix = None
    return matrix, pr_matrix


def compute_snapshot_metrics(
    dataset: EventDataset,
    snapshot: Snapshot,
    gamma: float = DEFAULT_GAMMA,
    hot_window_days: int = DEFAULT_HOT_WINDOW_DAYS,
    hot_file_reference: str = "interval_start",
    matrices: Optional[Tuple[Optional[FileModificationMatrix], Optional[FileModificationMatrix]]] = None,
) -> SnapshotMetrics:
    """
    Compute every variable of one snapshot.

    Args:
        dataset: The loaded dataset
        snapshot: The snapshot to measure
        gamma: Kernel bandwidth of fork entropy
        hot_window_days: Trailing window of the hot-file set
        hot_file_reference: ``interval_start`` or ``pr_created``
        matrices: Prebuilt (full, PR-filtered) matrices, e.g. from the snapshot cache

    Returns:
        The snapshot's metrics row
    """
    matrix, pr_matrix = matrices if matrices is not None else snapshot_matrices(dataset, snapshot)
    merged, closed, rate = acceptance_rate(snapshot, dataset)
    controls = control_variables(snapshot, dataset, matrix, hot_window_days, hot_file_reference)

    metrics = SnapshotMetrics(
        project_id=snapshot.project_id,
        month=snapshot.month,
        fork_entropy=quadratic_entropy(matrix, gamma).value if matrix is not None else None,
        fork_entropy_pr_variant=quadratic_entropy(pr_matrix, gamma).value if pr_matrix is not None else None,
        external_productivity=external_productivity(snapshot, dataset),
        prs_merged=merged,
        prs_closed=closed,
        acceptance_rate=rate,
        bug_reports=count_bug_reports(snapshot, dataset),
        **controls,  # type: ignore[arg-type]
    )
    logger.debug(f"Metrics {snapshot.ref}: entropy={metrics.fork_entropy}, productivity={metrics.external_productivity}")
    return metrics
