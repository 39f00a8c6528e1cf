"""
Regression table preparation.

Preparation runs in a fixed order: omit empty-population months, log1p the
skewed controls, trim the upper tail of each outcome, then z-score fork
entropy and every control with pooled sample statistics. Each step is recorded
in the transform log so standardization can be undone exactly.
"""
import math
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Sequence

import numpy as np
import pandas as pd

from forkentropy.errors import DegenerateColumn, InsufficientData
from forkentropy.logging_config import get_logger
from forkentropy.metrics.snapshot import CONTROL_COLUMNS, METRIC_COLUMNS, OUTCOME_COLUMNS, SnapshotMetrics

logger = get_logger(__name__)

LOG_COLUMNS = ("num_forks", "num_files", "num_stars", "ratio_old_contributors")
ENTROPY_COLUMNS = ("fork_entropy", "fork_entropy_pr_variant")
STANDARDIZED_COLUMNS = ENTROPY_COLUMNS + CONTROL_COLUMNS


@dataclass
class RegressionTable:
    """Metrics rows as a frame in (project_id, month) order plus the applied transforms."""

    frame: pd.DataFrame
    transform_log: Dict[str, Any] = field(default_factory=dict)

    @property
    def prepared(self) -> bool:
        return bool(self.transform_log)

    def __len__(self) -> int:
        return len(self.frame)


def metrics_frame(rows: Iterable[SnapshotMetrics]) -> pd.DataFrame:
    """Frame with the export columns, sorted by (project_id, month)."""
    frame = pd.DataFrame([row.to_dict() for row in rows], columns=list(METRIC_COLUMNS))
    frame = frame.sort_values(["project_id", "month"], kind="mergesort").reset_index(drop=True)
    for column in ENTROPY_COLUMNS + ("acceptance_rate", "ratio_old_contributors",
                                     "ratio_prs_with_tests", "ratio_prs_touch_hot_files"):
        frame[column] = pd.to_numeric(frame[column], errors="coerce").astype("float64")
    return frame


def raw_table(rows: Iterable[SnapshotMetrics]) -> RegressionTable:
    return RegressionTable(frame=metrics_frame(rows))


def upper_tail_threshold(values: pd.Series, fraction: float) -> Dict[str, Any]:
    """
    Trim rule for one outcome: with ``k = floor(fraction * n)`` over defined
    values, every value strictly above the (k+1)-th largest is an outlier.
    """
    defined = values.dropna().sort_values(ascending=False, kind="mergesort")
    # floor: at the default fraction of 0.01, fewer than 100 defined values trim nothing
    k = int(math.floor(fraction * len(defined)))
    if k == 0 or len(defined) <= k:
        return {"k": k, "threshold": None}
    return {"k": k, "threshold": float(defined.iloc[k])}


def standardize_column(frame: pd.DataFrame, column: str) -> Dict[str, float]:
    """
    Z-score one column in place with the sample (n-1) standard deviation.

    Raises:
        DegenerateColumn: If fewer than two values are defined or they are all equal
    """
    values = frame[column].astype("float64")
    mean = values.mean(skipna=True)
    std = values.std(ddof=1, skipna=True)
    if values.notna().sum() < 2 or not np.isfinite(std) or std == 0:
        raise DegenerateColumn(column)
    frame[column] = (values - mean) / std
    return {"mean": float(mean), "std": float(std)}


def prepare_table(rows: Sequence[SnapshotMetrics], outlier_fraction: float = 0.01) -> RegressionTable:
    """
    Prepare the pooled regression table.

    Args:
        rows: Raw metrics rows of one or more projects
        outlier_fraction: Upper-tail share trimmed per outcome

    Returns:
        RegressionTable with a complete transform_log

    Raises:
        InsufficientData: If fewer than two rows remain
        DegenerateColumn: If a standardized column has zero variance
    """
    frame = metrics_frame(rows)
    rows_in = len(frame)

    frame = frame[frame["num_forks"] > 0].reset_index(drop=True)
    dropped_empty = rows_in - len(frame)
    if len(frame) < 2:
        raise InsufficientData("prepare_table", len(frame), "standardization needs at least 2 rows")

    for column in LOG_COLUMNS:
        frame[column] = np.log1p(frame[column].astype("float64"))

    trim: Dict[str, Any] = {}
    outliers = pd.Series(False, index=frame.index)
    for column in OUTCOME_COLUMNS:
        rule = upper_tail_threshold(frame[column], outlier_fraction)
        mask = frame[column] > rule["threshold"] if rule["threshold"] is not None else pd.Series(False, index=frame.index)
        rule["removed"] = int(mask.sum())
        trim[column] = rule
        outliers |= mask
    frame = frame[~outliers].reset_index(drop=True)
    if len(frame) < 2:
        raise InsufficientData("prepare_table", len(frame), "fewer than 2 rows left after trimming")

    standardize = {column: standardize_column(frame, column) for column in STANDARDIZED_COLUMNS}

    transform_log = {
        "rows_in": rows_in,
        "dropped_empty_population": dropped_empty,
        "log1p": list(LOG_COLUMNS),
        "outlier_fraction": outlier_fraction,
        "trim": trim,
        "standardize": standardize,
        "rows_out": len(frame),
    }
    logger.info(
        f"Prepared regression table: {rows_in} rows in, {dropped_empty} empty, "
        f"{int(outliers.sum())} trimmed, {len(frame)} retained"
    )
    return RegressionTable(frame=frame, transform_log=transform_log)


def invert_standardization(table: RegressionTable) -> pd.DataFrame:
    """Undo the z-scores recorded in the transform log (log1p stays applied)."""
    frame = table.frame.copy()
    for column, params in table.transform_log.get("standardize", {}).items():
        frame[column] = frame[column] * params["std"] + params["mean"]
    return frame


def interaction_terms(table: RegressionTable, controls: Sequence[str] = CONTROL_COLUMNS) -> pd.DataFrame:
    """Design frame with ``fork_entropy_x_<control>`` products appended."""
    frame = table.frame.copy()
    added: List[str] = []
    for control in controls:
        name = f"fork_entropy_x_{control}"
        frame[name] = frame["fork_entropy"] * frame[control]
        added.append(name)
    logger.debug(f"Added {len(added)} interaction terms")
    return frame
