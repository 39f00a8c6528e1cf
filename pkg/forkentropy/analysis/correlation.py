"""
Descriptive Spearman correlations of fork entropy against each outcome.
"""
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd
from scipy.stats import spearmanr

from forkentropy.analysis.table import RegressionTable
from forkentropy.errors import InsufficientData
from forkentropy.logging_config import get_logger
from forkentropy.metrics.snapshot import OUTCOME_COLUMNS

logger = get_logger(__name__)

POOLED = "pooled"
MIN_OBSERVATIONS = 3


@dataclass(frozen=True)
class CorrelationResult:
    scope: str
    outcome: str
    n: int
    rho: Optional[float]
    note: Optional[str] = None

    def to_dict(self) -> Dict[str, Any]:
        return {"scope": self.scope, "outcome": self.outcome, "n": self.n, "rho": self.rho, "note": self.note}


def spearman(x: pd.Series, y: pd.Series, what: str = "correlation") -> float:
    """
    Spearman rank correlation over rows where both values are defined.

    Raises:
        InsufficientData: If fewer than 3 pairs remain or either side is constant
    """
    pairs = pd.concat([x, y], axis=1).dropna()
    n = len(pairs)
    if n < MIN_OBSERVATIONS:
        raise InsufficientData(what, n)
    a = pairs.iloc[:, 0].to_numpy(dtype=np.float64)
    b = pairs.iloc[:, 1].to_numpy(dtype=np.float64)
    if np.all(a == a[0]) or np.all(b == b[0]):
        raise InsufficientData(what, n, "constant input")
    rho = spearmanr(a, b).correlation
    return float(rho)


def _pair(frame: pd.DataFrame, scope: str, entropy_column: str, outcome: str) -> CorrelationResult:
    both = frame[[entropy_column, outcome]].dropna()
    try:
        rho: Optional[float] = spearman(both[entropy_column], both[outcome], f"{scope}:{outcome}")
        note = None
    except InsufficientData as e:
        rho = None
        note = e.context.get("reason")
    return CorrelationResult(scope=scope, outcome=outcome, n=len(both), rho=rho, note=note)


def correlation_summary(
    table: RegressionTable,
    outcomes: Sequence[str] = OUTCOME_COLUMNS,
    entropy_column: str = "fork_entropy",
) -> List[CorrelationResult]:
    """
    Spearman rho of fork entropy vs each outcome, pooled and per project.

    Unlike ``spearman``, this never raises InsufficientData: a pair with fewer
    than three defined rows or a constant side comes back with ``rho=None``
    and the reason in ``note``, and the other pairs are still computed.
    """
    frame = table.frame
    results = [_pair(frame, POOLED, entropy_column, outcome) for outcome in outcomes]
    for project_id, group in frame.groupby("project_id", sort=True):
        results.extend(_pair(group, str(project_id), entropy_column, outcome) for outcome in outcomes)
    undefined = sum(1 for r in results if r.rho is None)
    if undefined:
        logger.warning(f"{undefined} of {len(results)} correlations undefined (insufficient data)")
    return results
