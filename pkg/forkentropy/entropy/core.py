"""
Kernelized fork distances and quadratic entropy over fork populations.

The distance between two forks is the Laplacian kernel distance
``1 - exp(-gamma * L1)`` over their sparse changed-line vectors. Fork entropy
is the mean pairwise distance over all ordered pairs of population rows.
"""
import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional

import numpy as np

from forkentropy.entropy.vectors import FileModificationMatrix, FileModVector
from forkentropy.errors import InvalidGamma, ValidationError
from forkentropy.logging_config import get_logger

logger = get_logger(__name__)

DEFAULT_GAMMA = 1.0

# (l1, gamma) -> distance in [0, 1); must map 0 to 0 and accept numpy arrays
Kernel = Callable[[np.ndarray, float], np.ndarray]


def laplacian_kernel(l1, gamma: float):
    """Laplacian kernel distance ``1 - exp(-gamma * l1)``, computed as ``-expm1``."""
    return -np.expm1(-gamma * np.asarray(l1, dtype=np.float64))


def check_gamma(gamma) -> float:
    """
    Validate the kernel bandwidth.

    Raises:
        InvalidGamma: If gamma is not a positive finite real
    """
    if isinstance(gamma, bool):
        raise InvalidGamma(gamma)
    try:
        value = float(gamma)
    except (TypeError, ValueError):
        raise InvalidGamma(gamma)
    if not math.isfinite(value) or value <= 0:
        raise InvalidGamma(gamma)
    return value


def l1_distance(a: FileModVector, b: FileModVector) -> int:
    """
    L1 distance between two sparse vectors by merge-join over sorted entries.

    Missing entries read as zero, so disjoint supports are valid.
    """
    ea, eb = a.entries, b.entries
    i = j = 0
    total = 0
    while i < len(ea) and j < len(eb):
        ca, va = ea[i]
        cb, vb = eb[j]
        if ca == cb:
            total += abs(va - vb)
            i += 1
            j += 1
        elif ca < cb:
            total += va
            i += 1
        else:
            total += vb
            j += 1
    total += sum(v for _, v in ea[i:])
    total += sum(v for _, v in eb[j:])
    return total


def pair_distance(
    a: FileModVector,
    b: FileModVector,
    gamma: float = DEFAULT_GAMMA,
    kernel: Optional[Kernel] = None,
) -> float:
    """Kernel distance between two forks; 0 for identical vectors."""
    gamma = check_gamma(gamma)
    kernel = kernel or laplacian_kernel
    return float(kernel(np.float64(l1_distance(a, b)), gamma))


def pairwise_l1(matrix: FileModificationMatrix) -> np.ndarray:
    """
    Full m x m L1 distance matrix.

    Uses ``|a - b|_1 = |a|_1 + |b|_1 - 2 * sum_j min(a_j, b_j)``; the shared
    term is accumulated column by column over the rows that touch each column,
    so the work is proportional to the co-occurring nonzeros.
    """
    norms = np.array([row.l1_norm for row in matrix.rows], dtype=np.int64)
    shared = np.zeros((matrix.m, matrix.m), dtype=np.int64)
    for rows, values in matrix.columns().values():
        if len(rows) == 1:
            shared[rows[0], rows[0]] += values[0]
            continue
        idx = np.asarray(rows, dtype=np.intp)
        vals = np.asarray(values, dtype=np.int64)
        shared[np.ix_(idx, idx)] += np.minimum.outer(vals, vals)
    return norms[:, None] + norms[None, :] - 2 * shared


@dataclass(frozen=True)
class EntropyResult:
    """Fork entropy of one matrix."""

    snapshot_ref: str
    m: int
    n: int
    gamma: float
    value: float


def quadratic_entropy(
    matrix: FileModificationMatrix,
    gamma: float = DEFAULT_GAMMA,
    kernel: Optional[Kernel] = None,
) -> EntropyResult:
    """
    Quadratic entropy of the matrix rows under the kernel distance.

    The sum runs over unordered pairs and is doubled; the diagonal contributes
    zero. Pair distances are added with ``math.fsum`` so the value does not
    depend on row order.

    Args:
        matrix: A valid file modification matrix
        gamma: Kernel bandwidth, positive and finite
        kernel: Optional replacement for the Laplacian kernel

    Returns:
        EntropyResult with value in [0, 1)
    """
    gamma = check_gamma(gamma)
    kernel = kernel or laplacian_kernel
    m = matrix.m
    if m == 1:
        return EntropyResult(matrix.snapshot_ref, m, matrix.n, gamma, 0.0)

    l1 = pairwise_l1(matrix)
    upper = np.triu_indices(m, k=1)
    distances = kernel(l1[upper].astype(np.float64), gamma)
    value = 2.0 * math.fsum(distances.tolist()) / (m * m)
    logger.debug(f"Entropy of {matrix.snapshot_ref or '<matrix>'}: m={m}, n={matrix.n}, value={value:.10f}")
    return EntropyResult(matrix.snapshot_ref, m, matrix.n, gamma, value)


def distances_to_population(
    matrix: FileModificationMatrix,
    new_row: FileModVector,
    gamma: float = DEFAULT_GAMMA,
    kernel: Optional[Kernel] = None,
) -> np.ndarray:
    """Kernel distances from ``new_row`` to every row of the matrix, in row order."""
    gamma = check_gamma(gamma)
    kernel = kernel or laplacian_kernel
    l1 = np.array([l1_distance(row, new_row) for row in matrix.rows], dtype=np.float64)
    return np.asarray(kernel(l1, gamma), dtype=np.float64)


def mean_distance_to_population(
    matrix: FileModificationMatrix,
    new_row: FileModVector,
    gamma: float = DEFAULT_GAMMA,
    kernel: Optional[Kernel] = None,
) -> float:
    """Mean kernel distance from a prospective fork to the current population."""
    distances = distances_to_population(matrix, new_row, gamma, kernel)
    return math.fsum(distances.tolist()) / matrix.m


def entropy_after_add(entropy_before: float, m: int, sum_new_distances: float) -> float:
    """
    Fork entropy after adding one row, from the previous entropy.

    ``(m^2 * H + 2 * S) / (m + 1)^2`` where ``S`` is the summed distance of the
    new row to the existing ``m`` rows.

    Raises:
        ValidationError: If m < 1 or the distance sum is negative
    """
    if isinstance(m, bool) or int(m) != m or m < 1:
        raise ValidationError(f"m must be a positive integer, got {m!r}", m=m)
    if not sum_new_distances >= 0:
        raise ValidationError(
            f"Sum of new distances must be non-negative, got {sum_new_distances!r}",
            sum_new_distances=sum_new_distances,
        )
    m = int(m)
    return (m * m * entropy_before + 2.0 * sum_new_distances) / ((m + 1) ** 2)


def entropy_delta(entropy_before: float, m: int, mean_distance: float) -> float:
    """Exact entropy change ``(2m * D - (2m + 1) * H) / (m + 1)^2``."""
    return (2 * m * mean_distance - (2 * m + 1) * entropy_before) / ((m + 1) ** 2)


def approx_entropy_delta(entropy_before: float, m: int, mean_distance: float) -> float:
    """Entropy change with ``1/(m + 0.5)`` approximated by ``1/m``."""
    return (2 * m + 1) / ((m + 1) ** 2) * (mean_distance - entropy_before)


class ForkLabel(str, Enum):
    REDUNDANT = "redundant"
    DISTINCTIVE = "distinctive"
    NEUTRAL = "neutral"


@dataclass(frozen=True)
class NewForkAssessment:
    """Effect of adding one fork to a population."""

    mean_distance: float
    entropy_before: float
    entropy_after: float
    delta: float
    label: ForkLabel
    approx_delta: float
    m: int

    def to_dict(self) -> dict:
        return {
            "mean_distance": self.mean_distance,
            "entropy_before": self.entropy_before,
            "entropy_after": self.entropy_after,
            "delta": self.delta,
            "approx_delta": self.approx_delta,
            "label": self.label.value,
            "m": self.m,
        }


def classify_new_fork(
    matrix: FileModificationMatrix,
    new_row: FileModVector,
    gamma: float = DEFAULT_GAMMA,
    kernel: Optional[Kernel] = None,
) -> NewForkAssessment:
    """
    Label a prospective fork as redundant, distinctive or neutral.

    The label compares the mean distance to the population with the current
    entropy; the delta uses the exact incremental formula.
    """
    gamma = check_gamma(gamma)
    m = matrix.m
    before = quadratic_entropy(matrix, gamma, kernel).value
    distances = distances_to_population(matrix, new_row, gamma, kernel).tolist()
    total = math.fsum(distances)
    mean_distance = total / m

    if mean_distance < before:
        label = ForkLabel.REDUNDANT
    elif mean_distance > before:
        label = ForkLabel.DISTINCTIVE
    else:
        label = ForkLabel.NEUTRAL

    assessment = NewForkAssessment(
        mean_distance=mean_distance,
        entropy_before=before,
        entropy_after=entropy_after_add(before, m, total),
        delta=entropy_delta(before, m, mean_distance),
        label=label,
        approx_delta=approx_entropy_delta(before, m, mean_distance),
        m=m,
    )
    logger.debug(f"New fork {new_row.fork_id}: {label.value}, delta={assessment.delta:+.10f}")
    return assessment
