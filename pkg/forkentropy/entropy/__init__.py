"""
Entropy core: sparse fork vectors, kernel distances and quadratic entropy.
"""
from forkentropy.entropy.core import (
    DEFAULT_GAMMA,
    EntropyResult,
    ForkLabel,
    NewForkAssessment,
    approx_entropy_delta,
    classify_new_fork,
    entropy_after_add,
    entropy_delta,
    l1_distance,
    laplacian_kernel,
    mean_distance_to_population,
    pair_distance,
    quadratic_entropy,
)
from forkentropy.entropy.vectors import (
    FileModificationMatrix,
    FileModVector,
    parse_row_spec,
    read_matrix,
    write_matrix,
)

__all__ = [
    "DEFAULT_GAMMA",
    "EntropyResult",
    "FileModificationMatrix",
    "FileModVector",
    "ForkLabel",
    "NewForkAssessment",
    "approx_entropy_delta",
    "classify_new_fork",
    "entropy_after_add",
    "entropy_delta",
    "l1_distance",
    "laplacian_kernel",
    "mean_distance_to_population",
    "pair_distance",
    "parse_row_spec",
    "quadratic_entropy",
    "read_matrix",
    "write_matrix",
]
