"""
Population builder: monthly snapshots, contributor roles and matrices.
"""
from forkentropy.population.cache import CachedSnapshot, SnapshotCache, dataset_fingerprint
from forkentropy.population.matrix import build_matrix, build_pr_filtered_matrix
from forkentropy.population.roles import ContributorRole, Role, classify_contributor
from forkentropy.population.snapshots import Snapshot, build_snapshots, month_intervals, snapshot_ref

__all__ = [
    "CachedSnapshot",
    "ContributorRole",
    "Role",
    "Snapshot",
    "SnapshotCache",
    "build_matrix",
    "build_pr_filtered_matrix",
    "build_snapshots",
    "classify_contributor",
    "dataset_fingerprint",
    "month_intervals",
    "snapshot_ref",
]
