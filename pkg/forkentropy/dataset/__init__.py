"""
Normalized event dataset: records, loading, fork network and lint rules.
"""
from forkentropy.dataset.index import DatasetIndex, dataset_index
from forkentropy.dataset.lint import LintFinding, lint_dataset
from forkentropy.dataset.loader import load_dataset, serialize_dataset
from forkentropy.dataset.network import fork_network
from forkentropy.dataset.records import (
    ActionKind,
    CommitRecord,
    EventDataset,
    FileChange,
    ForkRecord,
    IssueRecord,
    PrivilegedActionRecord,
    ProjectRecord,
    PullRequestRecord,
    StarRecord,
)

__all__ = [
    "ActionKind",
    "CommitRecord",
    "DatasetIndex",
    "EventDataset",
    "FileChange",
    "ForkRecord",
    "IssueRecord",
    "LintFinding",
    "PrivilegedActionRecord",
    "ProjectRecord",
    "PullRequestRecord",
    "StarRecord",
    "dataset_index",
    "fork_network",
    "lint_dataset",
    "load_dataset",
    "serialize_dataset",
]
