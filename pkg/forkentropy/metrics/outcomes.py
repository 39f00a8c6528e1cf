"""
Outcome variables: external productivity and external PR acceptance rate.
"""
from typing import List, Optional, Tuple

from forkentropy.dataset.index import DatasetIndex, dataset_index
from forkentropy.dataset.records import EventDataset, PullRequestRecord
from forkentropy.metrics.merge import merge_verdicts
from forkentropy.population.snapshots import Snapshot


def is_external_pull(pull: PullRequestRecord, index: DatasetIndex) -> bool:
    """Opened against the source repository from a network fork by a then-external user."""
    return index.is_external_pull(pull)


def external_pulls_closed_in(snapshot: Snapshot, dataset: EventDataset) -> List[PullRequestRecord]:
    index = dataset_index(dataset)
    return [
        pull for pull in dataset.pulls
        if pull.closed_at is not None and snapshot.contains(pull.closed_at) and is_external_pull(pull, index)
    ]


def external_pulls_created_in(snapshot: Snapshot, dataset: EventDataset) -> List[PullRequestRecord]:
    index = dataset_index(dataset)
    return [pull for pull in dataset.pulls if snapshot.contains(pull.created_at) and is_external_pull(pull, index)]


def external_productivity(snapshot: Snapshot, dataset: EventDataset) -> int:
    """Distinct commit shas of external pull requests merged (closed) in the interval."""
    verdicts = merge_verdicts(dataset)
    shas = {
        sha
        for pull in external_pulls_closed_in(snapshot, dataset)
        if verdicts[pull.pr_id].merged
        for sha in pull.commit_shas
    }
    return len(shas)


def acceptance_rate(snapshot: Snapshot, dataset: EventDataset) -> Tuple[int, int, Optional[float]]:
    """
    Merged and closed counts of external pull requests closed in the interval.

    Returns:
        (merged, closed, rate); rate is None when nothing was closed
    """
    verdicts = merge_verdicts(dataset)
    closed = external_pulls_closed_in(snapshot, dataset)
    merged = sum(1 for pull in closed if verdicts[pull.pr_id].merged)
    rate = merged / len(closed) if closed else None
    return merged, len(closed), rate
