"""
Monthly snapshots and their external-contributor fork populations.
"""
from dataclasses import dataclass
from datetime import datetime, timezone
from itertools import chain
from typing import Dict, List, Optional, Tuple

from forkentropy.dataset.index import DatasetIndex, dataset_index
from forkentropy.dataset.records import CommitRecord, EventDataset, ForkRecord
from forkentropy.logging_config import get_logger

logger = get_logger(__name__)

PopulationEntry = Tuple[str, Tuple[str, ...]]


@dataclass(frozen=True)
class Snapshot:
    """One calendar month [interval_start, interval_end) of a project."""

    project_id: str
    interval_start: datetime
    interval_end: datetime
    population: Tuple[PopulationEntry, ...]

    @property
    def month(self) -> str:
        return self.interval_start.strftime("%Y-%m")

    @property
    def ref(self) -> str:
        return snapshot_ref(self.project_id, self.month)

    @property
    def fork_ids(self) -> Tuple[str, ...]:
        return tuple(fork_id for fork_id, _ in self.population)

    @property
    def is_empty(self) -> bool:
        return not self.population

    def contains(self, at: datetime) -> bool:
        return self.interval_start <= at < self.interval_end

    def to_record(self) -> dict:
        return {
            "project_id": self.project_id,
            "month": self.month,
            "interval_start": self.interval_start.strftime("%Y-%m-%dT%H:%M:%SZ"),
            "interval_end": self.interval_end.strftime("%Y-%m-%dT%H:%M:%SZ"),
            "population": [{"fork_id": fork_id, "commit_shas": list(shas)} for fork_id, shas in self.population],
        }


def snapshot_ref(project_id: str, month: str) -> str:
    return f"{project_id}@{month}"


def month_start(at: datetime) -> datetime:
    at = at.astimezone(timezone.utc)
    return datetime(at.year, at.month, 1, tzinfo=timezone.utc)


def next_month(start: datetime) -> datetime:
    if start.month == 12:
        return start.replace(year=start.year + 1, month=1)
    return start.replace(month=start.month + 1)


def month_intervals(first: datetime, last: datetime) -> List[Tuple[datetime, datetime]]:
    """Consecutive calendar months from the month of ``first`` through the month of ``last``."""
    intervals = []
    start = month_start(first)
    stop = month_start(last)
    while start <= stop:
        end = next_month(start)
        intervals.append((start, end))
        start = end
    return intervals


def last_event_time(dataset: EventDataset) -> datetime:
    """Latest timestamp of any record, or the project creation time."""
    times = chain(
        (dataset.project.created_at,),
        (f.created_at for f in dataset.forks),
        (c.committed_at for c in dataset.commits),
        (p.created_at for p in dataset.pulls),
        (p.closed_at for p in dataset.pulls if p.closed_at is not None),
        (i.created_at for i in dataset.issues),
        (a.occurred_at for a in dataset.privileged_actions),
        (s.starred_at for s in dataset.stars),
    )
    return max(times)


def role_cutoff_time(cutoff: str, start: datetime, end: datetime, fork: ForkRecord) -> datetime:
    if cutoff == "interval_start":
        return start
    if cutoff == "fork_created":
        return fork.created_at
    return end


def is_qualifying_commit(commit: CommitRecord, start: datetime, end: datetime) -> bool:
    """Non-merge commit with at least one changed line inside [start, end)."""
    return (
        start <= commit.committed_at < end
        and not commit.is_merge
        and commit.changed_lines > 0
    )


def build_population(
    dataset: EventDataset,
    start: datetime,
    end: datetime,
    role_cutoff: str = "interval_end",
    index: Optional[DatasetIndex] = None,
) -> Tuple[PopulationEntry, ...]:
    """
    Fork population of one interval, in fork-network order.

    A sha pushed to several qualifying forks is attributed to the
    earliest-created of them (repo id breaks ties); forks left without
    commits after attribution drop out.
    """
    index = index or dataset_index(dataset)
    candidates: Dict[str, List[str]] = {}
    owners: Dict[str, ForkRecord] = {}
    for fork in index.network:
        shas = sorted({
            c.sha for c in index.commits_by_repo.get(fork.repo_id, ())
            if is_qualifying_commit(c, start, end)
        })
        if not shas:
            continue
        if index.is_privileged(fork.owner_id, role_cutoff_time(role_cutoff, start, end, fork)):
            logger.debug(f"Fork {fork.full_name} excluded: owner {fork.owner_id} is privileged")
            continue
        candidates[fork.repo_id] = shas
        owners[fork.repo_id] = fork

    claimed: Dict[str, str] = {}
    for repo_id in sorted(candidates, key=lambda r: owners[r].sort_key):
        for sha in candidates[repo_id]:
            claimed.setdefault(sha, repo_id)

    population = []
    for fork in index.network:
        if fork.repo_id not in candidates:
            continue
        shas = tuple(sha for sha in candidates[fork.repo_id] if claimed[sha] == fork.repo_id)
        if shas:
            population.append((fork.repo_id, shas))
    return tuple(population)


def build_snapshots(dataset: EventDataset, role_cutoff: str = "interval_end") -> List[Snapshot]:
    """
    One snapshot per calendar month, from the source repository's creation
    month through the month of the dataset's last event.

    Args:
        dataset: A loaded dataset
        role_cutoff: When the fork owner's role is evaluated
            (``interval_end``, ``interval_start`` or ``fork_created``)

    Returns:
        Snapshots in chronological order; populations may be empty
    """
    index = dataset_index(dataset)
    snapshots = [
        Snapshot(
            project_id=dataset.project_id,
            interval_start=start,
            interval_end=end,
            population=build_population(dataset, start, end, role_cutoff, index),
        )
        for start, end in month_intervals(dataset.project.created_at, last_event_time(dataset))
    ]
    logger.info(
        f"Built {len(snapshots)} snapshots for {dataset.project_id} "
        f"({sum(1 for s in snapshots if not s.is_empty)} with forks)"
    )
    return snapshots
