"""
Control variables of a snapshot.
"""
from datetime import datetime, timedelta
from typing import Dict, List, Optional, Set

from forkentropy.dataset.records import EventDataset, PullRequestRecord
from forkentropy.entropy.vectors import FileModificationMatrix
from forkentropy.metrics.merge import merge_verdicts
from forkentropy.metrics.outcomes import external_pulls_created_in
from forkentropy.population.snapshots import Snapshot

DEFAULT_HOT_WINDOW_DAYS = 90


def hot_files(dataset: EventDataset, at_time: datetime, window_days: int = DEFAULT_HOT_WINDOW_DAYS) -> Set[str]:
    """Paths touched by pull requests merged (closed) into the source in [at_time - window, at_time)."""
    verdicts = merge_verdicts(dataset)
    window_start = at_time - timedelta(days=window_days)
    paths: Set[str] = set()
    for pull in dataset.pulls:
        if pull.target_repo_id != dataset.source_repo_id:
            continue
        if pull.closed_at is None or not window_start <= pull.closed_at < at_time:
            continue
        if verdicts[pull.pr_id].merged:
            paths.update(change.path for change in pull.files)
    return paths


def touches_tests(pull: PullRequestRecord) -> bool:
    return any("test" in change.path.lower() for change in pull.files)


def _ratio(hits: int, total: int) -> Optional[float]:
    return hits / total if total else None


def ratio_old_contributors(pulls: List[PullRequestRecord], dataset: EventDataset, before: datetime) -> Optional[float]:
    """Share of the pulls' distinct authors with a merged pull request closed strictly before ``before``."""
    authors = {pull.author_id for pull in pulls}
    if not authors:
        return None
    verdicts = merge_verdicts(dataset)
    experienced = {
        pull.author_id for pull in dataset.pulls
        if pull.author_id in authors
        and pull.target_repo_id == dataset.source_repo_id
        and pull.closed_at is not None
        and pull.closed_at < before
        and verdicts[pull.pr_id].merged
    }
    return len(experienced) / len(authors)


def ratio_prs_touch_hot_files(
    pulls: List[PullRequestRecord],
    dataset: EventDataset,
    reference: datetime,
    window_days: int = DEFAULT_HOT_WINDOW_DAYS,
    per_pull_reference: bool = False,
) -> Optional[float]:
    if not pulls:
        return None
    shared_hot = None if per_pull_reference else hot_files(dataset, reference, window_days)
    hits = 0
    for pull in pulls:
        hot = hot_files(dataset, pull.created_at, window_days) if shared_hot is None else shared_hot
        if any(change.path in hot for change in pull.files):
            hits += 1
    return hits / len(pulls)


def control_variables(
    snapshot: Snapshot,
    dataset: EventDataset,
    matrix: Optional[FileModificationMatrix] = None,
    hot_window_days: int = DEFAULT_HOT_WINDOW_DAYS,
    hot_file_reference: str = "interval_start",
) -> Dict[str, object]:
    """
    The seven control variables of one snapshot.

    Args:
        snapshot: The snapshot
        dataset: Its dataset
        matrix: The snapshot's full matrix, or None for an empty population
        hot_window_days: Trailing window of the hot-file set
        hot_file_reference: ``interval_start`` or ``pr_created``

    Returns:
        Mapping of control-variable name to value (ratios may be None)
    """
    pulls = external_pulls_created_in(snapshot, dataset)
    return {
        "num_forks": matrix.m if matrix is not None else 0,
        "num_files": matrix.n if matrix is not None else 0,
        "project_age_days": (snapshot.interval_end - dataset.project.created_at).days,
        "num_stars": sum(1 for star in dataset.stars if star.starred_at < snapshot.interval_end),
        "ratio_old_contributors": ratio_old_contributors(pulls, dataset, snapshot.interval_start),
        "ratio_prs_with_tests": _ratio(sum(1 for pull in pulls if touches_tests(pull)), len(pulls)),
        "ratio_prs_touch_hot_files": ratio_prs_touch_hot_files(
            pulls, dataset, snapshot.interval_start, hot_window_days,
            per_pull_reference=hot_file_reference == "pr_created",
        ),
    }
