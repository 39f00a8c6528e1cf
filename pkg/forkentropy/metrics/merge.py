"""
Pull request merge detection.

A closed pull request counts as merged when, in priority order:

1. the forge recorded a merge action;
2. a commit in the source history closes it with a phrase such as
   ``Fixes #123``;
3. one of its last three comments announces an integration (merged, applied,
   cherry-picked, squashed, landed...) and references a source-history sha.
"""
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import AbstractSet, Dict, Optional, Sequence

from forkentropy.dataset.index import dataset_index
from forkentropy.dataset.records import EventDataset, PullRequestRecord
from forkentropy.dataset.references import (
    COMMENTS_CONSIDERED,
    MERGE_INDICATION,
    SHA_REFERENCE,
    closed_references,
    resolve_prefix,
)
from forkentropy.errors import OpenPullRequest
from forkentropy.logging_config import get_logger

logger = get_logger(__name__)


class MergeReason(str, Enum):
    FORGE_MERGED_ACTION = "forge_merged_action"
    CLOSING_COMMIT_PHRASE = "closing_commit_phrase"
    COMMENT_COMMIT_REFERENCE = "comment_commit_reference"
    NOT_MERGED = "not_merged"


@dataclass(frozen=True)
class MergeVerdict:
    pr_id: int
    merged: bool
    reason: MergeReason


def _references_history(comment: str, sorted_history: Sequence[str]) -> bool:
    return any(resolve_prefix(sorted_history, match.group(0)) for match in SHA_REFERENCE.finditer(comment))


def comment_signals_merge(comment: str, sorted_history: Sequence[str]) -> bool:
    """True when a comment both announces an integration and cites a history sha."""
    return bool(MERGE_INDICATION.search(comment)) and _references_history(comment, sorted_history)


def detect_merged(
    pr: PullRequestRecord,
    source_history: AbstractSet[str],
    dataset: EventDataset,
    closing_numbers: Optional[AbstractSet[int]] = None,
) -> MergeVerdict:
    """
    Judge whether a closed pull request was integrated.

    Args:
        pr: The pull request; must be closed
        source_history: Full shas of the source repository's commits
        dataset: Dataset providing the commit messages of that history
        closing_numbers: Precomputed closing-phrase references of the history

    Returns:
        MergeVerdict naming the first rule that fired

    Raises:
        OpenPullRequest: If the pull request has no closed_at
    """
    if pr.closed_at is None:
        raise OpenPullRequest(pr.pr_id)

    if pr.merged_action:
        return MergeVerdict(pr.pr_id, True, MergeReason.FORGE_MERGED_ACTION)

    if closing_numbers is None:
        source_id = dataset.source_repo_id
        closing_numbers = closed_references(
            c.message for c in dataset.commits if c.repo_id == source_id and c.sha in source_history
        )
    if pr.pr_id in closing_numbers:
        return MergeVerdict(pr.pr_id, True, MergeReason.CLOSING_COMMIT_PHRASE)

    sorted_history = sorted(source_history)
    for comment in pr.last_comments[-COMMENTS_CONSIDERED:]:
        if comment_signals_merge(comment, sorted_history):
            return MergeVerdict(pr.pr_id, True, MergeReason.COMMENT_COMMIT_REFERENCE)

    return MergeVerdict(pr.pr_id, False, MergeReason.NOT_MERGED)


@lru_cache(maxsize=16)
def merge_verdicts(dataset: EventDataset) -> Dict[int, MergeVerdict]:
    """Verdicts of every closed pull request, keyed by pull request number."""
    index = dataset_index(dataset)
    source_id = dataset.source_repo_id
    closing_numbers = closed_references(c.message for c in index.commits_by_repo.get(source_id, ()))
    verdicts = {
        pr.pr_id: detect_merged(pr, index.source_history, dataset, closing_numbers)
        for pr in dataset.pulls
        if pr.is_closed
    }
    merged = sum(1 for v in verdicts.values() if v.merged)
    logger.debug(f"Merge verdicts for {dataset.project_id}: {merged} of {len(verdicts)} closed PRs merged")
    return verdicts
