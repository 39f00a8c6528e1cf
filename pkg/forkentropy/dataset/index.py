"""
Read-only lookup tables derived once per dataset and shared by every snapshot.
"""
from dataclasses import dataclass
from datetime import datetime
from functools import lru_cache
from typing import Dict, FrozenSet, Mapping, Optional, Sequence, Set, Tuple

from forkentropy.dataset.network import fork_network
from forkentropy.dataset.records import CommitRecord, EventDataset, ForkRecord, PullRequestRecord
from forkentropy.dataset.references import closed_references, merge_comment_shas, resolve_prefix
from forkentropy.logging_config import get_logger

logger = get_logger(__name__)


@dataclass(frozen=True)
class DatasetIndex:
    source_repo_id: str
    network: Tuple[ForkRecord, ...]
    fork_by_id: Mapping[str, ForkRecord]
    commits_by_repo: Mapping[str, Tuple[CommitRecord, ...]]
    source_history: FrozenSet[str]
    sorted_history: Tuple[str, ...]
    pr_carried_shas: FrozenSet[str]
    pulls_by_number: Mapping[int, PullRequestRecord]
    privileged_since: Mapping[str, datetime]

    @property
    def network_ids(self) -> FrozenSet[str]:
        return frozenset(self.fork_by_id)

    def is_privileged(self, user_id: str, as_of: datetime) -> bool:
        """True iff the user's first privileged act happened strictly before ``as_of``."""
        since = self.privileged_since.get(user_id)
        return since is not None and since < as_of

    def is_external_pull(self, pull: PullRequestRecord) -> bool:
        """
        Opened against the source repository, from a fork of the network, by a
        user who was external when opening it.
        """
        return (
            pull.target_repo_id == self.source_repo_id
            and pull.source_repo_id in self.fork_by_id
            and not self.is_privileged(pull.author_id, pull.created_at)
        )

    def resolve_sha(self, ref: str) -> Optional[str]:
        """Full source-history sha that ``ref`` (7 to 40 hex chars) is a prefix of."""
        return resolve_prefix(self.sorted_history, ref)


def _integrated_own_work(
    dataset: EventDataset,
    source_commits: Sequence[CommitRecord],
    sorted_history: Sequence[str],
) -> FrozenSet[str]:
    """
    Source shas that land one of their author's own pull requests.

    A squash, rebase or cherry-pick rewrites the sha, so such commits are
    recognised by a closing phrase naming the author's pull request, or by a
    merge comment on the author's closed pull request that cites the sha.
    """
    author_of = {pull.pr_id: pull.author_id for pull in dataset.pulls}
    integrated: Set[str] = set()
    for commit in source_commits:
        if any(author_of.get(number) == commit.author_id for number in closed_references([commit.message])):
            integrated.add(commit.sha)

    cited_by: Dict[str, Set[str]] = {}
    for pull in dataset.pulls:
        if pull.is_closed:
            for sha in merge_comment_shas(pull.last_comments, sorted_history):
                cited_by.setdefault(sha, set()).add(pull.author_id)
    for commit in source_commits:
        if commit.author_id in cited_by.get(commit.sha, ()):
            integrated.add(commit.sha)
    return frozenset(integrated)


def _first_privileged_acts(
    dataset: EventDataset,
    source_commits: Sequence[CommitRecord],
    not_direct: FrozenSet[str],
) -> Dict[str, datetime]:
    since: Dict[str, datetime] = {}

    def record(user_id: str, at: datetime) -> None:
        if user_id not in since or at < since[user_id]:
            since[user_id] = at

    # a direct push is a source commit that no pull request brought in
    for commit in source_commits:
        if commit.sha not in not_direct:
            record(commit.author_id, commit.committed_at)
    for action in dataset.privileged_actions:
        if action.repo_id == dataset.source_repo_id:
            record(action.user_id, action.occurred_at)
    return since


@lru_cache(maxsize=16)
def dataset_index(dataset: EventDataset) -> DatasetIndex:
    """Build (or fetch the cached) index of a dataset."""
    network = fork_network(dataset)
    commits_by_repo: Dict[str, list] = {}
    for commit in dataset.commits:
        commits_by_repo.setdefault(commit.repo_id, []).append(commit)
    source_commits = tuple(commits_by_repo.get(dataset.source_repo_id, ()))
    history = frozenset(c.sha for c in source_commits)
    sorted_history = tuple(sorted(history))
    pr_carried = frozenset(sha for pull in dataset.pulls for sha in pull.commit_shas)
    integrated = _integrated_own_work(dataset, source_commits, sorted_history)

    index = DatasetIndex(
        source_repo_id=dataset.source_repo_id,
        network=network,
        fork_by_id={fork.repo_id: fork for fork in network},
        commits_by_repo={repo: tuple(commits) for repo, commits in commits_by_repo.items()},
        source_history=history,
        sorted_history=sorted_history,
        pr_carried_shas=pr_carried,
        pulls_by_number={pull.pr_id: pull for pull in dataset.pulls},
        privileged_since=_first_privileged_acts(dataset, source_commits, pr_carried | integrated),
    )
    logger.debug(
        f"Indexed {dataset.project_id}: {len(history)} source commits, "
        f"{len(integrated)} integrated from pull requests, {len(index.privileged_since)} privileged users"
    )
    return index
