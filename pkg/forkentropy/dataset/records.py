"""
Normalized event records of one project's fork network.

Records are immutable; ids are normalized to strings (pull request numbers stay
integers) and every timestamp is a timezone-aware UTC datetime.
"""
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from typing import Any, Dict, Optional, Tuple


def parse_timestamp(value: Any) -> datetime:
    """
    Parse an RFC 3339 timestamp into an aware UTC datetime.

    Raises:
        ValueError: If the value is not a string with an explicit offset
    """
    if not isinstance(value, str):
        raise ValueError(f"timestamp must be a string, got {type(value).__name__}")
    text = value.strip()
    if text.endswith(("Z", "z")):
        text = text[:-1] + "+00:00"
    parsed = datetime.fromisoformat(text)
    if parsed.tzinfo is None:
        raise ValueError(f"timestamp {value!r} has no UTC offset")
    return parsed.astimezone(timezone.utc)


def format_timestamp(value: datetime) -> str:
    """Render a UTC datetime as RFC 3339 with a trailing ``Z``."""
    value = value.astimezone(timezone.utc)
    if value.microsecond:
        return value.strftime("%Y-%m-%dT%H:%M:%S.%fZ")
    return value.strftime("%Y-%m-%dT%H:%M:%SZ")


def _optional_timestamp(value: Optional[datetime]) -> Optional[str]:
    return format_timestamp(value) if value is not None else None


@dataclass(frozen=True)
class FileChange:
    path: str
    additions: int
    deletions: int

    @property
    def changed_lines(self) -> int:
        return self.additions + self.deletions

    def to_record(self) -> Dict[str, Any]:
        return {"path": self.path, "additions": self.additions, "deletions": self.deletions}


@dataclass(frozen=True)
class ProjectRecord:
    """The source repository of the project (``project.json``)."""

    source_repo_id: str
    full_name: str
    created_at: datetime
    description: Optional[str] = None

    def to_record(self) -> Dict[str, Any]:
        record: Dict[str, Any] = {
            "source_repo_id": self.source_repo_id,
            "full_name": self.full_name,
            "created_at": format_timestamp(self.created_at),
        }
        if self.description is not None:
            record["description"] = self.description
        return record


@dataclass(frozen=True)
class ForkRecord:
    repo_id: str
    full_name: str
    owner_id: str
    parent_repo_id: Optional[str]
    created_at: datetime

    @property
    def sort_key(self) -> Tuple[datetime, str]:
        return (self.created_at, self.repo_id)

    def to_record(self) -> Dict[str, Any]:
        return {
            "repo_id": self.repo_id,
            "full_name": self.full_name,
            "owner_id": self.owner_id,
            "parent_repo_id": self.parent_repo_id,
            "created_at": format_timestamp(self.created_at),
        }


@dataclass(frozen=True)
class CommitRecord:
    sha: str
    repo_id: str
    author_id: str
    committed_at: datetime
    parent_count: int
    files: Tuple[FileChange, ...]
    message: str = ""

    @property
    def is_merge(self) -> bool:
        return self.parent_count > 1

    @property
    def changed_lines(self) -> int:
        return sum(f.changed_lines for f in self.files)

    def to_record(self) -> Dict[str, Any]:
        return {
            "sha": self.sha,
            "repo_id": self.repo_id,
            "author_id": self.author_id,
            "committed_at": format_timestamp(self.committed_at),
            "parent_count": self.parent_count,
            "files": [f.to_record() for f in self.files],
            "message": self.message,
        }


@dataclass(frozen=True)
class PullRequestRecord:
    pr_id: int
    source_repo_id: str
    target_repo_id: str
    author_id: str
    created_at: datetime
    closed_at: Optional[datetime]
    merged_action: bool
    commit_shas: Tuple[str, ...]
    files: Tuple[FileChange, ...]
    last_comments: Tuple[str, ...] = ()

    @property
    def is_closed(self) -> bool:
        return self.closed_at is not None

    def to_record(self) -> Dict[str, Any]:
        return {
            "pr_id": self.pr_id,
            "source_repo_id": self.source_repo_id,
            "target_repo_id": self.target_repo_id,
            "author_id": self.author_id,
            "created_at": format_timestamp(self.created_at),
            "closed_at": _optional_timestamp(self.closed_at),
            "merged_action": self.merged_action,
            "commit_shas": list(self.commit_shas),
            "files": [f.to_record() for f in self.files],
            "last_comments": list(self.last_comments),
        }


@dataclass(frozen=True)
class IssueRecord:
    issue_id: str
    title: str
    labels: Tuple[str, ...]
    created_at: datetime
    author_id: str

    def to_record(self) -> Dict[str, Any]:
        return {
            "issue_id": self.issue_id,
            "title": self.title,
            "labels": list(self.labels),
            "created_at": format_timestamp(self.created_at),
            "author_id": self.author_id,
        }


class ActionKind(str, Enum):
    DIRECT_COMMIT = "direct_commit"
    CLOSE_ISSUE_OF_OTHER = "close_issue_of_other"
    CLOSE_PR_OF_OTHER = "close_pr_of_other"
    MERGE_PR = "merge_pr"


@dataclass(frozen=True)
class PrivilegedActionRecord:
    user_id: str
    repo_id: str
    action_kind: ActionKind
    occurred_at: datetime

    def to_record(self) -> Dict[str, Any]:
        return {
            "user_id": self.user_id,
            "repo_id": self.repo_id,
            "action_kind": self.action_kind.value,
            "occurred_at": format_timestamp(self.occurred_at),
        }


@dataclass(frozen=True)
class StarRecord:
    starred_at: datetime
    user_id: Optional[str] = None

    def to_record(self) -> Dict[str, Any]:
        record: Dict[str, Any] = {"starred_at": format_timestamp(self.starred_at)}
        if self.user_id is not None:
            record["user_id"] = self.user_id
        return record


@dataclass(frozen=True, eq=False)
class EventDataset:
    """
    A validated project dataset.

    Record tuples are held in canonical order (see ``loader.canonical_order``)
    so that everything derived from a dataset is independent of the order of
    lines in its files. Instances hash by identity; use ``record_sets`` to
    compare contents.
    """

    project: ProjectRecord
    forks: Tuple[ForkRecord, ...] = ()
    commits: Tuple[CommitRecord, ...] = ()
    pulls: Tuple[PullRequestRecord, ...] = ()
    issues: Tuple[IssueRecord, ...] = ()
    privileged_actions: Tuple[PrivilegedActionRecord, ...] = ()
    stars: Tuple[StarRecord, ...] = ()
    source_fork: Optional[ForkRecord] = field(default=None)

    @property
    def source_repo_id(self) -> str:
        return self.project.source_repo_id

    @property
    def project_id(self) -> str:
        return self.project.full_name

    def record_sets(self) -> Dict[str, Any]:
        """Contents as comparable sets keyed by file name."""
        return {
            "project": self.project,
            "source_fork": self.source_fork,
            "forks": frozenset(self.forks),
            "commits": frozenset(self.commits),
            "pulls": frozenset(self.pulls),
            "issues": frozenset(self.issues),
            "privileged_actions": frozenset(self.privileged_actions),
            "stars": tuple(sorted(self.stars, key=lambda s: (s.starred_at, s.user_id or ""))),
        }
