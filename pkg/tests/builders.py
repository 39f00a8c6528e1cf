"""
Small constructors for in-memory dataset records used across the tests.
"""
import hashlib
from datetime import datetime
from typing import Iterable, Optional, Sequence, Tuple

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
    parse_timestamp,
)

SOURCE = "src"

FileSpec = Tuple[str, int, int]


def ts(text: str) -> datetime:
    if "T" not in text:
        text += "T00:00:00Z"
    return parse_timestamp(text)


def sha_of(label: str) -> str:
    return hashlib.sha1(label.encode("utf-8")).hexdigest()


def files(*specs: FileSpec) -> Tuple[FileChange, ...]:
    return tuple(FileChange(path, additions, deletions) for path, additions, deletions in specs)


def project(created: str = "2023-01-01", full_name: str = "acme/tool", description: Optional[str] = None):
    return ProjectRecord(SOURCE, full_name, ts(created), description)


def fork(repo_id: str, parent: str = SOURCE, created: str = "2023-01-02", owner: Optional[str] = None) -> ForkRecord:
    return ForkRecord(repo_id, f"{owner or repo_id}/tool", owner or f"owner-{repo_id}", parent, ts(created))


def commit(label: str, repo_id: str, at: str, *specs: FileSpec, author: str = "dev", parents: int = 1,
           message: str = "") -> CommitRecord:
    return CommitRecord(sha_of(label), repo_id, author, ts(at), parents, files(*specs), message)


def pull(pr_id: int, source_repo_id: str, created: str, closed: Optional[str] = None, merged: bool = False,
         shas: Sequence[str] = (), specs: Sequence[FileSpec] = (), comments: Sequence[str] = (),
         author: str = "contrib", target: str = SOURCE) -> PullRequestRecord:
    return PullRequestRecord(
        pr_id=pr_id,
        source_repo_id=source_repo_id,
        target_repo_id=target,
        author_id=author,
        created_at=ts(created),
        closed_at=ts(closed) if closed else None,
        merged_action=merged,
        commit_shas=tuple(shas),
        files=files(*specs),
        last_comments=tuple(comments),
    )


def issue(issue_id: str, title: str, created: str = "2023-01-05", labels: Sequence[str] = (),
          author: str = "reporter") -> IssueRecord:
    return IssueRecord(issue_id, title, tuple(labels), ts(created), author)


def action(user_id: str, kind: ActionKind, at: str) -> PrivilegedActionRecord:
    return PrivilegedActionRecord(user_id, SOURCE, kind, ts(at))


def star(at: str, user_id: Optional[str] = None) -> StarRecord:
    return StarRecord(ts(at), user_id)


def dataset(
    forks: Iterable[ForkRecord] = (),
    commits: Iterable[CommitRecord] = (),
    pulls: Iterable[PullRequestRecord] = (),
    issues: Iterable[IssueRecord] = (),
    actions: Iterable[PrivilegedActionRecord] = (),
    stars: Iterable[StarRecord] = (),
    proj: Optional[ProjectRecord] = None,
) -> EventDataset:
    return EventDataset(
        project=proj or project(),
        forks=tuple(sorted(forks, key=lambda f: f.sort_key)),
        commits=tuple(sorted(commits, key=lambda c: (c.committed_at, c.sha, c.repo_id))),
        pulls=tuple(sorted(pulls, key=lambda p: p.pr_id)),
        issues=tuple(issues),
        privileged_actions=tuple(actions),
        stars=tuple(stars),
    )
