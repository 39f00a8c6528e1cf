"""
Streaming NDJSON loader and serializer for project datasets.

Directory layout (UTF-8, one JSON object per line):

    project.json                 {source_repo_id, full_name, created_at[, description]}
    forks.ndjson                 fork records
    commits.ndjson               commit records with per-file diff stats
    pulls.ndjson                 pull request records
    issues.ndjson                issue records
    privileged_actions.ndjson    privileged actions on the source repository
    stars.ndjson                 {starred_at[, user_id]}

Unknown keys are ignored; a missing NDJSON file reads as empty.
"""
import json
from pathlib import Path
from typing import Any, Callable, Dict, Iterator, List, Optional, Tuple, TypeVar, Union

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
from forkentropy.errors import DanglingReference, DatasetNotFound, DuplicateKey, IoFailure, MalformedRecord
from forkentropy.logging_config import get_logger

logger = get_logger(__name__)

PROJECT_FILE = "project.json"
FORKS_FILE = "forks.ndjson"
COMMITS_FILE = "commits.ndjson"
PULLS_FILE = "pulls.ndjson"
ISSUES_FILE = "issues.ndjson"
ACTIONS_FILE = "privileged_actions.ndjson"
STARS_FILE = "stars.ndjson"

DATASET_FILES = (PROJECT_FILE, FORKS_FILE, COMMITS_FILE, PULLS_FILE, ISSUES_FILE, ACTIONS_FILE, STARS_FILE)

T = TypeVar("T")


class _Fields:
    """Typed accessors over one raw JSON object that raise MalformedRecord."""

    def __init__(self, raw: Any, file: str, line: int):
        if not isinstance(raw, dict):
            raise MalformedRecord(file, line, "record must be a JSON object")
        self.raw = raw
        self.file = file
        self.line = line

    def fail(self, reason: str) -> MalformedRecord:
        return MalformedRecord(self.file, self.line, reason)

    def present(self, key: str) -> bool:
        return self.raw.get(key) is not None

    def required(self, key: str) -> Any:
        if key not in self.raw or self.raw[key] is None:
            raise self.fail(f"missing required key '{key}'")
        return self.raw[key]

    def ident(self, key: str) -> str:
        value = self.required(key)
        if isinstance(value, bool) or not isinstance(value, (str, int)):
            raise self.fail(f"'{key}' must be a string or integer id")
        text = str(value)
        if not text:
            raise self.fail(f"'{key}' must not be empty")
        return text

    def optional_ident(self, key: str) -> Optional[str]:
        return self.ident(key) if self.present(key) else None

    def text(self, key: str, default: Optional[str] = None) -> str:
        if default is not None and not self.present(key):
            return default
        value = self.required(key)
        if not isinstance(value, str):
            raise self.fail(f"'{key}' must be a string")
        return value

    def count(self, key: str) -> int:
        value = self.required(key)
        if isinstance(value, bool) or not isinstance(value, int) or value < 0:
            raise self.fail(f"'{key}' must be a non-negative integer")
        return value

    def flag(self, key: str, default: bool = False) -> bool:
        if not self.present(key):
            return default
        value = self.raw[key]
        if not isinstance(value, bool):
            raise self.fail(f"'{key}' must be a boolean")
        return value

    def timestamp(self, key: str):
        value = self.required(key)
        try:
            return parse_timestamp(value)
        except ValueError as e:
            raise self.fail(f"'{key}' is not an RFC 3339 UTC timestamp: {e}")

    def optional_timestamp(self, key: str):
        return self.timestamp(key) if self.present(key) else None

    def strings(self, key: str) -> Tuple[str, ...]:
        if not self.present(key):
            return ()
        value = self.raw[key]
        if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
            raise self.fail(f"'{key}' must be an array of strings")
        return tuple(value)

    def files(self, key: str = "files") -> Tuple[FileChange, ...]:
        if not self.present(key):
            return ()
        value = self.raw[key]
        if not isinstance(value, list):
            raise self.fail(f"'{key}' must be an array")
        changes = []
        for entry in value:
            entry_fields = _Fields(entry, self.file, self.line)
            changes.append(FileChange(
                path=entry_fields.text("path"),
                additions=entry_fields.count("additions"),
                deletions=entry_fields.count("deletions"),
            ))
        return tuple(changes)


# -------------------------
# Per-file record parsers
# -------------------------

def parse_project(f: _Fields) -> ProjectRecord:
    description = f.raw.get("description")
    if description is not None and not isinstance(description, str):
        raise f.fail("'description' must be a string")
    return ProjectRecord(
        source_repo_id=f.ident("source_repo_id"),
        full_name=f.text("full_name"),
        created_at=f.timestamp("created_at"),
        description=description,
    )


def parse_fork(f: _Fields, source_repo_id: Optional[str] = None) -> ForkRecord:
    repo_id = f.ident("repo_id")
    parent_repo_id = f.optional_ident("parent_repo_id")
    if parent_repo_id is None and repo_id != source_repo_id:
        raise f.fail(f"fork {repo_id} has no parent_repo_id")
    return ForkRecord(
        repo_id=repo_id,
        full_name=f.text("full_name"),
        owner_id=f.ident("owner_id"),
        parent_repo_id=parent_repo_id,
        created_at=f.timestamp("created_at"),
    )


def parse_commit(f: _Fields) -> CommitRecord:
    sha = f.text("sha").lower()
    if len(sha) != 40 or any(c not in "0123456789abcdef" for c in sha):
        raise f.fail("'sha' must be 40 hex characters")
    return CommitRecord(
        sha=sha,
        repo_id=f.ident("repo_id"),
        author_id=f.ident("author_id"),
        committed_at=f.timestamp("committed_at"),
        parent_count=f.count("parent_count"),
        files=f.files(),
        message=f.text("message", default=""),
    )


def parse_pull(f: _Fields) -> PullRequestRecord:
    raw_id = f.required("pr_id")
    if isinstance(raw_id, bool):
        raise f.fail("'pr_id' must be a pull request number")
    try:
        pr_id = int(raw_id)
    except (TypeError, ValueError):
        raise f.fail("'pr_id' must be a pull request number")
    created_at = f.timestamp("created_at")
    closed_at = f.optional_timestamp("closed_at")
    merged_action = f.flag("merged_action")
    if closed_at is not None and closed_at < created_at:
        raise f.fail("'closed_at' precedes 'created_at'")
    if merged_action and closed_at is None:
        raise f.fail("'merged_action' requires 'closed_at'")
    return PullRequestRecord(
        pr_id=pr_id,
        source_repo_id=f.ident("source_repo_id"),
        target_repo_id=f.ident("target_repo_id"),
        author_id=f.ident("author_id"),
        created_at=created_at,
        closed_at=closed_at,
        merged_action=merged_action,
        commit_shas=tuple(s.lower() for s in f.strings("commit_shas")),
        files=f.files(),
        last_comments=f.strings("last_comments")[-3:],
    )


def parse_issue(f: _Fields) -> IssueRecord:
    title = f.text("title")
    if not title.strip():
        raise f.fail("'title' must not be empty")
    return IssueRecord(
        issue_id=f.ident("issue_id"),
        title=title,
        labels=f.strings("labels"),
        created_at=f.timestamp("created_at"),
        author_id=f.ident("author_id"),
    )


def parse_action(f: _Fields) -> PrivilegedActionRecord:
    kind = f.text("action_kind")
    try:
        action_kind = ActionKind(kind)
    except ValueError:
        raise f.fail(f"unknown action_kind {kind!r}")
    return PrivilegedActionRecord(
        user_id=f.ident("user_id"),
        repo_id=f.ident("repo_id"),
        action_kind=action_kind,
        occurred_at=f.timestamp("occurred_at"),
    )


def parse_star(f: _Fields) -> StarRecord:
    return StarRecord(starred_at=f.timestamp("starred_at"), user_id=f.optional_ident("user_id"))


# -------------------------
# Streaming
# -------------------------

def iter_ndjson(path: Path) -> Iterator[Tuple[int, Any]]:
    """
    Yield ``(line_number, object)`` for each non-blank line.

    Raises:
        MalformedRecord: On a line that is not valid JSON
        IoFailure: If the file cannot be read
    """
    try:
        with open(path, "r", encoding="utf-8") as f:
            for line_no, line in enumerate(f, start=1):
                if not line.strip():
                    continue
                try:
                    yield line_no, json.loads(line)
                except json.JSONDecodeError as e:
                    raise MalformedRecord(path.name, line_no, f"invalid JSON: {e.msg}")
    except OSError as e:
        raise IoFailure(path, str(e))


def _read(directory: Path, name: str, parser: Callable[[_Fields], T]) -> List[T]:
    path = directory / name
    if not path.exists():
        logger.debug(f"{name} not present; treating as empty")
        return []
    records = [parser(_Fields(raw, name, line_no)) for line_no, raw in iter_ndjson(path)]
    logger.debug(f"Parsed {len(records)} records from {name}")
    return records


def _check_unique(records: List[T], key: Callable[[T], Any], kind: str) -> None:
    seen = set()
    for record in records:
        k = key(record)
        if k in seen:
            raise DuplicateKey(kind, k)
        seen.add(k)


def canonical_order(dataset_parts: Dict[str, List[Any]]) -> Dict[str, Tuple[Any, ...]]:
    """Sort every record list into the order the dataset stores it in."""
    return {
        "forks": tuple(sorted(dataset_parts["forks"], key=lambda r: r.sort_key)),
        "commits": tuple(sorted(dataset_parts["commits"], key=lambda r: (r.committed_at, r.sha, r.repo_id))),
        "pulls": tuple(sorted(dataset_parts["pulls"], key=lambda r: r.pr_id)),
        "issues": tuple(sorted(dataset_parts["issues"], key=lambda r: (r.created_at, r.issue_id))),
        "privileged_actions": tuple(sorted(
            dataset_parts["privileged_actions"],
            key=lambda r: (r.occurred_at, r.user_id, r.action_kind.value, r.repo_id),
        )),
        "stars": tuple(sorted(dataset_parts["stars"], key=lambda r: (r.starred_at, r.user_id or ""))),
    }


def load_dataset(path: Union[str, Path]) -> EventDataset:
    """
    Load and validate a dataset directory.

    Args:
        path: Directory holding the dataset files

    Returns:
        The validated EventDataset

    Raises:
        DatasetNotFound: If the directory or its project.json is missing
        MalformedRecord: On unparseable lines or missing required keys
        DuplicateKey: On a repeated record key
        DanglingReference: On references to unknown repositories
    """
    directory = Path(path)
    if not directory.is_dir():
        raise DatasetNotFound(directory)
    project_path = directory / PROJECT_FILE
    if not project_path.is_file():
        raise DatasetNotFound(project_path)

    logger.info(f"Loading dataset from {directory}")
    try:
        with open(project_path, "r", encoding="utf-8") as f:
            raw_project = json.load(f)
    except json.JSONDecodeError as e:
        raise MalformedRecord(PROJECT_FILE, e.lineno, f"invalid JSON: {e.msg}")
    except OSError as e:
        raise IoFailure(project_path, str(e))
    project = parse_project(_Fields(raw_project, PROJECT_FILE, 1))
    source_id = project.source_repo_id

    all_forks = _read(directory, FORKS_FILE, lambda f: parse_fork(f, source_id))
    commits = _read(directory, COMMITS_FILE, parse_commit)
    pulls = _read(directory, PULLS_FILE, parse_pull)
    issues = _read(directory, ISSUES_FILE, parse_issue)
    actions = _read(directory, ACTIONS_FILE, parse_action)
    stars = _read(directory, STARS_FILE, parse_star)

    _check_unique(all_forks, lambda r: r.repo_id, "fork")
    _check_unique(commits, lambda r: (r.sha, r.repo_id), "commit")
    _check_unique(pulls, lambda r: r.pr_id, "pull_request")
    _check_unique(issues, lambda r: r.issue_id, "issue")

    source_fork = next((r for r in all_forks if r.repo_id == source_id), None)
    forks = [r for r in all_forks if r.repo_id != source_id]

    known_repos = {source_id} | {r.repo_id for r in forks}
    for fork in forks:
        if fork.parent_repo_id not in known_repos:
            raise DanglingReference("repo", fork.parent_repo_id)
    for commit in commits:
        if commit.repo_id not in known_repos:
            raise DanglingReference("repo", commit.repo_id)
    for pull in pulls:
        for repo_id in (pull.source_repo_id, pull.target_repo_id):
            if repo_id not in known_repos:
                raise DanglingReference("repo", repo_id)
    for action in actions:
        if action.repo_id not in known_repos:
            raise DanglingReference("repo", action.repo_id)

    ordered = canonical_order({
        "forks": forks, "commits": commits, "pulls": pulls,
        "issues": issues, "privileged_actions": actions, "stars": stars,
    })
    dataset = EventDataset(project=project, source_fork=source_fork, **ordered)
    logger.info(
        f"Loaded {project.full_name}: {len(forks)} forks, {len(commits)} commits, "
        f"{len(pulls)} pull requests, {len(issues)} issues"
    )
    return dataset


def _write_ndjson(path: Path, records: List[Dict[str, Any]]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for record in records:
            f.write(json.dumps(record, sort_keys=True, ensure_ascii=False) + "\n")


def serialize_dataset(dataset: EventDataset, path: Union[str, Path]) -> Path:
    """
    Write a dataset in the canonical directory layout.

    Returns:
        The dataset directory

    Raises:
        IoFailure: If any file cannot be written
    """
    directory = Path(path)
    try:
        directory.mkdir(parents=True, exist_ok=True)
        with open(directory / PROJECT_FILE, "w", encoding="utf-8", newline="\n") as f:
            f.write(json.dumps(dataset.project.to_record(), sort_keys=True, indent=2) + "\n")
        forks = ([dataset.source_fork] if dataset.source_fork else []) + list(dataset.forks)
        _write_ndjson(directory / FORKS_FILE, [r.to_record() for r in forks])
        _write_ndjson(directory / COMMITS_FILE, [r.to_record() for r in dataset.commits])
        _write_ndjson(directory / PULLS_FILE, [r.to_record() for r in dataset.pulls])
        _write_ndjson(directory / ISSUES_FILE, [r.to_record() for r in dataset.issues])
        _write_ndjson(directory / ACTIONS_FILE, [r.to_record() for r in dataset.privileged_actions])
        _write_ndjson(directory / STARS_FILE, [r.to_record() for r in dataset.stars])
    except OSError as e:
        logger.error(f"Error writing dataset to {directory}: {e}", exc_info=True)
        raise IoFailure(directory, str(e))
    logger.info(f"Wrote dataset {dataset.project_id} to {directory}")
    return directory
