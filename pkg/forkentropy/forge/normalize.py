"""
Mapping of forge REST payloads onto dataset records.

Every accessor raises ``UpstreamSchemaChange`` naming the missing field so a
changed API surfaces as a fetch error rather than a corrupt dataset.
"""
from typing import Any, Dict, List, Optional

from forkentropy.dataset.records import ActionKind, format_timestamp, parse_timestamp
from forkentropy.errors import UpstreamSchemaChange


def field(payload: Any, path: str, url: str = "", optional: bool = False) -> Any:
    """
    Follow a dotted path through nested objects.

    Raises:
        UpstreamSchemaChange: If a non-optional step is missing
    """
    value = payload
    for part in path.split("."):
        if not isinstance(value, dict) or part not in value:
            if optional:
                return None
            raise UpstreamSchemaChange(path, url)
        value = value[part]
        if value is None:
            if optional:
                return None
            raise UpstreamSchemaChange(path, url)
    return value


def timestamp(payload: Any, path: str, url: str = "", optional: bool = False) -> Optional[str]:
    raw = field(payload, path, url, optional)
    if raw is None:
        return None
    try:
        return format_timestamp(parse_timestamp(raw))
    except ValueError:
        raise UpstreamSchemaChange(path, url)


def project_record(repo: Dict[str, Any], url: str = "") -> Dict[str, Any]:
    record = {
        "source_repo_id": str(field(repo, "id", url)),
        "full_name": field(repo, "full_name", url),
        "created_at": timestamp(repo, "created_at", url),
    }
    description = field(repo, "description", url, optional=True)
    if description:
        record["description"] = description
    return record


def fork_record(repo: Dict[str, Any], parent_repo_id: str, url: str = "") -> Dict[str, Any]:
    return {
        "repo_id": str(field(repo, "id", url)),
        "full_name": field(repo, "full_name", url),
        "owner_id": field(repo, "owner.login", url),
        "parent_repo_id": parent_repo_id,
        "created_at": timestamp(repo, "created_at", url),
    }


def user_of_commit(commit: Dict[str, Any], url: str = "") -> str:
    """Linked account login, else the git author email."""
    login = field(commit, "author.login", url, optional=True)
    if login:
        return login
    return field(commit, "commit.author.email", url)


def file_changes(files: List[Dict[str, Any]], url: str = "") -> List[Dict[str, Any]]:
    return [
        {
            "path": field(f, "filename", url),
            "additions": int(field(f, "additions", url)),
            "deletions": int(field(f, "deletions", url)),
        }
        for f in files
    ]


def commit_record(detail: Dict[str, Any], repo_id: str, url: str = "") -> Dict[str, Any]:
    """Commit detail payload (``/commits/{sha}``) as a commit record."""
    return {
        "sha": field(detail, "sha", url).lower(),
        "repo_id": repo_id,
        "author_id": user_of_commit(detail, url),
        "committed_at": timestamp(detail, "commit.committer.date", url),
        "parent_count": len(field(detail, "parents", url)),
        "files": file_changes(field(detail, "files", url, optional=True) or [], url),
        "message": field(detail, "commit.message", url, optional=True) or "",
    }


def pull_record(
    pull: Dict[str, Any],
    commit_shas: List[str],
    files: List[Dict[str, Any]],
    comments: List[Dict[str, Any]],
    url: str = "",
) -> Dict[str, Any]:
    """Pull request payload plus its commits, files and comments as a pull record."""
    ordered = sorted(comments, key=lambda c: (field(c, "created_at", url), field(c, "id", url)))
    return {
        "pr_id": int(field(pull, "number", url)),
        "source_repo_id": str(field(pull, "head.repo.id", url)),
        "target_repo_id": str(field(pull, "base.repo.id", url)),
        "author_id": field(pull, "user.login", url),
        "created_at": timestamp(pull, "created_at", url),
        "closed_at": timestamp(pull, "closed_at", url, optional=True),
        "merged_action": field(pull, "merged_at", url, optional=True) is not None,
        "commit_shas": [sha.lower() for sha in commit_shas],
        "files": file_changes(files, url),
        "last_comments": [field(c, "body", url, optional=True) or "" for c in ordered[-3:]],
    }


def issue_record(issue: Dict[str, Any], url: str = "") -> Dict[str, Any]:
    return {
        "issue_id": str(field(issue, "number", url)),
        "title": field(issue, "title", url),
        "labels": [field(label, "name", url) for label in field(issue, "labels", url, optional=True) or []],
        "created_at": timestamp(issue, "created_at", url),
        "author_id": field(issue, "user.login", url),
    }


def action_record(event: Dict[str, Any], source_repo_id: str, url: str = "") -> Optional[Dict[str, Any]]:
    """
    Privileged action implied by an issue event, or None.

    ``closed`` by someone other than the author is a close of another user's
    issue or pull request; ``merged`` is a merge.
    """
    kind = field(event, "event", url)
    actor = field(event, "actor.login", url, optional=True)
    if actor is None:
        return None
    if kind == "merged":
        action = ActionKind.MERGE_PR
    elif kind == "closed":
        author = field(event, "issue.user.login", url, optional=True)
        if author is None or author == actor:
            return None
        is_pull = field(event, "issue.pull_request", url, optional=True) is not None
        action = ActionKind.CLOSE_PR_OF_OTHER if is_pull else ActionKind.CLOSE_ISSUE_OF_OTHER
    else:
        return None
    return {
        "user_id": actor,
        "repo_id": source_repo_id,
        "action_kind": action.value,
        "occurred_at": timestamp(event, "created_at", url),
    }


def star_record(star: Dict[str, Any], url: str = "") -> Dict[str, Any]:
    record = {"starred_at": timestamp(star, "starred_at", url)}
    login = field(star, "user.login", url, optional=True)
    if login:
        record["user_id"] = login
    return record
