"""
Populate a dataset directory from a GitHub-style REST API.

The fetch is resumable: every paginated resource records its next page in
``cursors.json`` after each page, and records are appended idempotently by key.
"""
import json
from collections import deque
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, FrozenSet, List, Optional, Tuple, Union
from urllib.parse import urlparse

import requests

from forkentropy.config import ForgeConfig
from forkentropy.dataset.loader import PROJECT_FILE
from forkentropy.dataset.records import format_timestamp
from forkentropy.errors import ConfigError, IoFailure, PartialFetch
from forkentropy.forge import normalize
from forkentropy.forge.client import BudgetExhausted, ForgeClient
from forkentropy.forge.store import RECORD_KEYS, CursorStore, NdjsonSink
from forkentropy.logging_config import get_logger
from forkentropy.workers import WorkerPool

logger = get_logger(__name__)

RESOURCES = ("forks", "commits", "pulls", "issues", "events", "stars")
STAR_MEDIA_TYPE = "application/vnd.github.star+json"


@dataclass(frozen=True)
class FetchPlan:
    """What to fetch, from where."""

    api_base_url: str
    full_name: str
    resources: FrozenSet[str] = frozenset(RESOURCES)
    since: Optional[datetime] = None
    token: Optional[str] = field(default=None, repr=False)
    max_depth: Optional[int] = None
    max_requests: Optional[int] = None
    workers: int = ForgeConfig.DEFAULT_WORKERS

    def validate(self) -> "FetchPlan":
        """
        Raises:
            ConfigError: On a non-https base URL, empty or unknown resources,
                or a malformed repository name
        """
        if urlparse(self.api_base_url).scheme != "https":
            raise ConfigError(f"api_base_url must use https, got {self.api_base_url!r}", knob="api_base_url")
        if not self.resources:
            raise ConfigError("At least one resource must be fetched", knob="resources")
        unknown = set(self.resources) - set(RESOURCES)
        if unknown:
            raise ConfigError(f"Unknown resources: {sorted(unknown)}", knob="resources")
        owner, _, name = self.full_name.partition("/")
        if not owner or not name or "/" in name:
            raise ConfigError(f"Repository must be given as owner/name, got {self.full_name!r}", knob="repo")
        if self.max_depth is not None and self.max_depth < 1:
            raise ConfigError("max_depth must be positive", knob="max_depth")
        if self.max_requests is not None and self.max_requests < 1:
            raise ConfigError("max_requests must be positive", knob="max_requests")
        if self.workers < 1:
            raise ConfigError("workers must be positive", knob="workers")
        return self


@dataclass
class FetchReport:
    """Records written per dataset file during one fetch, plus request count."""

    written: Dict[str, int] = field(default_factory=dict)
    totals: Dict[str, int] = field(default_factory=dict)
    requests: int = 0
    skipped: List[str] = field(default_factory=list)

    @property
    def forks(self) -> int:
        return self.totals.get("forks.ndjson", 0)

    def to_dict(self) -> Dict[str, Any]:
        return {"written": self.written, "totals": self.totals, "requests": self.requests, "skipped": self.skipped}


@dataclass(frozen=True)
class _Repo:
    repo_id: str
    full_name: str
    created_at: str
    parent_repo_id: Optional[str]


class Fetcher:
    """One fetch run into one dataset directory."""

    def __init__(self, plan: FetchPlan, out: Union[str, Path], session: Optional[requests.Session] = None):
        self.plan = plan.validate()
        self.out = Path(out)
        try:
            self.out.mkdir(parents=True, exist_ok=True)
        except OSError as e:
            raise IoFailure(self.out, str(e))
        self.client = ForgeClient(
            plan.api_base_url, plan.token, ForgeConfig.get_timeout(), plan.max_requests, session,
        )
        self.sinks = {name: NdjsonSink(self.out / name, key) for name, key in RECORD_KEYS.items()}
        self.cursors = CursorStore(self.out)
        self.pool = WorkerPool(plan.workers)
        self.report = FetchReport()
        self.source: Optional[_Repo] = None

    # -------------------------
    # Pagination with cursors
    # -------------------------

    def _paged(self, key: str, path: str, params: Optional[Dict[str, Any]] = None,
               headers: Optional[Dict[str, str]] = None):
        """
        Yield items page by page, saving the resume point after each page.

        A resource already marked done yields nothing. The cursor moves to the
        next page only once the consumer has finished the current one; a
        cursor without ``next_url`` restarts from the first page.
        """
        cursor = self.cursors.get(key)
        if cursor.get("done"):
            logger.debug(f"Cursor {key} complete; skipping")
            return
        resume_url: Optional[str] = cursor.get("next_url")
        pending = resume_url or self.client.url(path)
        try:
            for _, items, next_url in self.client.pages(pending, None if resume_url else params, headers):
                yield items
                pending = next_url
                if next_url:
                    resume_url = next_url
                    self.cursors.update(key, next_url=next_url, done=False)
        except BudgetExhausted as e:
            self.cursors.update(key, next_url=resume_url, done=False)
            raise PartialFetch(key, pending, e.context.get("reason", ""))
        except Exception:
            self.cursors.update(key, next_url=resume_url, done=False)
            raise
        self.cursors.update(key, next_url=None, done=True)

    def _append(self, name: str, record: Dict[str, Any], cursor_key: str, stamp: Optional[str]) -> None:
        if self.sinks[name].append(record):
            self.report.written[name] = self.report.written.get(name, 0) + 1
        if stamp:
            self.cursors.update(cursor_key, newest=stamp)

    # -------------------------
    # Resources
    # -------------------------

    def fetch_project(self) -> _Repo:
        url = f"repos/{self.plan.full_name}"
        repo = self.client.get_json(url)
        record = normalize.project_record(repo, url)
        try:
            with open(self.out / PROJECT_FILE, "w", encoding="utf-8", newline="\n") as f:
                f.write(json.dumps(record, sort_keys=True, indent=2) + "\n")
        except OSError as e:
            raise IoFailure(self.out / PROJECT_FILE, str(e))
        logger.info(f"Fetched project {record['full_name']} (id {record['source_repo_id']})")
        return _Repo(record["source_repo_id"], record["full_name"], record["created_at"], None)

    def _stored_forks(self) -> Dict[str, List[_Repo]]:
        children: Dict[str, List[_Repo]] = {}
        path = self.out / "forks.ndjson"
        if path.exists():
            with open(path, "r", encoding="utf-8") as f:
                for line in f:
                    if line.strip():
                        r = json.loads(line)
                        children.setdefault(r["parent_repo_id"], []).append(
                            _Repo(r["repo_id"], r["full_name"], r["created_at"], r["parent_repo_id"]))
        return children

    def fetch_forks(self, source: _Repo) -> List[_Repo]:
        """Breadth-first discovery of forks and forks of forks, up to ``max_depth``."""
        if "forks" not in self.plan.resources:
            return []
        discovered: List[_Repo] = []
        seen = {source.repo_id}
        queue: deque = deque([(source, 0)])
        while queue:
            parent, depth = queue.popleft()
            if self.plan.max_depth is not None and depth >= self.plan.max_depth:
                continue
            key = f"forks:{parent.full_name}"
            path = f"repos/{parent.full_name}/forks"
            children: List[_Repo] = []
            for items in self._paged(key, path, {"sort": "oldest"}):
                for item in items:
                    record = normalize.fork_record(item, parent.repo_id, path)
                    self._append("forks.ndjson", record, key, record["created_at"])
                    children.append(_Repo(record["repo_id"], record["full_name"], record["created_at"], parent.repo_id))
            known = {c.repo_id for c in children}
            children.extend(c for c in self._stored_forks().get(parent.repo_id, []) if c.repo_id not in known)
            for child in sorted(children, key=lambda c: (c.created_at, c.repo_id)):
                if child.repo_id not in seen:
                    seen.add(child.repo_id)
                    discovered.append(child)
                    queue.append((child, depth + 1))
        logger.info(f"Discovered {len(discovered)} forks of {source.full_name}")
        return discovered

    def _stored_commit_dates(self) -> Dict[str, Dict[str, str]]:
        dates: Dict[str, Dict[str, str]] = {}
        path = self.out / "commits.ndjson"
        if path.exists():
            with open(path, "r", encoding="utf-8") as f:
                for line in f:
                    if line.strip():
                        r = json.loads(line)
                        dates.setdefault(r["repo_id"], {})[r["sha"]] = r["committed_at"]
        return dates

    def fetch_commits(self, repos: List[_Repo]) -> None:
        """
        Commits of every repository with per-file stats.

        A fork's listing includes history inherited from its ancestors; a sha
        an ancestor already had before the fork was created is not recorded
        for the fork.
        """
        if "commits" not in self.plan.resources:
            return
        history = self._stored_commit_dates()
        by_id = {repo.repo_id: repo for repo in repos}
        params: Dict[str, Any] = {}
        if self.plan.since:
            params["since"] = format_timestamp(self.plan.since)

        for repo in repos:
            ancestors = []
            parent_id = repo.parent_repo_id
            while parent_id is not None and parent_id in by_id:
                ancestors.append(history.get(parent_id, {}))
                parent_id = by_id[parent_id].parent_repo_id
            own = history.setdefault(repo.repo_id, {})
            key = f"commits:{repo.full_name}"

            for items in self._paged(key, f"repos/{repo.full_name}/commits", params):
                wanted: List[str] = []
                for item in items:
                    sha = normalize.field(item, "sha", key).lower()
                    date = normalize.timestamp(item, "commit.committer.date", key)
                    if any(sha in anc and anc[sha] <= repo.created_at for anc in ancestors):
                        continue
                    own[sha] = date  # type: ignore[assignment]
                    if (sha, repo.repo_id) not in self.sinks["commits.ndjson"]:
                        wanted.append(sha)
                details = self.pool.map(
                    lambda sha, name=repo.full_name: self.client.get_json(f"repos/{name}/commits/{sha}"), wanted,
                )
                for detail in details:
                    record = normalize.commit_record(detail, repo.repo_id, key)
                    self._append("commits.ndjson", record, key, record["committed_at"])
        logger.info(f"Commits fetched for {len(repos)} repositories")

    def _pull_details(self, pull: Dict[str, Any]) -> Dict[str, Any]:
        number = normalize.field(pull, "number")
        base = f"repos/{self.plan.full_name}"
        shas = [normalize.field(c, "sha") for _, items, _ in self.client.pages(f"{base}/pulls/{number}/commits")
                for c in items]
        files = [f for _, items, _ in self.client.pages(f"{base}/pulls/{number}/files") for f in items]
        comments = [c for _, items, _ in self.client.pages(f"{base}/issues/{number}/comments") for c in items]
        return normalize.pull_record(pull, shas, files, comments, f"{base}/pulls/{number}")

    def fetch_pulls(self, known_repo_ids: FrozenSet[str]) -> None:
        if "pulls" not in self.plan.resources:
            return
        key = "pulls"
        path = f"repos/{self.plan.full_name}/pulls"
        for items in self._paged(key, path, {"state": "all", "sort": "created", "direction": "asc"}):
            todo = []
            for pull in items:
                head_repo = normalize.field(pull, "head.repo.id", path, optional=True)
                number = normalize.field(pull, "number", path)
                if head_repo is None or str(head_repo) not in known_repo_ids:
                    logger.warning(f"Skipping PR #{number}: head repository outside the fork network")
                    self.report.skipped.append(f"pull:{number}")
                    continue
                if int(number) not in self.sinks["pulls.ndjson"]:
                    todo.append(pull)
            for record in self.pool.map(self._pull_details, todo):
                self._append("pulls.ndjson", record, key, record["created_at"])

    def fetch_issues(self) -> None:
        if "issues" not in self.plan.resources:
            return
        key = "issues"
        path = f"repos/{self.plan.full_name}/issues"
        params: Dict[str, Any] = {"state": "all", "sort": "created", "direction": "asc"}
        if self.plan.since:
            params["since"] = format_timestamp(self.plan.since)
        for items in self._paged(key, path, params):
            for issue in items:
                if "pull_request" in issue:
                    continue
                record = normalize.issue_record(issue, path)
                self._append("issues.ndjson", record, key, record["created_at"])

    def fetch_events(self, source: _Repo) -> None:
        if "events" not in self.plan.resources:
            return
        key = "events"
        path = f"repos/{self.plan.full_name}/issues/events"
        for items in self._paged(key, path):
            for event in items:
                record = normalize.action_record(event, source.repo_id, path)
                if record:
                    self._append("privileged_actions.ndjson", record, key, record["occurred_at"])

    def fetch_stars(self) -> None:
        if "stars" not in self.plan.resources:
            return
        key = "stars"
        path = f"repos/{self.plan.full_name}/stargazers"
        for items in self._paged(key, path, headers={"Accept": STAR_MEDIA_TYPE}):
            for star in items:
                record = normalize.star_record(star, path)
                self._append("stars.ndjson", record, key, record["starred_at"])

    def _totals(self) -> Dict[str, int]:
        totals = {}
        for name in RECORD_KEYS:
            path = self.out / name
            if not path.exists():
                path.touch()
            with open(path, "r", encoding="utf-8") as f:
                totals[name] = sum(1 for line in f if line.strip())
        return totals

    def run(self) -> FetchReport:
        try:
            source = self.fetch_project()
            forks = self.fetch_forks(source)
            repos = [source] + forks
            self.fetch_commits(repos)
            self.fetch_pulls(frozenset(r.repo_id for r in repos))
            self.fetch_issues()
            self.fetch_events(source)
            self.fetch_stars()
        finally:
            self.report.requests = self.client.request_count
            self.pool.close()
        self.report.totals = self._totals()
        logger.info(f"Fetch of {self.plan.full_name} complete: {self.report.requests} requests, "
                    f"{sum(self.report.written.values())} new records")
        return self.report


def fetch(plan: FetchPlan, out: Union[str, Path], session: Optional[requests.Session] = None) -> FetchReport:
    """
    Fetch a repository's fork network into a dataset directory.

    Args:
        plan: What to fetch
        out: Dataset directory (created if missing)
        session: Optional requests session, e.g. a replaying one in tests

    Returns:
        FetchReport with per-file counts

    Raises:
        RateLimited, AuthFailure, UpstreamSchemaChange, PartialFetch
    """
    return Fetcher(plan, out, session).run()
