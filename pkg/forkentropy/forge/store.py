"""
Dataset-directory writers used by the fetcher: idempotent NDJSON sinks and the
atomic cursor file.
"""
import json
import os
import threading
from pathlib import Path
from typing import Any, Callable, Dict, Hashable, Optional

from forkentropy.errors import IoFailure, MalformedRecord
from forkentropy.logging_config import get_logger
from forkentropy.population.cache import check_schema_version

logger = get_logger(__name__)

CURSOR_FILE = "cursors.json"
CURSOR_SCHEMA_VERSION = "1.0"

RECORD_KEYS: Dict[str, Callable[[Dict[str, Any]], Hashable]] = {
    "forks.ndjson": lambda r: r["repo_id"],
    "commits.ndjson": lambda r: (r["sha"], r["repo_id"]),
    "pulls.ndjson": lambda r: r["pr_id"],
    "issues.ndjson": lambda r: r["issue_id"],
    "privileged_actions.ndjson": lambda r: (r["user_id"], r["repo_id"], r["action_kind"], r["occurred_at"]),
    "stars.ndjson": lambda r: (r["starred_at"], r.get("user_id")),
}


class NdjsonSink:
    """
    Append-only writer for one dataset file.

    Records whose key is already present (from this run or an earlier one)
    are skipped, so repeated fetches leave the file unchanged. All writes go
    through one lock.
    """

    def __init__(self, path: Path, key: Callable[[Dict[str, Any]], Hashable]):
        self.path = path
        self.key = key
        self._lock = threading.Lock()
        self._seen = set()
        self.written = 0
        if path.exists():
            with open(path, "r", encoding="utf-8") as f:
                for line_no, line in enumerate(f, start=1):
                    if not line.strip():
                        continue
                    try:
                        self._seen.add(self.key(json.loads(line)))
                    except (json.JSONDecodeError, KeyError, TypeError) as e:
                        raise MalformedRecord(path.name, line_no, f"cannot resume over corrupt line: {e}")

    def __contains__(self, key: Hashable) -> bool:
        return key in self._seen

    def append(self, record: Dict[str, Any]) -> bool:
        """Write the record unless its key is already present; True if written."""
        key = self.key(record)
        with self._lock:
            if key in self._seen:
                return False
            try:
                with open(self.path, "a", encoding="utf-8", newline="\n") as f:
                    f.write(json.dumps(record, sort_keys=True, ensure_ascii=False) + "\n")
            except OSError as e:
                raise IoFailure(self.path, str(e))
            self._seen.add(key)
            self.written += 1
            return True


class CursorStore:
    """
    Per-resource fetch progress in ``cursors.json``.

    Each entry holds ``next_url`` (the page to resume from), ``done`` and
    ``newest`` (latest record timestamp written for the resource).
    """

    def __init__(self, directory: Path):
        self.path = directory / CURSOR_FILE
        self._lock = threading.Lock()
        self.entries: Dict[str, Dict[str, Any]] = {}
        if self.path.exists():
            self.entries = load_cursors(self.path)

    def get(self, key: str) -> Dict[str, Any]:
        return dict(self.entries.get(key, {}))

    def update(self, key: str, **values: Any) -> None:
        with self._lock:
            entry = self.entries.setdefault(key, {})
            newest = values.pop("newest", None)
            if newest is not None and (entry.get("newest") is None or newest > entry["newest"]):
                entry["newest"] = newest
            entry.update(values)
            self._save()

    def _save(self) -> None:
        tmp_path = self.path.with_name(self.path.name + ".tmp")
        payload = {"schema_version": CURSOR_SCHEMA_VERSION, "resources": self.entries}
        try:
            with open(tmp_path, "w", encoding="utf-8", newline="\n") as f:
                f.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")
            os.replace(tmp_path, self.path)
        except OSError as e:
            logger.error(f"Error saving cursors: {e}", exc_info=True)
            raise IoFailure(self.path, str(e))


def load_cursors(path: Path) -> Dict[str, Dict[str, Any]]:
    """
    Read the cursor file.

    Raises:
        MalformedRecord: If it is not valid JSON
        SchemaVersionMismatch: If it was written by an incompatible version
    """
    try:
        with open(path, "r", encoding="utf-8") as f:
            payload = json.load(f)
    except json.JSONDecodeError as e:
        raise MalformedRecord(path.name, e.lineno, f"invalid JSON: {e.msg}")
    except OSError as e:
        raise IoFailure(path, str(e))
    check_schema_version(payload.get("schema_version"), CURSOR_SCHEMA_VERSION, str(path))
    resources: Optional[Dict[str, Any]] = payload.get("resources")
    return dict(resources or {})
