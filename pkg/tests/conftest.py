"""
Shared fixtures: the mini-project dataset and a replaying forge session.
"""
import json
import shutil
from pathlib import Path
from typing import Any, Dict, List, Optional
from urllib.parse import parse_qsl, urlencode, urlsplit

import pytest
import requests
from requests.structures import CaseInsensitiveDict

from forkentropy.dataset.index import dataset_index
from forkentropy.dataset.loader import load_dataset
from forkentropy.metrics.merge import merge_verdicts

FIXTURES = Path(__file__).parent / "fixtures"
MINI_PROJECT = FIXTURES / "mini-project"
TWO_FORK_REPO = FIXTURES / "forge" / "two-fork-repo" / "responses.json"
API_BASE = "https://api.test"


@pytest.fixture(autouse=True)
def _clear_dataset_caches():
    yield
    dataset_index.cache_clear()
    merge_verdicts.cache_clear()


@pytest.fixture
def mini_dir(tmp_path: Path) -> Path:
    """A writable copy of the mini-project dataset."""
    target = tmp_path / "mini-project"
    shutil.copytree(MINI_PROJECT, target, ignore=shutil.ignore_patterns("expected"))
    return target


@pytest.fixture
def mini_dataset():
    return load_dataset(MINI_PROJECT)


def request_key(url: str) -> str:
    """Path plus sorted query string; the lookup key of recorded responses."""
    parts = urlsplit(url)
    if not parts.query:
        return parts.path
    return parts.path + "?" + urlencode(sorted(parse_qsl(parts.query)))


class ReplaySession(requests.Session):
    """
    A session answering GETs from a recorded ``{key: {status, headers, body}}`` map.

    Unknown keys answer 404. Every requested key is appended to ``calls``.
    """

    def __init__(self, responses: Dict[str, Dict[str, Any]], base_url: str = API_BASE):
        super().__init__()
        self.responses = responses
        self.base_url = base_url
        self.calls: List[str] = []

    def get(self, url, params=None, headers=None, timeout=None, **kwargs):  # type: ignore[override]
        full_url = requests.Request("GET", url, params=params).prepare().url
        key = request_key(full_url)
        self.calls.append(key)
        recorded: Optional[Dict[str, Any]] = self.responses.get(key)

        response = requests.Response()
        response.url = full_url
        response.encoding = "utf-8"
        if recorded is None:
            response.status_code = 404
            response.headers = CaseInsensitiveDict({"Content-Type": "application/json"})
            response._content = json.dumps({"message": "Not Found"}).encode("utf-8")
            return response
        response.status_code = recorded.get("status", 200)
        response.headers = CaseInsensitiveDict({"Content-Type": "application/json", **recorded.get("headers", {})})
        response._content = json.dumps(recorded.get("body")).encode("utf-8")
        return response


def load_responses(path: Path = TWO_FORK_REPO) -> Dict[str, Dict[str, Any]]:
    with open(path, "r", encoding="utf-8") as f:
        return json.load(f)


@pytest.fixture
def two_fork_responses() -> Dict[str, Dict[str, Any]]:
    return load_responses()


def write_matrix_file(path: Path, rows: List[Dict[str, Any]], snapshot_ref: str = "") -> Path:
    with open(path, "w", encoding="utf-8") as f:
        if snapshot_ref:
            f.write(json.dumps({"snapshot_ref": snapshot_ref}) + "\n")
        for row in rows:
            f.write(json.dumps(row) + "\n")
    return path
