"""
On-disk snapshot cache.

One NDJSON file per project: a header line carrying ``schema_version`` and the
dataset fingerprint, then one line per snapshot with its population and both
serialized matrix variants.
"""
import hashlib
import json
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Union

from packaging.version import InvalidVersion, Version

from forkentropy.dataset.loader import DATASET_FILES
from forkentropy.dataset.records import parse_timestamp
from forkentropy.entropy.vectors import FileModificationMatrix
from forkentropy.errors import IoFailure, MalformedRecord, SchemaVersionMismatch
from forkentropy.logging_config import get_logger
from forkentropy.population.snapshots import Snapshot

logger = get_logger(__name__)

CACHE_SCHEMA_VERSION = "1.0"


def check_schema_version(found: Any, expected: str = CACHE_SCHEMA_VERSION, path: str = "") -> Version:
    """
    Accept any version with the same major number as ``expected``.

    Raises:
        SchemaVersionMismatch: If the version is missing, unparseable or incompatible
    """
    try:
        version = Version(str(found))
    except InvalidVersion:
        raise SchemaVersionMismatch(None if found is None else str(found), expected, path)
    if version.major != Version(expected).major:
        raise SchemaVersionMismatch(str(found), expected, path)
    return version


def dataset_fingerprint(dataset_dir: Union[str, Path], knobs: Optional[Mapping[str, Any]] = None) -> str:
    """SHA-256 over the dataset files and the knobs that shape populations."""
    digest = hashlib.sha256()
    directory = Path(dataset_dir)
    for name in DATASET_FILES:
        path = directory / name
        digest.update(name.encode("utf-8"))
        if path.exists():
            with open(path, "rb") as f:
                for chunk in iter(lambda: f.read(65536), b""):
                    digest.update(chunk)
        digest.update(b"\0")
    digest.update(json.dumps(dict(knobs or {}), sort_keys=True).encode("utf-8"))
    return digest.hexdigest()


@dataclass(frozen=True)
class CachedSnapshot:
    snapshot: Snapshot
    matrix: Optional[FileModificationMatrix]
    pr_matrix: Optional[FileModificationMatrix]


def _snapshot_from_record(record: Dict[str, Any]) -> Snapshot:
    return Snapshot(
        project_id=record["project_id"],
        interval_start=parse_timestamp(record["interval_start"]),
        interval_end=parse_timestamp(record["interval_end"]),
        population=tuple((p["fork_id"], tuple(p["commit_shas"])) for p in record["population"]),
    )


class SnapshotCache:
    """Read/write access to the cache file of one project."""

    def __init__(self, path: Union[str, Path]):
        self.path = Path(path)

    def load(self, fingerprint: str) -> Optional[List[CachedSnapshot]]:
        """
        Return cached snapshots when the fingerprint matches, else None.

        Raises:
            SchemaVersionMismatch: If the cache was written by an incompatible version
            MalformedRecord: If the cache file is corrupt
        """
        if not self.path.exists():
            return None
        try:
            with open(self.path, "r", encoding="utf-8") as f:
                lines = [line for line in f if line.strip()]
        except OSError as e:
            raise IoFailure(self.path, str(e))
        if not lines:
            return None

        try:
            header = json.loads(lines[0])
            check_schema_version(header.get("schema_version"), path=str(self.path))
            if header.get("fingerprint") != fingerprint:
                logger.info(f"Snapshot cache {self.path.name} is stale; recomputing")
                return None
            entries = []
            for line in lines[1:]:
                record = json.loads(line)
                entries.append(CachedSnapshot(
                    snapshot=_snapshot_from_record(record["snapshot"]),
                    matrix=FileModificationMatrix.from_records(record["matrix"]) if record["matrix"] else None,
                    pr_matrix=FileModificationMatrix.from_records(record["pr_matrix"]) if record["pr_matrix"] else None,
                ))
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as e:
            raise MalformedRecord(self.path.name, 0, f"corrupt snapshot cache: {e}")
        logger.info(f"Loaded {len(entries)} snapshots from cache {self.path.name}")
        return entries

    def store(self, fingerprint: str, entries: List[CachedSnapshot]) -> None:
        """Write the cache atomically (temp file, then rename)."""
        tmp_path = self.path.with_name(self.path.name + ".tmp")
        try:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with open(tmp_path, "w", encoding="utf-8", newline="\n") as f:
                f.write(json.dumps({"schema_version": CACHE_SCHEMA_VERSION, "fingerprint": fingerprint},
                                   sort_keys=True) + "\n")
                for entry in entries:
                    f.write(json.dumps({
                        "snapshot": entry.snapshot.to_record(),
                        "matrix": entry.matrix.to_records() if entry.matrix else None,
                        "pr_matrix": entry.pr_matrix.to_records() if entry.pr_matrix else None,
                    }, sort_keys=True) + "\n")
            os.replace(tmp_path, self.path)
        except OSError as e:
            logger.error(f"Error writing snapshot cache {self.path}: {e}", exc_info=True)
            raise IoFailure(self.path, str(e))
        logger.debug(f"Stored {len(entries)} snapshots in {self.path}")
