"""
Consistency check of a fetched dataset directory.
"""
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from forkentropy.dataset.loader import load_dataset
from forkentropy.dataset.records import EventDataset, format_timestamp, parse_timestamp
from forkentropy.forge.store import CURSOR_FILE, load_cursors
from forkentropy.logging_config import get_logger

logger = get_logger(__name__)

CURSOR_AHEAD = "CursorAhead"


@dataclass
class VerifyReport:
    """Outcome of ``verify_cache``; clean when there are no warnings."""

    directory: str
    counts: Dict[str, int]
    warnings: List[Dict[str, Any]] = field(default_factory=list)

    @property
    def clean(self) -> bool:
        return not self.warnings

    def to_dict(self) -> Dict[str, Any]:
        return {"directory": self.directory, "counts": self.counts, "warnings": self.warnings, "clean": self.clean}


def _newest_by_cursor(dataset: EventDataset, key: str) -> Optional[datetime]:
    """Latest record timestamp belonging to a cursor key, None when it has no records."""
    resource, _, repo_name = key.partition(":")
    repo_ids = {dataset.project.full_name: dataset.source_repo_id}
    repo_ids.update({f.full_name: f.repo_id for f in dataset.forks})
    stamps: List[datetime]
    if resource == "forks":
        parent = repo_ids.get(repo_name)
        stamps = [f.created_at for f in dataset.forks if f.parent_repo_id == parent]
    elif resource == "commits":
        repo_id = repo_ids.get(repo_name)
        stamps = [c.committed_at for c in dataset.commits if c.repo_id == repo_id]
    elif resource == "pulls":
        stamps = [p.created_at for p in dataset.pulls]
    elif resource == "issues":
        stamps = [i.created_at for i in dataset.issues]
    elif resource == "events":
        stamps = [a.occurred_at for a in dataset.privileged_actions]
    elif resource == "stars":
        stamps = [s.starred_at for s in dataset.stars]
    else:
        return None
    return max(stamps) if stamps else None


def verify_cache(out: Union[str, Path]) -> VerifyReport:
    """
    Validate a dataset directory and its fetch cursors.

    Record validation is exactly ``load_dataset``. On top of it, every cursor
    whose recorded ``newest`` timestamp is later than the newest record of its
    resource yields a ``CursorAhead`` warning (records were lost after the
    cursor advanced).

    Raises:
        Everything ``load_dataset`` raises, plus SchemaVersionMismatch for an
        incompatible cursor file
    """
    directory = Path(out)
    dataset = load_dataset(directory)
    report = VerifyReport(
        directory=str(directory),
        counts={
            "forks": len(dataset.forks),
            "commits": len(dataset.commits),
            "pulls": len(dataset.pulls),
            "issues": len(dataset.issues),
            "privileged_actions": len(dataset.privileged_actions),
            "stars": len(dataset.stars),
        },
    )

    cursor_path = directory / CURSOR_FILE
    if not cursor_path.exists():
        logger.info(f"No {CURSOR_FILE} in {directory}; only records checked")
        return report

    for key, entry in sorted(load_cursors(cursor_path).items()):
        if not entry.get("newest"):
            continue
        cursor_newest = parse_timestamp(entry["newest"])
        newest = _newest_by_cursor(dataset, key)
        if newest is None or cursor_newest > newest:
            warning = {
                "kind": CURSOR_AHEAD,
                "resource": key,
                "cursor_newest": format_timestamp(cursor_newest),
                "newest_record": format_timestamp(newest) if newest else None,
            }
            logger.warning(f"Cursor {key} is ahead of its records: {warning}")
            report.warnings.append(warning)
    logger.info(f"Verified {directory}: {len(report.warnings)} warnings")
    return report
