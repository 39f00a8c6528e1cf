"""
Deterministic CSV / NDJSON export of metrics tables.

Floats are written with ten decimals and undefined values as empty cells
(``null`` in NDJSON), never as 0. Re-exporting an identical table produces
byte-identical files.
"""
import csv
import json
import math
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

import numpy as np
import pandas as pd

from forkentropy.analysis.table import RegressionTable
from forkentropy.errors import IoFailure, MalformedRecord
from forkentropy.logging_config import get_logger
from forkentropy.metrics.snapshot import METRIC_COLUMNS, SnapshotMetrics
from forkentropy.population.cache import check_schema_version

logger = get_logger(__name__)

EXPORT_SCHEMA_VERSION = "1.0"
FORMATS = ("csv", "ndjson")

_INT_COLUMNS = frozenset({
    "external_productivity", "prs_merged", "prs_closed", "bug_reports",
    "num_forks", "num_files", "project_age_days", "num_stars",
})


def _is_missing(value: Any) -> bool:
    if value is None:
        return True
    try:
        return bool(pd.isna(value))
    except (TypeError, ValueError):
        return False


def format_cell(value: Any) -> str:
    """Render one CSV cell."""
    if _is_missing(value):
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        text = f"{float(value):.10f}"
        return "0.0000000000" if text == "-0.0000000000" else text
    return str(value)


def json_value(value: Any) -> Any:
    if _is_missing(value):
        return None
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return 0.0 if value == 0 else value
    return value


def manifest(table: RegressionTable, columns: Sequence[str]) -> Dict[str, Any]:
    return {
        "kind": "manifest",
        "schema_version": EXPORT_SCHEMA_VERSION,
        "columns": list(columns),
        "row_count": len(table.frame),
        "prepared": table.prepared,
        "transform_log": table.transform_log,
    }


def _records(frame: pd.DataFrame, columns: Sequence[str]) -> List[List[Any]]:
    return [[row[c] for c in columns] for row in frame[list(columns)].to_dict(orient="records")]


def write_csv(table: RegressionTable, path: Union[str, Path], columns: Optional[Sequence[str]] = None) -> Path:
    """
    Write the table as CSV plus a ``<name>.manifest.json`` sidecar.

    Raises:
        IoFailure: If either file cannot be written
    """
    path = Path(path)
    columns = list(columns or table.frame.columns)
    manifest_path = path.with_name(path.stem + ".manifest.json")
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(columns)
            for record in _records(table.frame, columns):
                writer.writerow([format_cell(v) for v in record])
        with open(manifest_path, "w", encoding="utf-8", newline="\n") as f:
            f.write(json.dumps(manifest(table, columns), indent=2, sort_keys=True) + "\n")
    except OSError as e:
        logger.error(f"Error writing {path}: {e}", exc_info=True)
        raise IoFailure(path, str(e))
    logger.info(f"Wrote {len(table.frame)} rows to {path}")
    return path


def write_ndjson(table: RegressionTable, path: Union[str, Path], columns: Optional[Sequence[str]] = None) -> Path:
    """
    Write the table as NDJSON whose first line is the manifest.

    Raises:
        IoFailure: If the file cannot be written
    """
    path = Path(path)
    columns = list(columns or table.frame.columns)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            f.write(json.dumps(manifest(table, columns), sort_keys=True) + "\n")
            for record in _records(table.frame, columns):
                row = {c: json_value(v) for c, v in zip(columns, record)}
                f.write(json.dumps(row) + "\n")
    except OSError as e:
        logger.error(f"Error writing {path}: {e}", exc_info=True)
        raise IoFailure(path, str(e))
    logger.info(f"Wrote {len(table.frame)} rows to {path}")
    return path


def export(
    table: RegressionTable,
    out_dir: Union[str, Path],
    formats: Sequence[str] = FORMATS,
    basename: str = "metrics",
) -> List[Path]:
    """Export a table in each requested format; returns the written paths."""
    out_dir = Path(out_dir)
    written = []
    columns = list(METRIC_COLUMNS)
    for fmt in formats:
        if fmt == "csv":
            written.append(write_csv(table, out_dir / f"{basename}.csv", columns))
        elif fmt == "ndjson":
            written.append(write_ndjson(table, out_dir / f"{basename}.ndjson", columns))
        else:
            raise ValueError(f"Unknown export format: {fmt}")
    return written


def _parse_cell(column: str, text: str, file: str, line: int) -> Any:
    if text == "":
        return None
    if column in ("project_id", "month"):
        return text
    try:
        if column in _INT_COLUMNS:
            return int(text)
        value = float(text)
    except ValueError:
        raise MalformedRecord(file, line, f"column {column!r} has non-numeric value {text!r}")
    if not math.isfinite(value):
        raise MalformedRecord(file, line, f"column {column!r} is not finite")
    return value


def read_metrics_csv(path: Union[str, Path]) -> List[SnapshotMetrics]:
    """
    Read a raw metrics CSV written by ``write_csv``.

    Raises:
        MalformedRecord: On a wrong header or unparseable cell
        SchemaVersionMismatch: If the sidecar manifest has an incompatible version
        IoFailure: If the file cannot be read
    """
    path = Path(path)
    manifest_path = path.with_name(path.stem + ".manifest.json")
    try:
        if manifest_path.exists():
            with open(manifest_path, "r", encoding="utf-8") as f:
                check_schema_version(json.load(f).get("schema_version"), EXPORT_SCHEMA_VERSION, str(manifest_path))
        with open(path, "r", encoding="utf-8", newline="") as f:
            reader = csv.reader(f)
            header = next(reader, None)
            if header != list(METRIC_COLUMNS):
                raise MalformedRecord(path.name, 1, "header does not match the metrics columns")
            rows = []
            for line_no, cells in enumerate(reader, start=2):
                if len(cells) != len(METRIC_COLUMNS):
                    raise MalformedRecord(path.name, line_no, f"expected {len(METRIC_COLUMNS)} cells, got {len(cells)}")
                rows.append(SnapshotMetrics(**{
                    c: _parse_cell(c, v, path.name, line_no) for c, v in zip(METRIC_COLUMNS, cells)
                }))
    except (OSError, json.JSONDecodeError) as e:
        raise IoFailure(path, str(e))
    logger.debug(f"Read {len(rows)} metrics rows from {path}")
    return rows
