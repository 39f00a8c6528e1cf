"""
Sparse file-modification vectors and matrices.

A row holds one fork's changed-line counts per file column; a matrix stacks the
rows of a fork population together with the file-path <-> column index.
"""
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from forkentropy.errors import InvalidMatrix, InvalidRowSpec, InvalidVector, IoFailure, MalformedRecord

Entry = Tuple[int, int]


@dataclass(frozen=True)
class FileModVector:
    """One fork's sparse per-file changed-line counts within a snapshot."""

    fork_id: str
    entries: Tuple[Entry, ...]

    def __post_init__(self):
        entries = tuple((int(col), int(lines)) for col, lines in self.entries)
        if not entries:
            raise InvalidVector(f"Vector for fork {self.fork_id!r} has no entries", fork_id=self.fork_id)
        previous = -1
        for col, lines in entries:
            if col < 0:
                raise InvalidVector(f"Negative column id {col}", fork_id=self.fork_id)
            if col <= previous:
                raise InvalidVector(
                    f"Entries must be strictly ascending by column, got {col} after {previous}",
                    fork_id=self.fork_id,
                )
            if lines < 1:
                raise InvalidVector(f"Changed lines must be >= 1, got {lines} at column {col}", fork_id=self.fork_id)
            previous = col
        object.__setattr__(self, "entries", entries)

    @classmethod
    def from_mapping(cls, fork_id: str, cells: Mapping[int, int]) -> "FileModVector":
        """Build a vector from a column -> lines mapping, dropping zero cells."""
        entries = tuple(sorted((int(c), int(v)) for c, v in cells.items() if int(v) != 0))
        return cls(fork_id=fork_id, entries=entries)

    @property
    def columns(self) -> Tuple[int, ...]:
        return tuple(col for col, _ in self.entries)

    @property
    def l1_norm(self) -> int:
        return sum(lines for _, lines in self.entries)

    def relabel(self, mapping: Mapping[int, int]) -> "FileModVector":
        return FileModVector.from_mapping(self.fork_id, {mapping[c]: v for c, v in self.entries})

    def to_dense(self, n: int) -> np.ndarray:
        dense = np.zeros(n, dtype=np.int64)
        for col, lines in self.entries:
            dense[col] = lines
        return dense


@dataclass(frozen=True)
class FileModificationMatrix:
    """
    A fork population's stacked rows for one snapshot.

    ``file_index[j]`` is the path of column ``j``; every column carries at
    least one nonzero cell and every row at least one entry.
    """

    snapshot_ref: str
    rows: Tuple[FileModVector, ...]
    file_index: Tuple[str, ...]

    def __post_init__(self):
        rows = tuple(self.rows)
        file_index = tuple(self.file_index)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "file_index", file_index)
        if not rows:
            raise InvalidMatrix(f"Matrix {self.snapshot_ref!r} has no rows", snapshot_ref=self.snapshot_ref)
        if len(set(file_index)) != len(file_index):
            raise InvalidMatrix("file_index contains duplicate paths", snapshot_ref=self.snapshot_ref)
        used = set()
        for row in rows:
            used.update(row.columns)
        if used != set(range(len(file_index))):
            raise InvalidMatrix(
                "Columns used by rows must be exactly the columns of file_index",
                snapshot_ref=self.snapshot_ref,
                n=len(file_index),
            )

    @property
    def m(self) -> int:
        return len(self.rows)

    @property
    def n(self) -> int:
        return len(self.file_index)

    def column_of(self, path: str) -> int:
        return self.file_index.index(path)

    def columns(self) -> Dict[int, Tuple[List[int], List[int]]]:
        """Column-major view: column -> (row positions, changed lines)."""
        by_column: Dict[int, Tuple[List[int], List[int]]] = {}
        for position, row in enumerate(self.rows):
            for col, lines in row.entries:
                row_ids, values = by_column.setdefault(col, ([], []))
                row_ids.append(position)
                values.append(lines)
        return by_column

    def to_dense(self) -> np.ndarray:
        dense = np.zeros((self.m, self.n), dtype=np.int64)
        for i, row in enumerate(self.rows):
            for col, lines in row.entries:
                dense[i, col] = lines
        return dense

    def row_from_cells(self, fork_id: str, cells: Mapping[str, int]) -> Tuple[FileModVector, Tuple[str, ...]]:
        """
        Express a path -> lines mapping in this matrix's column space.

        Paths unknown to the matrix extend the index after its last column.

        Returns:
            The vector and the (possibly extended) file index
        """
        index = list(self.file_index)
        positions = {path: col for col, path in enumerate(index)}
        mapped: Dict[int, int] = {}
        for path, lines in cells.items():
            if path not in positions:
                positions[path] = len(index)
                index.append(path)
            mapped[positions[path]] = int(lines)
        return FileModVector.from_mapping(fork_id, mapped), tuple(index)

    def with_row(self, row: FileModVector, file_index: Optional[Sequence[str]] = None) -> "FileModificationMatrix":
        return FileModificationMatrix(
            snapshot_ref=self.snapshot_ref,
            rows=self.rows + (row,),
            file_index=tuple(file_index) if file_index is not None else self.file_index,
        )

    def relabel(self, mapping: Mapping[int, int]) -> "FileModificationMatrix":
        """Apply a column bijection consistently to rows and file_index."""
        index: List[Optional[str]] = [None] * self.n
        for col, path in enumerate(self.file_index):
            index[mapping[col]] = path
        return FileModificationMatrix(
            snapshot_ref=self.snapshot_ref,
            rows=tuple(row.relabel(mapping) for row in self.rows),
            file_index=tuple(index),  # type: ignore[arg-type]
        )

    # -------------------------
    # Serialization
    # -------------------------

    def to_records(self) -> List[dict]:
        records: List[dict] = [{"snapshot_ref": self.snapshot_ref}]
        for row in self.rows:
            records.append({
                "fork_id": row.fork_id,
                "cells": {self.file_index[col]: lines for col, lines in row.entries},
            })
        return records

    @classmethod
    def from_cells(
        cls, snapshot_ref: str, rows: Iterable[Tuple[str, Mapping[str, int]]]
    ) -> "FileModificationMatrix":
        """
        Build a matrix from (fork_id, path -> lines) pairs.

        Columns are the paths with a nonzero cell, sorted lexicographically;
        rows whose cells are all zero are invalid.
        """
        materialized = [(fork_id, {p: int(v) for p, v in cells.items() if int(v) != 0}) for fork_id, cells in rows]
        paths = sorted({path for _, cells in materialized for path in cells})
        positions = {path: col for col, path in enumerate(paths)}
        vectors = tuple(
            FileModVector.from_mapping(fork_id, {positions[p]: v for p, v in cells.items()})
            for fork_id, cells in materialized
        )
        return cls(snapshot_ref=snapshot_ref, rows=vectors, file_index=tuple(paths))

    @classmethod
    def from_records(cls, records: Iterable[dict], source: str = "<matrix>") -> "FileModificationMatrix":
        snapshot_ref = ""
        rows: List[Tuple[str, Mapping[str, int]]] = []
        for line_no, record in enumerate(records, start=1):
            if "cells" not in record:
                if "snapshot_ref" in record and not rows:
                    snapshot_ref = str(record["snapshot_ref"])
                    continue
                raise MalformedRecord(source, line_no, "matrix row requires 'cells'")
            cells = record["cells"]
            if not isinstance(cells, dict):
                raise MalformedRecord(source, line_no, "'cells' must be an object of path -> lines")
            try:
                parsed = {str(path): int(lines) for path, lines in cells.items()}
            except (TypeError, ValueError) as e:
                raise MalformedRecord(source, line_no, f"non-integer cell value: {e}")
            if any(v < 0 for v in parsed.values()):
                raise MalformedRecord(source, line_no, "changed lines must be non-negative")
            rows.append((str(record.get("fork_id", f"row-{line_no}")), parsed))
        return cls.from_cells(snapshot_ref, rows)


def read_matrix(path: Union[str, Path]) -> FileModificationMatrix:
    """Read a matrix from an NDJSON file (optional header line, one row per line)."""
    path = Path(path)
    try:
        with open(path, "r", encoding="utf-8") as f:
            lines = [line for line in f]
    except OSError as e:
        raise IoFailure(path, str(e))

    records = []
    for line_no, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            records.append(json.loads(line))
        except json.JSONDecodeError as e:
            raise MalformedRecord(path.name, line_no, f"invalid JSON: {e.msg}")
    return FileModificationMatrix.from_records(records, source=path.name)


def write_matrix(matrix: FileModificationMatrix, path: Union[str, Path]) -> None:
    path = Path(path)
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            for record in matrix.to_records():
                f.write(json.dumps(record, sort_keys=True) + "\n")
    except OSError as e:
        raise IoFailure(path, str(e))


def parse_row_spec(spec: str) -> Dict[str, int]:
    """
    Parse a ``path=lines,path=lines`` row specification.

    Raises:
        InvalidRowSpec: If the spec is empty or any cell is malformed
    """
    cells: Dict[str, int] = {}
    for part in (p.strip() for p in spec.split(",")):
        if not part:
            continue
        path, sep, value = part.rpartition("=")
        if not sep or not path:
            raise InvalidRowSpec(f"Expected path=lines, got {part!r}", spec=spec)
        try:
            lines = int(value)
        except ValueError:
            raise InvalidRowSpec(f"Changed lines must be an integer in {part!r}", spec=spec)
        if lines < 0:
            raise InvalidRowSpec(f"Changed lines must be non-negative in {part!r}", spec=spec)
        cells[path] = cells.get(path, 0) + lines
    if not any(cells.values()):
        raise InvalidRowSpec("Row spec has no nonzero cells", spec=spec)
    return cells
