"""
File modification matrices of a snapshot population.
"""
from typing import Dict, List, Tuple

from forkentropy.dataset.index import dataset_index
from forkentropy.dataset.records import EventDataset, FileChange
from forkentropy.entropy.vectors import FileModificationMatrix
from forkentropy.errors import EmptyPopulation
from forkentropy.logging_config import get_logger
from forkentropy.population.snapshots import Snapshot

logger = get_logger(__name__)


def _accumulate(cells: Dict[str, int], files: Tuple[FileChange, ...]) -> None:
    for change in files:
        if change.changed_lines:
            cells[change.path] = cells.get(change.path, 0) + change.changed_lines


def build_matrix(dataset: EventDataset, snapshot: Snapshot) -> FileModificationMatrix:
    """
    Full matrix: one row per population fork, cells are changed lines
    (additions + deletions) summed over the fork's attributed commits.

    Raises:
        EmptyPopulation: If the snapshot has no forks
    """
    if snapshot.is_empty:
        raise EmptyPopulation(snapshot.ref)
    index = dataset_index(dataset)
    rows: List[Tuple[str, Dict[str, int]]] = []
    for fork_id, shas in snapshot.population:
        wanted = set(shas)
        cells: Dict[str, int] = {}
        for commit in index.commits_by_repo.get(fork_id, ()):
            if commit.sha in wanted:
                wanted.discard(commit.sha)
                _accumulate(cells, commit.files)
        rows.append((fork_id, cells))
    matrix = FileModificationMatrix.from_cells(snapshot.ref, rows)
    logger.debug(f"Matrix {snapshot.ref}: {matrix.m} x {matrix.n}")
    return matrix


def build_pr_filtered_matrix(dataset: EventDataset, snapshot: Snapshot) -> FileModificationMatrix:
    """
    Matrix restricted to modifications carried by pull requests that population
    forks opened against the source repository in the interval. Forks without
    such a pull request are dropped.

    Raises:
        EmptyPopulation: If no population fork opened a pull request
    """
    population = set(snapshot.fork_ids)
    cells_by_fork: Dict[str, Dict[str, int]] = {}
    for pull in dataset.pulls:
        if (
            pull.target_repo_id == dataset.source_repo_id
            and pull.source_repo_id in population
            and snapshot.contains(pull.created_at)
        ):
            _accumulate(cells_by_fork.setdefault(pull.source_repo_id, {}), pull.files)

    rows = [(fork_id, cells_by_fork[fork_id]) for fork_id in snapshot.fork_ids if cells_by_fork.get(fork_id)]
    if not rows:
        raise EmptyPopulation(snapshot.ref)
    matrix = FileModificationMatrix.from_cells(snapshot.ref, rows)
    logger.debug(f"PR-filtered matrix {snapshot.ref}: {matrix.m} x {matrix.n}")
    return matrix
