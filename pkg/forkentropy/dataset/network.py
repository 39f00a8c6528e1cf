"""
Fork network traversal.
"""
from collections import deque
from typing import Dict, List, Tuple

from forkentropy.dataset.records import EventDataset, ForkRecord
from forkentropy.errors import CycleDetected
from forkentropy.logging_config import get_logger

logger = get_logger(__name__)


def children_by_parent(dataset: EventDataset) -> Dict[str, List[ForkRecord]]:
    """Parent repo id -> child forks ordered by (created_at, repo_id)."""
    children: Dict[str, List[ForkRecord]] = {}
    for fork in dataset.forks:
        children.setdefault(fork.parent_repo_id, []).append(fork)  # type: ignore[arg-type]
    for siblings in children.values():
        siblings.sort(key=lambda r: r.sort_key)
    return children


def fork_network(dataset: EventDataset) -> Tuple[ForkRecord, ...]:
    """
    All direct and transitive forks of the source repository, breadth first.

    Siblings are visited in (created_at, repo_id) order, so the result does
    not depend on the order of records in the input files. The source
    repository itself is excluded.

    Raises:
        CycleDetected: If parent links loop without reaching the source
    """
    children = children_by_parent(dataset)
    source_id = dataset.source_repo_id
    ordered: List[ForkRecord] = []
    visited = {source_id}
    queue = deque([source_id])
    while queue:
        repo_id = queue.popleft()
        for child in children.get(repo_id, ()):
            if child.repo_id in visited:
                continue
            visited.add(child.repo_id)
            ordered.append(child)
            queue.append(child.repo_id)

    if len(ordered) != len(dataset.forks):
        # every parent exists (loader checks), so an unreached fork sits on a loop
        by_id = {fork.repo_id: fork for fork in dataset.forks}
        for fork in dataset.forks:
            if fork.repo_id in visited:
                continue
            seen = set()
            current = fork.repo_id
            while current not in seen:
                seen.add(current)
                current = by_id[current].parent_repo_id  # type: ignore[assignment]
            logger.error(f"Cycle in fork parent links through {current}")
            raise CycleDetected(current)

    logger.debug(f"Fork network of {dataset.project_id}: {len(ordered)} forks")
    return tuple(ordered)
