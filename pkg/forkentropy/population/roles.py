"""
External vs privileged contributor classification.
"""
from dataclasses import dataclass
from datetime import datetime
from enum import Enum

from forkentropy.dataset.index import dataset_index
from forkentropy.dataset.records import EventDataset


class Role(str, Enum):
    EXTERNAL = "external"
    PRIVILEGED = "privileged"


@dataclass(frozen=True)
class ContributorRole:
    user_id: str
    project_id: str
    as_of: datetime
    role: Role

    @property
    def is_external(self) -> bool:
        return self.role is Role.EXTERNAL


def classify_contributor(dataset: EventDataset, user_id: str, as_of: datetime) -> ContributorRole:
    """
    Classify a user's role on the source repository at a point in time.

    A user is privileged once they have pushed a commit directly to the source
    repository or performed a privileged action there, strictly before
    ``as_of``; everyone else is external.
    """
    privileged = dataset_index(dataset).is_privileged(str(user_id), as_of)
    return ContributorRole(
        user_id=str(user_id),
        project_id=dataset.project_id,
        as_of=as_of,
        role=Role.PRIVILEGED if privileged else Role.EXTERNAL,
    )
