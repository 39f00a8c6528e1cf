"""
Advisory lint rules mirroring the project selection screen.

Lint never fails; each rule produces zero or one finding.
"""
from dataclasses import dataclass, field
from pathlib import PurePosixPath
from typing import Any, Dict, List, Optional

from forkentropy.config import LintThresholds
from forkentropy.dataset.index import dataset_index
from forkentropy.dataset.records import EventDataset
from forkentropy.logging_config import get_logger

logger = get_logger(__name__)

EXCLUSION_KEYWORDS = ("awesome", "homework", "assignment", "course", "note", "document")

SOURCE_EXTENSIONS = frozenset({
    ".c", ".h", ".cc", ".cpp", ".cxx", ".hpp", ".cs", ".go", ".java", ".kt", ".kts", ".scala",
    ".js", ".jsx", ".mjs", ".ts", ".tsx", ".py", ".rb", ".php", ".rs", ".swift", ".m", ".mm",
    ".pl", ".pm", ".lua", ".r", ".jl", ".hs", ".erl", ".ex", ".exs", ".clj", ".dart", ".sh",
    ".f90", ".vue",
})


@dataclass(frozen=True)
class LintFinding:
    rule: str
    message: str
    severity: str = "warning"
    context: Dict[str, Any] = field(default_factory=dict, compare=False, hash=False)

    def to_dict(self) -> Dict[str, Any]:
        return {"rule": self.rule, "message": self.message, "severity": self.severity, "context": self.context}


def count_active_forks(dataset: EventDataset) -> int:
    """Forks in the network that have at least one pushed commit."""
    index = dataset_index(dataset)
    return sum(1 for fork in index.network if index.commits_by_repo.get(fork.repo_id))


def count_external_pull_requests(dataset: EventDataset) -> int:
    """Pull requests to the source, opened from network forks by users external at creation time."""
    index = dataset_index(dataset)
    return sum(1 for pull in dataset.pulls if index.is_external_pull(pull))


def has_source_code(dataset: EventDataset) -> bool:
    for commit in dataset.commits:
        for change in commit.files:
            if PurePosixPath(change.path).suffix.lower() in SOURCE_EXTENSIONS:
                return True
    return False


def _threshold_finding(rule: str, value: int, threshold: int) -> Optional[LintFinding]:
    if value >= threshold:
        return None
    return LintFinding(
        rule=rule,
        message=f"{rule}={value} < {threshold}",
        context={"value": value, "threshold": threshold},
    )


def lint_dataset(dataset: EventDataset, thresholds: Optional[LintThresholds] = None) -> List[LintFinding]:
    """
    Run all lint rules over a dataset.

    Args:
        dataset: A loaded dataset
        thresholds: Selection thresholds (defaults 100/100/100)

    Returns:
        Findings in rule order; empty when the project passes the screen
    """
    thresholds = thresholds or LintThresholds()
    findings: List[LintFinding] = []

    for rule, value, threshold in (
        ("active_forks", count_active_forks(dataset), thresholds.active_forks),
        ("issues", len(dataset.issues), thresholds.issues),
        ("external_pull_requests", count_external_pull_requests(dataset), thresholds.external_pull_requests),
    ):
        finding = _threshold_finding(rule, value, threshold)
        if finding:
            findings.append(finding)

    texts = {"name": dataset.project.full_name.lower(), "description": (dataset.project.description or "").lower()}
    for keyword in EXCLUSION_KEYWORDS:
        where = [name for name, text in texts.items() if keyword in text]
        if where:
            findings.append(LintFinding(
                rule="name_keyword",
                message=f"project {' and '.join(where)} contains '{keyword}'",
                context={"keyword": keyword, "fields": where},
            ))

    if dataset.commits and not has_source_code(dataset):
        findings.append(LintFinding(
            rule="no_source_code",
            message="no modified path has a programming-language file extension",
        ))

    for finding in findings:
        logger.warning(f"Lint {dataset.project_id}: {finding.message}")
    return findings
