"""
Error taxonomy for the fork-entropy toolkit.

Every error carries a machine-readable ``kind``, a ``context`` dict and the
process exit code the CLI maps it to.
"""
import json
from typing import Any, Dict, Optional

EXIT_OK = 0
EXIT_UNEXPECTED = 1
EXIT_VALIDATION = 2
EXIT_FETCH = 3


class ForkEntropyError(Exception):
    """Base class for all toolkit errors."""

    kind = "error"
    exit_code = EXIT_UNEXPECTED

    def __init__(self, message: str, **context: Any):
        super().__init__(message)
        self.message = message
        self.context: Dict[str, Any] = context

    def to_dict(self) -> Dict[str, Any]:
        return {"kind": self.kind, "message": self.message, "context": self.context}

    def to_json(self) -> str:
        """Single-line JSON rendering used on stderr."""
        return json.dumps(self.to_dict(), sort_keys=True, default=str)


class ValidationError(ForkEntropyError):
    """Input that violates a documented contract."""

    kind = "validation_error"
    exit_code = EXIT_VALIDATION


# -------------------------
# entropy-core
# -------------------------

class InvalidVector(ValidationError):
    kind = "invalid_vector"


class InvalidMatrix(ValidationError):
    kind = "invalid_matrix"


class InvalidGamma(ValidationError):
    kind = "invalid_gamma"

    def __init__(self, gamma: Any):
        super().__init__(f"gamma must be a positive finite real, got {gamma!r}", gamma=repr(gamma))


class InvalidRowSpec(ValidationError):
    kind = "invalid_row_spec"


# -------------------------
# data-model-ingest
# -------------------------

class DatasetNotFound(ValidationError):
    kind = "dataset_not_found"

    def __init__(self, path: Any):
        super().__init__(f"Dataset directory not found: {path}", path=str(path))


class MalformedRecord(ValidationError):
    kind = "malformed_record"

    def __init__(self, file: str, line: int, reason: str):
        super().__init__(f"{file}:{line}: {reason}", file=file, line=line, reason=reason)
        self.file = file
        self.line = line
        self.reason = reason


class DanglingReference(ValidationError):
    kind = "dangling_reference"

    def __init__(self, ref_kind: str, ref_id: Any):
        super().__init__(f"Unknown {ref_kind} referenced: {ref_id}", ref_kind=ref_kind, id=str(ref_id))
        self.ref_kind = ref_kind
        self.ref_id = ref_id


class DuplicateKey(ValidationError):
    kind = "duplicate_key"

    def __init__(self, record_kind: str, key: Any):
        super().__init__(f"Duplicate {record_kind} key: {key}", record_kind=record_kind, key=str(key))
        self.record_kind = record_kind
        self.key = key


class CycleDetected(ValidationError):
    kind = "cycle_detected"

    def __init__(self, repo_id: str):
        super().__init__(f"Fork parent links form a cycle through {repo_id}", repo_id=repo_id)
        self.repo_id = repo_id


class SchemaVersionMismatch(ValidationError):
    kind = "schema_version_mismatch"

    def __init__(self, found: Optional[str], expected: str, path: str = ""):
        super().__init__(
            f"Unsupported schema_version {found!r} (expected {expected}) in {path or 'input'}",
            found=found, expected=expected, path=path,
        )


# -------------------------
# population-builder / outcome-metrics
# -------------------------

class EmptyPopulation(ValidationError):
    kind = "empty_population"

    def __init__(self, snapshot_ref: str):
        super().__init__(f"Snapshot {snapshot_ref} has no qualifying forks", snapshot_ref=snapshot_ref)
        self.snapshot_ref = snapshot_ref


class OpenPullRequest(ValidationError):
    kind = "open_pull_request"

    def __init__(self, pr_id: int):
        super().__init__(f"Pull request #{pr_id} is still open", pr_id=pr_id)


# -------------------------
# analysis-export
# -------------------------

class DegenerateColumn(ValidationError):
    kind = "degenerate_column"

    def __init__(self, name: str):
        super().__init__(f"Column {name!r} has zero variance and cannot be standardized", column=name)
        self.column = name


class InsufficientData(ValidationError):
    kind = "insufficient_data"

    def __init__(self, what: str, n: int, reason: str = "fewer than 3 observations"):
        super().__init__(f"Insufficient data for {what}: {reason} (n={n})", what=what, n=n, reason=reason)
        self.n = n


class IoFailure(ForkEntropyError):
    kind = "io_failure"
    exit_code = EXIT_UNEXPECTED

    def __init__(self, path: Any, reason: str):
        super().__init__(f"I/O failure on {path}: {reason}", path=str(path), reason=reason)


class ConfigError(ValidationError):
    kind = "config_error"


# -------------------------
# forge-client
# -------------------------

class FetchError(ForkEntropyError):
    kind = "fetch_error"
    exit_code = EXIT_FETCH


class RateLimited(FetchError):
    kind = "rate_limited"

    def __init__(self, retry_after: float, url: str = ""):
        super().__init__(f"Rate limited by the forge; retry after {retry_after:.0f}s", retry_after=retry_after, url=url)
        self.retry_after = retry_after


class AuthFailure(FetchError):
    kind = "auth_failure"


class UpstreamSchemaChange(FetchError):
    kind = "upstream_schema_change"

    def __init__(self, field: str, url: str = ""):
        super().__init__(f"Forge response is missing or changed field {field!r}", field=field, url=url)
        self.field = field


class PartialFetch(FetchError):
    kind = "partial_fetch"

    def __init__(self, resource: str, cursor: Optional[str], reason: str = ""):
        super().__init__(
            f"Fetch of {resource} stopped early{': ' + reason if reason else ''}",
            resource=resource, cursor=cursor, reason=reason,
        )
        self.resource = resource
        self.cursor = cursor
