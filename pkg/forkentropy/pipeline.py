"""
Command implementations: everything the CLI does, without argument parsing.

Each ``run_*`` function takes a validated RunConfig (plus command inputs) and
returns a result object; the CLI only prints and maps errors to exit codes.
"""
import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from forkentropy.analysis.correlation import correlation_summary
from forkentropy.analysis.export import export, read_metrics_csv, write_csv
from forkentropy.analysis.table import RegressionTable, interaction_terms, metrics_frame, prepare_table, raw_table
from forkentropy.config import RunConfig
from forkentropy.dataset.index import dataset_index
from forkentropy.dataset.lint import LintFinding, lint_dataset
from forkentropy.dataset.loader import load_dataset
from forkentropy.dataset.records import EventDataset
from forkentropy.entropy.core import EntropyResult, NewForkAssessment, classify_new_fork, quadratic_entropy
from forkentropy.entropy.vectors import parse_row_spec, read_matrix
from forkentropy.errors import ConfigError, IoFailure
from forkentropy.forge.verify import VerifyReport, verify_cache
from forkentropy.logging_config import get_logger
from forkentropy.metrics.merge import merge_verdicts
from forkentropy.metrics.snapshot import SnapshotMetrics, compute_snapshot_metrics, snapshot_matrices
from forkentropy.population.cache import CachedSnapshot, SnapshotCache, dataset_fingerprint
from forkentropy.population.snapshots import build_snapshots
from forkentropy.report.chart import chart_file_name, try_render_charts
from forkentropy.report.html import write_report
from forkentropy.report.themes import get_theme
from forkentropy.workers import WorkerPool

logger = get_logger(__name__)

METRICS_BASENAME = "metrics"
PREPARED_BASENAME = "prepared"
LINT_FILE = "lint.json"
CORRELATIONS_FILE = "correlations.json"
DESIGN_FILE = "design.csv"
CACHE_DIR = "cache"
CHART_DIR = "charts"


@dataclass
class ProjectResult:
    project_id: str
    rows: List[SnapshotMetrics]
    findings: List[LintFinding]


@dataclass
class ComputeResult:
    projects: List[ProjectResult]
    written: List[Path] = field(default_factory=list)

    @property
    def rows(self) -> List[SnapshotMetrics]:
        return [row for project in self.projects for row in project.rows]


@dataclass
class ExportResult:
    table: RegressionTable
    correlations: List[Dict[str, Any]]
    written: List[Path] = field(default_factory=list)


def _write_json(path: Path, payload: Any) -> Path:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            f.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    except OSError as e:
        logger.error(f"Error writing {path}: {e}", exc_info=True)
        raise IoFailure(path, str(e))
    return path


def _read_json(path: Path) -> Any:
    try:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise IoFailure(path, str(e))


def _require_datasets(config: RunConfig) -> None:
    if not config.datasets:
        raise ConfigError("No dataset given; use --dataset or 'datasets' in the config file", knob="datasets")


# -------------------------
# Snapshots and metrics
# -------------------------

def _snapshots_with_matrices(
    dataset_dir: Path, dataset: EventDataset, config: RunConfig, pool: WorkerPool
) -> List[CachedSnapshot]:
    cache: Optional[SnapshotCache] = None
    fingerprint = ""
    if config.use_snapshot_cache:
        name = re.sub(r"[^A-Za-z0-9._-]+", "_", dataset.project_id) + ".ndjson"
        cache = SnapshotCache(Path(config.out) / CACHE_DIR / name)
        fingerprint = dataset_fingerprint(dataset_dir, {"role_cutoff": config.role_cutoff})
        cached = cache.load(fingerprint)
        if cached is not None:
            return cached

    snapshots = build_snapshots(dataset, config.role_cutoff)
    matrices = pool.map(lambda s: snapshot_matrices(dataset, s), snapshots)
    entries = [CachedSnapshot(s, full, pr) for s, (full, pr) in zip(snapshots, matrices)]
    if cache is not None:
        cache.store(fingerprint, entries)
    return entries


def compute_project(dataset_dir: Union[str, Path], config: RunConfig, pool: WorkerPool) -> ProjectResult:
    """
    Load one dataset, lint it and compute one metrics row per month.

    Args:
        dataset_dir: Dataset directory
        config: Effective configuration
        pool: Worker pool for per-snapshot work

    Returns:
        ProjectResult with rows in month order
    """
    dataset_dir = Path(dataset_dir)
    dataset = load_dataset(dataset_dir)
    findings = lint_dataset(dataset, config.lint)

    # shared lookups are built once here, not concurrently inside the workers
    dataset_index(dataset)
    merge_verdicts(dataset)

    entries = _snapshots_with_matrices(dataset_dir, dataset, config, pool)

    def measure(entry: CachedSnapshot) -> SnapshotMetrics:
        return compute_snapshot_metrics(
            dataset, entry.snapshot, config.gamma, config.hot_window_days, config.hot_file_reference,
            matrices=(entry.matrix, entry.pr_matrix),
        )

    rows = pool.map(measure, entries)
    logger.info(f"Computed {len(rows)} monthly rows for {dataset.project_id}")
    return ProjectResult(project_id=dataset.project_id, rows=rows, findings=findings)


def run_pipeline(config: RunConfig) -> ComputeResult:
    """
    The ``compute`` command: metrics CSV/NDJSON, lint report and charts.

    Outputs are identical for any ``jobs`` value.

    Returns:
        ComputeResult listing the written files
    """
    _require_datasets(config)
    out = Path(config.out)
    with WorkerPool(config.jobs) as pool:
        projects = [compute_project(path, config, pool) for path in config.datasets]
    result = ComputeResult(projects=projects)

    table = raw_table(result.rows)
    result.written.extend(export(table, out, basename=METRICS_BASENAME))
    lint = {p.project_id: [f.to_dict() for f in p.findings] for p in projects}
    result.written.append(_write_json(out / LINT_FILE, lint))
    charts = try_render_charts(table.frame, out / CHART_DIR, get_theme(config.theme))
    if charts:
        result.written.extend(charts)
    logger.info(f"compute finished: {len(result.rows)} rows from {len(projects)} projects into {out}")
    return result


# -------------------------
# Validation
# -------------------------

def run_validate(config: RunConfig) -> List[Dict[str, Any]]:
    """Validate each dataset and run the lint rules; raises on the first invalid dataset."""
    _require_datasets(config)
    reports = []
    for path in config.datasets:
        verified: VerifyReport = verify_cache(path)
        dataset = load_dataset(path)
        report = verified.to_dict()
        report["project_id"] = dataset.project_id
        report["lint"] = [f.to_dict() for f in lint_dataset(dataset, config.lint)]
        reports.append(report)
    return reports


# -------------------------
# Preparation and export
# -------------------------

def run_export(config: RunConfig, metrics_path: Optional[Union[str, Path]] = None) -> ExportResult:
    """
    The ``export`` command: prepared regression table, correlations and
    optionally the interaction design matrix.
    """
    out = Path(config.out)
    source = Path(metrics_path) if metrics_path else out / f"{METRICS_BASENAME}.csv"
    rows = read_metrics_csv(source)
    table = prepare_table(rows, config.outlier_fraction)

    result = ExportResult(table=table, correlations=[r.to_dict() for r in correlation_summary(table)])
    result.written.extend(export(table, out, basename=PREPARED_BASENAME))
    result.written.append(_write_json(out / CORRELATIONS_FILE, result.correlations))
    if config.interaction_terms:
        design = RegressionTable(frame=interaction_terms(table), transform_log=table.transform_log)
        result.written.append(write_csv(design, out / DESIGN_FILE))
    return result


def run_report(config: RunConfig, input_dir: Optional[Union[str, Path]] = None) -> Path:
    """The ``report`` command: charts plus report.html from a compute output directory."""
    source = Path(input_dir) if input_dir else Path(config.out)
    out = Path(config.out)
    frame = metrics_frame(read_metrics_csv(source / f"{METRICS_BASENAME}.csv"))
    lint = _read_json(source / LINT_FILE) if (source / LINT_FILE).exists() else {}
    correlations = _read_json(source / CORRELATIONS_FILE) if (source / CORRELATIONS_FILE).exists() else []
    theme = get_theme(config.theme)
    charts = try_render_charts(frame, out / CHART_DIR, theme) or []
    chart_names = [f"{CHART_DIR}/{chart_file_name(p)}" for p in sorted(frame["project_id"].unique())] if charts else []
    out.mkdir(parents=True, exist_ok=True)
    return write_report(out, frame, lint, correlations, chart_names, theme)


# -------------------------
# Single-matrix queries
# -------------------------

def run_entropy(matrix_path: Union[str, Path], gamma: float) -> EntropyResult:
    return quadratic_entropy(read_matrix(matrix_path), gamma)


def run_what_if(matrix_path: Union[str, Path], row_spec: str, gamma: float,
                fork_id: str = "new") -> NewForkAssessment:
    """Assess a prospective fork, given as a path=lines spec, against a matrix."""
    matrix = read_matrix(matrix_path)
    row, _ = matrix.row_from_cells(fork_id, parse_row_spec(row_spec))
    return classify_new_fork(matrix, row, gamma)
