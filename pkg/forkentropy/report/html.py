"""
HTML summary of a compute run: metrics table, lint findings, correlations.
"""
import html
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence, Type, Union

import pandas as pd

from forkentropy import __version__
from forkentropy.analysis.export import format_cell
from forkentropy.errors import IoFailure
from forkentropy.logging_config import get_logger
from forkentropy.metrics.snapshot import METRIC_COLUMNS
from forkentropy.report.themes import BaseTheme, DarkTheme

logger = get_logger(__name__)

REPORT_FILE = "report.html"

_TEMPLATE = """<!DOCTYPE html>
<html>
<head>
    <meta charset="UTF-8">
    <title>Fork entropy report</title>{style}
</head>
<body>
    <div class="header">
        <h1>Fork entropy report</h1>
        <p>Generated by fork-entropy {version}</p>
        <p>Projects: {projects} | Months: {months} | Lint findings: {findings}</p>
    </div>
    <h2>Charts</h2>
    {charts}
    <h2>Lint findings</h2>
    {lint}
    <h2>Correlations (Spearman, fork entropy vs outcome)</h2>
    {correlations}
    <h2>Metrics</h2>
    {metrics}
</body>
</html>
"""


def _table(header: Sequence[str], rows: List[List[str]]) -> str:
    head = "".join(f"<th>{html.escape(h)}</th>" for h in header)
    body = "\n".join("<tr>" + "".join(f"<td>{cell}</td>" for cell in row) + "</tr>" for row in rows)
    return f"<table>\n<tr>{head}</tr>\n{body}\n</table>"


def _metrics_section(frame: pd.DataFrame) -> str:
    rows = [[html.escape(format_cell(record[c])) for c in METRIC_COLUMNS] for record in frame.to_dict("records")]
    return _table(METRIC_COLUMNS, rows)


def _lint_section(findings: Mapping[str, Sequence[Dict[str, Any]]]) -> str:
    rows = []
    for project_id in sorted(findings):
        for finding in findings[project_id]:
            rows.append([
                html.escape(project_id),
                f'<span class="warn">{html.escape(finding["rule"])}</span>',
                html.escape(finding["message"]),
            ])
    if not rows:
        return '<p class="ok">No findings.</p>'
    return _table(("project", "rule", "message"), rows)


def _correlation_section(correlations: Sequence[Dict[str, Any]]) -> str:
    if not correlations:
        return "<p>Not computed.</p>"
    rows = []
    for result in correlations:
        rho = "" if result.get("rho") is None else f"{result['rho']:.4f}"
        rows.append([
            html.escape(result["scope"]), html.escape(result["outcome"]), str(result["n"]),
            rho, html.escape(result.get("note") or ""),
        ])
    return _table(("scope", "outcome", "n", "rho", "note"), rows)


def render_report_html(
    frame: pd.DataFrame,
    lint: Mapping[str, Sequence[Dict[str, Any]]],
    correlations: Sequence[Dict[str, Any]] = (),
    chart_files: Sequence[str] = (),
    theme: Type[BaseTheme] = DarkTheme,
) -> str:
    """
    Render the report page.

    Args:
        frame: Raw metrics rows
        lint: Lint findings per project, as dictionaries
        correlations: Correlation results as dictionaries
        chart_files: Chart file names relative to the report
        theme: Color theme

    Returns:
        The HTML document
    """
    charts = "\n    ".join(
        f'<p><img src="{html.escape(name)}" alt="{html.escape(name)}"></p>' for name in chart_files
    ) or "<p>No charts.</p>"
    return _TEMPLATE.format(
        style=theme.get_report_html_style(),
        version=__version__,
        projects=frame["project_id"].nunique() if len(frame) else 0,
        months=len(frame),
        findings=sum(len(v) for v in lint.values()),
        charts=charts,
        lint=_lint_section(lint),
        correlations=_correlation_section(correlations),
        metrics=_metrics_section(frame),
    )


def write_report(
    out_dir: Union[str, Path],
    frame: pd.DataFrame,
    lint: Mapping[str, Sequence[Dict[str, Any]]],
    correlations: Sequence[Dict[str, Any]] = (),
    chart_files: Sequence[str] = (),
    theme: Type[BaseTheme] = DarkTheme,
    name: Optional[str] = None,
) -> Path:
    path = Path(out_dir) / (name or REPORT_FILE)
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            f.write(render_report_html(frame, lint, correlations, chart_files, theme))
    except OSError as e:
        logger.error(f"Error writing report: {e}", exc_info=True)
        raise IoFailure(path, str(e))
    logger.info(f"Report written: {path}")
    return path
