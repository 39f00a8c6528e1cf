"""
Static SVG line chart of fork entropy and outcomes per month, drawn with
QPainter onto a QSvgGenerator.
"""
import math
import os
import re
from pathlib import Path
from typing import List, Optional, Sequence, Type, Union

import pandas as pd

from forkentropy.errors import IoFailure
from forkentropy.logging_config import get_logger
from forkentropy.report.themes import BaseTheme, DarkTheme

logger = get_logger(__name__)

CHART_SERIES = ("fork_entropy", "external_productivity", "acceptance_rate", "bug_reports")
WIDTH = 880
HEIGHT = 420
MARGIN_LEFT = 60
MARGIN_RIGHT = 240
MARGIN_TOP = 50
MARGIN_BOTTOM = 60

_app = None


def _ensure_gui_application():
    """QPainter text needs a GUI application; run it headless unless told otherwise."""
    global _app
    os.environ.setdefault("QT_QPA_PLATFORM", "offscreen")
    from PySide6.QtGui import QGuiApplication

    if QGuiApplication.instance() is None:
        _app = QGuiApplication([])
    return QGuiApplication.instance()


def chart_file_name(project_id: str) -> str:
    return "entropy_" + re.sub(r"[^A-Za-z0-9._-]+", "_", project_id) + ".svg"


def _scaled(values: pd.Series, column: str):
    """Values mapped to [0, 1]; fork entropy is already there, counts are divided by their max."""
    numeric = pd.to_numeric(values, errors="coerce").astype("float64")
    if column in ("fork_entropy", "acceptance_rate"):
        return numeric, None
    peak = numeric.max(skipna=True)
    if not math.isfinite(peak) or peak <= 0:
        return numeric * 0.0, peak if math.isfinite(peak) else None
    return numeric / peak, peak


def render_chart(
    frame: pd.DataFrame,
    path: Union[str, Path],
    theme: Type[BaseTheme] = DarkTheme,
    series: Sequence[str] = CHART_SERIES,
) -> Path:
    """
    Draw one project's monthly series into an SVG file.

    Args:
        frame: Metrics rows of a single project, one per month
        path: Target .svg file
        theme: Color theme
        series: Columns to plot; missing values leave gaps

    Returns:
        The written path

    Raises:
        IoFailure: If the SVG cannot be written
    """
    _ensure_gui_application()
    from PySide6.QtCore import QPointF, QRectF, QSize, Qt
    from PySide6.QtGui import QColor, QFont, QPainter, QPainterPath, QPen
    from PySide6.QtSvg import QSvgGenerator

    path = Path(path)
    frame = frame.sort_values("month", kind="mergesort").reset_index(drop=True)
    months: List[str] = list(frame["month"])
    project_id = str(frame["project_id"].iloc[0]) if len(frame) else ""

    generator = QSvgGenerator()
    generator.setFileName(str(path))
    generator.setSize(QSize(WIDTH, HEIGHT))
    generator.setViewBox(QRectF(0, 0, WIDTH, HEIGHT))
    generator.setTitle(f"Fork entropy: {project_id}")
    generator.setDescription("Fork entropy and outcomes per month")

    plot = QRectF(MARGIN_LEFT, MARGIN_TOP, WIDTH - MARGIN_LEFT - MARGIN_RIGHT, HEIGHT - MARGIN_TOP - MARGIN_BOTTOM)

    def x_at(i: int) -> float:
        if len(months) <= 1:
            return plot.left() + plot.width() / 2
        return plot.left() + plot.width() * i / (len(months) - 1)

    def y_at(v: float) -> float:
        return plot.bottom() - plot.height() * v

    painter = QPainter()
    if not painter.begin(generator):
        raise IoFailure(path, "cannot open SVG for writing")
    try:
        painter.setRenderHint(QPainter.RenderHint.Antialiasing)
        painter.fillRect(QRectF(0, 0, WIDTH, HEIGHT), QColor(theme.background_color))
        font = QFont("Arial")
        font.setPixelSize(12)
        painter.setFont(font)

        # ---- Title ----
        painter.setPen(QColor(theme.primary_accent))
        painter.drawText(QRectF(MARGIN_LEFT, 10, plot.width(), 30), Qt.AlignmentFlag.AlignLeft, project_id)

        # ---- Grid and axes ----
        for step in range(5):
            value = step / 4
            painter.setPen(QPen(QColor(theme.grid_color), 1))
            painter.drawLine(QPointF(plot.left(), y_at(value)), QPointF(plot.right(), y_at(value)))
            painter.setPen(QColor(theme.muted_text))
            painter.drawText(
                QRectF(0, y_at(value) - 8, MARGIN_LEFT - 8, 16),
                Qt.AlignmentFlag.AlignRight | Qt.AlignmentFlag.AlignVCenter,
                f"{value:.2f}",
            )
        every = max(1, math.ceil(len(months) / 12))
        for i, month in enumerate(months):
            if i % every:
                continue
            painter.drawText(
                QRectF(x_at(i) - 30, plot.bottom() + 8, 60, 16), Qt.AlignmentFlag.AlignHCenter, month,
            )
        painter.setPen(QPen(QColor(theme.border_color), 1))
        painter.drawRect(plot)

        # ---- Series ----
        for index, column in enumerate(series):
            if column not in frame:
                continue
            values, peak = _scaled(frame[column], column)
            color = QColor(theme.series_color(index))
            painter.setPen(QPen(color, 2))
            line = QPainterPath()
            drawing = False
            for i, value in enumerate(values):
                if not math.isfinite(value):
                    drawing = False
                    continue
                point = QPointF(x_at(i), y_at(value))
                if drawing:
                    line.lineTo(point)
                else:
                    line.moveTo(point)
                    drawing = True
                painter.setBrush(color)
                painter.drawEllipse(point, 2.5, 2.5)
            painter.setBrush(Qt.BrushStyle.NoBrush)
            painter.drawPath(line)

            label = column if peak is None else f"{column} (max {peak:g})"
            legend_y = MARGIN_TOP + 20 * index
            painter.drawLine(QPointF(plot.right() + 16, legend_y + 8), QPointF(plot.right() + 36, legend_y + 8))
            painter.setPen(QColor(theme.text_color))
            painter.drawText(QRectF(plot.right() + 42, legend_y, MARGIN_RIGHT - 46, 16), Qt.AlignmentFlag.AlignLeft, label)
    finally:
        painter.end()

    if not path.exists():
        raise IoFailure(path, "SVG generator produced no file")
    logger.info(f"Chart written: {path}")
    return path


def render_charts(
    frame: pd.DataFrame, out_dir: Union[str, Path], theme: Type[BaseTheme] = DarkTheme
) -> List[Path]:
    """One chart per project in the frame, named after the project."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    for project_id, rows in frame.groupby("project_id", sort=True):
        paths.append(render_chart(rows, out_dir / chart_file_name(str(project_id)), theme))
    return paths


def try_render_charts(frame: pd.DataFrame, out_dir: Union[str, Path],
                      theme: Type[BaseTheme] = DarkTheme) -> Optional[List[Path]]:
    """``render_charts``, or None with a warning when the Qt GUI libraries cannot load."""
    try:
        return render_charts(frame, out_dir, theme)
    except ImportError as e:
        logger.warning(f"Charts skipped; Qt GUI libraries unavailable: {e}")
        return None
