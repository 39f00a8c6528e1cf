"""
Rendering of compute results: SVG charts and the HTML report.

Chart rendering imports Qt lazily, so this package loads without GUI libraries.
"""
from forkentropy.report.chart import chart_file_name, render_chart, render_charts, try_render_charts
from forkentropy.report.html import REPORT_FILE, render_report_html, write_report
from forkentropy.report.themes import AVAILABLE_THEMES, get_theme

__all__ = [
    "AVAILABLE_THEMES",
    "REPORT_FILE",
    "chart_file_name",
    "get_theme",
    "render_chart",
    "render_charts",
    "render_report_html",
    "try_render_charts",
    "write_report",
]
