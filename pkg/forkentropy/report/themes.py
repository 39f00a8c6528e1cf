"""
Color themes for the SVG chart and the HTML report.

To add a theme, subclass BaseTheme, override the colors and register the class
in AVAILABLE_THEMES (and its name in ``config.THEMES``).
"""
from typing import Dict, Type


class BaseTheme:
    """Colors used by the chart and the report; subclasses override what differs."""

    name = "base"

    # Page
    background_color = "#2b2b2b"
    text_color = "#e0e0e0"
    border_color = "#3c3c3c"
    muted_text = "#888888"

    # Status colors
    success_color = "#4caf50"
    warning_color = "#ff9800"
    error_color = "#f44336"

    # Accent
    primary_accent = "#3498db"

    # Chart
    grid_color = "#3c3c3c"
    series_colors = ("#4a9eff", "#ffa726", "#66bb6a", "#ef5350")

    @classmethod
    def series_color(cls, index: int) -> str:
        return cls.series_colors[index % len(cls.series_colors)]

    @classmethod
    def get_report_html_style(cls) -> str:
        """CSS for the HTML report (theme-aware)."""
        return f"""
    <style>
        body {{
            font-family: Arial, sans-serif;
            background-color: {cls.background_color};
            color: {cls.text_color};
            line-height: 1.5;
            padding: 20px;
            margin: 0;
        }}
        .header {{
            border-bottom: 2px solid {cls.primary_accent};
            padding-bottom: 10px;
            margin-bottom: 20px;
        }}
        .header h1 {{
            margin: 0;
            color: {cls.primary_accent};
            font-size: 24px;
        }}
        .header p {{
            margin: 5px 0 0 0;
            color: {cls.muted_text};
            font-size: 14px;
        }}
        h2 {{
            color: {cls.primary_accent};
            margin-top: 25px;
        }}
        table {{
            border-collapse: collapse;
            margin: 10px 0;
            font-family: 'Courier New', monospace;
            font-size: 13px;
        }}
        th {{
            border: 1px solid {cls.primary_accent};
            padding: 6px;
            background: rgba(52, 152, 219, 0.2);
        }}
        td {{
            border: 1px solid {cls.border_color};
            padding: 6px;
            text-align: right;
        }}
        tr:nth-child(even) {{
            background: rgba(127, 140, 141, 0.1);
        }}
        .warn {{ color: {cls.warning_color}; font-weight: bold; }}
        .error {{ color: {cls.error_color}; font-weight: bold; }}
        .ok {{ color: {cls.success_color}; }}
    </style>"""


class DarkTheme(BaseTheme):
    """Default theme."""

    name = "dark"


class LightTheme(BaseTheme):
    """White background, for printed reports."""

    name = "light"

    background_color = "#ffffff"
    text_color = "#212121"
    border_color = "#cccccc"
    muted_text = "#666666"

    success_color = "#388e3c"
    warning_color = "#f57c00"
    error_color = "#d32f2f"

    primary_accent = "#2196f3"

    grid_color = "#e0e0e0"
    series_colors = ("#1976d2", "#f57c00", "#388e3c", "#d32f2f")


# Theme registry
AVAILABLE_THEMES: Dict[str, Type[BaseTheme]] = {
    "dark": DarkTheme,
    "light": LightTheme,
}


def get_theme(theme_name: str) -> Type[BaseTheme]:
    """
    Get a theme by name.

    Args:
        theme_name: Theme identifier (e.g. 'dark', 'light')

    Returns:
        Theme class (defaults to DarkTheme if not found)
    """
    return AVAILABLE_THEMES.get(theme_name.lower(), DarkTheme)
