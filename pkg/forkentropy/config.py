"""
Configuration management for the fork-entropy toolkit.

Run knobs live in ``RunConfig``; precedence is built-in defaults < JSON config
file < command-line flags. Environment variables only supply the forge token,
the forge endpoint settings and the log level.
"""
import json
import math
import os
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Tuple, Union

from forkentropy.errors import ConfigError
from forkentropy.logging_config import get_logger

logger = get_logger(__name__)

ROLE_CUTOFFS = ("interval_end", "interval_start", "fork_created")
HOT_FILE_REFERENCES = ("interval_start", "pr_created")
THEMES = ("dark", "light")


@dataclass(frozen=True)
class LintThresholds:
    """Dataset selection thresholds used by the lint rules."""

    active_forks: int = 100
    issues: int = 100
    external_pull_requests: int = 100


@dataclass(frozen=True)
class RunConfig:
    """Effective configuration of one pipeline run."""

    datasets: Tuple[str, ...] = ()
    out: str = "out"
    gamma: float = 1.0
    granularity: str = "month"
    hot_window_days: int = 90
    outlier_fraction: float = 0.01
    lint: LintThresholds = field(default_factory=LintThresholds)
    role_cutoff: str = "interval_end"
    hot_file_reference: str = "interval_start"
    jobs: int = 1
    use_snapshot_cache: bool = False
    interaction_terms: bool = False
    theme: str = "dark"

    def validate(self) -> "RunConfig":
        """
        Check every knob against its allowed range.

        Returns:
            self, so calls can be chained

        Raises:
            ConfigError: On the first invalid knob
        """
        if not isinstance(self.gamma, (int, float)) or not math.isfinite(self.gamma) or self.gamma <= 0:
            raise ConfigError(f"gamma must be a positive finite number, got {self.gamma!r}", knob="gamma")
        if self.granularity != "month":
            raise ConfigError(
                f"Only calendar-month granularity is supported, got {self.granularity!r}", knob="granularity"
            )
        if int(self.hot_window_days) <= 0:
            raise ConfigError("hot_window_days must be positive", knob="hot_window_days")
        if not 0 <= float(self.outlier_fraction) < 0.5:
            raise ConfigError("outlier_fraction must lie in [0, 0.5)", knob="outlier_fraction")
        if int(self.jobs) <= 0:
            raise ConfigError("jobs must be positive", knob="jobs")
        for name in ("active_forks", "issues", "external_pull_requests"):
            if int(getattr(self.lint, name)) <= 0:
                raise ConfigError(f"lint.{name} must be positive", knob=f"lint.{name}")
        if self.role_cutoff not in ROLE_CUTOFFS:
            raise ConfigError(f"role_cutoff must be one of {ROLE_CUTOFFS}", knob="role_cutoff")
        if self.hot_file_reference not in HOT_FILE_REFERENCES:
            raise ConfigError(
                f"hot_file_reference must be one of {HOT_FILE_REFERENCES}", knob="hot_file_reference"
            )
        if self.theme not in THEMES:
            raise ConfigError(f"theme must be one of {THEMES}", knob="theme")
        return self

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["datasets"] = list(self.datasets)
        return data

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def merged(self, overrides: Mapping[str, Any]) -> "RunConfig":
        """
        Return a copy with ``overrides`` applied; ``None`` values are skipped.

        Nested lint thresholds may be given either as a ``lint`` mapping or as
        ``lint_<name>`` keys.
        """
        known = {f.name for f in fields(self)}
        changes: Dict[str, Any] = {}
        lint_changes: Dict[str, Any] = {}
        for key, value in overrides.items():
            if value is None:
                continue
            if key == "lint":
                if not isinstance(value, Mapping):
                    raise ConfigError("'lint' must be an object", knob="lint")
                lint_changes.update(value)
            elif key.startswith("lint_"):
                lint_changes[key[len("lint_"):]] = value
            elif key in known:
                changes[key] = tuple(value) if key == "datasets" else value
            else:
                raise ConfigError(f"Unknown configuration key: {key}", knob=key)
        if lint_changes:
            lint_known = {f.name for f in fields(LintThresholds)}
            unknown = set(lint_changes) - lint_known
            if unknown:
                raise ConfigError(f"Unknown lint thresholds: {sorted(unknown)}", knob="lint")
            changes["lint"] = replace(self.lint, **{k: int(v) for k, v in lint_changes.items()})
        return replace(self, **changes)


def load_config_file(path: Union[str, Path]) -> Dict[str, Any]:
    """
    Load a JSON configuration file.

    Raises:
        ConfigError: If the file cannot be read or is not a JSON object
    """
    config_path = Path(path)
    try:
        with open(config_path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except FileNotFoundError:
        raise ConfigError(f"Config file not found: {config_path}", path=str(config_path))
    except (OSError, json.JSONDecodeError) as e:
        logger.error(f"Error loading config: {e}")
        raise ConfigError(f"Cannot read config file {config_path}: {e}", path=str(config_path))
    if not isinstance(data, dict):
        raise ConfigError("Config file must contain a JSON object", path=str(config_path))
    logger.debug(f"Loaded config from {config_path}")
    return data


def build_run_config(
    config_file: Optional[Union[str, Path]] = None,
    overrides: Optional[Mapping[str, Any]] = None,
) -> RunConfig:
    """
    Resolve the effective run configuration.

    Args:
        config_file: Optional JSON config file layered over the defaults
        overrides: Command-line values layered last (``None`` means not given)

    Returns:
        A validated RunConfig
    """
    config = RunConfig()
    if config_file:
        config = config.merged(load_config_file(config_file))
    if overrides:
        config = config.merged(overrides)
    return config.validate()


class ForgeConfig:
    """Forge REST API configuration."""

    DEFAULT_API_BASE_URL = "https://api.github.com"
    DEFAULT_TIMEOUT = 30.0
    DEFAULT_WORKERS = 4
    TOKEN_VARIABLES = ("FORKENTROPY_TOKEN", "GITHUB_TOKEN")

    @staticmethod
    def get_api_base_url() -> str:
        """
        Get the API base URL from environment or use default.

        Environment variable: FORKENTROPY_API_BASE_URL

        Returns:
            Base URL without trailing slash
        """
        url = os.getenv("FORKENTROPY_API_BASE_URL", ForgeConfig.DEFAULT_API_BASE_URL).rstrip("/")
        logger.debug(f"Using API base URL: {url}")
        return url

    @staticmethod
    def get_timeout() -> float:
        """
        Get the per-request timeout in seconds.

        Environment variable: FORKENTROPY_TIMEOUT
        """
        raw = os.getenv("FORKENTROPY_TIMEOUT")
        if raw is None:
            return ForgeConfig.DEFAULT_TIMEOUT
        try:
            timeout = float(raw)
        except ValueError:
            raise ConfigError(f"FORKENTROPY_TIMEOUT must be a number, got {raw!r}", knob="FORKENTROPY_TIMEOUT")
        if timeout <= 0:
            raise ConfigError("FORKENTROPY_TIMEOUT must be positive", knob="FORKENTROPY_TIMEOUT")
        return timeout

    @staticmethod
    def get_token() -> Optional[str]:
        """
        Get the forge token, if any.

        Environment variables: FORKENTROPY_TOKEN, then GITHUB_TOKEN

        Returns:
            The token, or None for anonymous access
        """
        for name in ForgeConfig.TOKEN_VARIABLES:
            token = os.getenv(name)
            if token:
                logger.debug(f"Using forge token from {name}")
                return token
        logger.debug("No forge token configured; using anonymous access")
        return None
