"""
fork-entropy - command-line entry point.

Subcommands: fetch, validate, compute, entropy, what-if, export, report.
Results go to stdout; logs and machine-readable errors go to stderr.
"""
import argparse
import json
import sys
from datetime import timezone
from typing import Any, Dict, Optional, Sequence

from forkentropy import __version__
from forkentropy.config import HOT_FILE_REFERENCES, ROLE_CUTOFFS, THEMES, ForgeConfig, RunConfig, build_run_config
from forkentropy.dataset.records import parse_timestamp
from forkentropy.errors import EXIT_OK, EXIT_UNEXPECTED, ConfigError, ForkEntropyError
from forkentropy.forge.fetcher import RESOURCES, FetchPlan, fetch
from forkentropy.logging_config import get_logger, setup_logging
from forkentropy import pipeline

logger = get_logger(__name__)


def _add_run_flags(parser: argparse.ArgumentParser) -> None:
    """Flags shared by every subcommand; ``None`` defaults mean "not given"."""
    parser.add_argument("--config", help="JSON config file (flags override it)")
    parser.add_argument("--print-config", action="store_true", help="print the effective configuration and exit")
    parser.add_argument("--dataset", action="append", dest="datasets", metavar="DIR",
                        help="dataset directory (repeatable)")
    parser.add_argument("--out", help="output directory")
    parser.add_argument("--gamma", type=float, help="kernel bandwidth (default 1)")
    parser.add_argument("--hot-window-days", type=int, help="hot-file window in days (default 90)")
    parser.add_argument("--outlier-fraction", type=float, help="upper-tail trim per outcome (default 0.01)")
    parser.add_argument("--jobs", type=int, help="parallel snapshot workers (default 1)")
    parser.add_argument("--role-cutoff", choices=ROLE_CUTOFFS)
    parser.add_argument("--hot-file-reference", choices=HOT_FILE_REFERENCES)
    parser.add_argument("--snapshot-cache", action="store_true", default=None, dest="use_snapshot_cache",
                        help="reuse cached snapshots and matrices")
    parser.add_argument("--interaction-terms", action="store_true", default=None,
                        help="also export design.csv with entropy x control products")
    parser.add_argument("--theme", choices=THEMES)
    parser.add_argument("--lint-active-forks", type=int, dest="lint_active_forks")
    parser.add_argument("--lint-issues", type=int, dest="lint_issues")
    parser.add_argument("--lint-external-pull-requests", type=int, dest="lint_external_pull_requests")
    parser.add_argument("--log-level", help="DEBUG, INFO, WARNING or ERROR (default INFO)")
    parser.add_argument("--log-file", help="also log to this file at DEBUG level")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="forkentropy",
        description="Fork entropy and pull-based development metrics from forge event data.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    p = commands.add_parser("fetch", help="fetch a repository's fork network into a dataset directory")
    _add_run_flags(p)
    p.add_argument("--repo", required=True, help="owner/name of the source repository")
    p.add_argument("--api-base-url", help="API base URL (default FORKENTROPY_API_BASE_URL or GitHub)")
    p.add_argument("--resources", help=f"comma-separated subset of {','.join(RESOURCES)}")
    p.add_argument("--since", help="only commits and issues at or after this UTC timestamp")
    p.add_argument("--max-depth", type=int, help="fork discovery depth (default unlimited)")
    p.add_argument("--max-requests", type=int, help="request budget; stop with a partial fetch when spent")
    p.add_argument("--workers", type=int, default=ForgeConfig.DEFAULT_WORKERS, help="concurrent detail requests")

    p = commands.add_parser("validate", help="validate dataset directories and run lint rules")
    _add_run_flags(p)

    p = commands.add_parser("compute", help="compute monthly metrics, lint report and charts")
    _add_run_flags(p)

    p = commands.add_parser("entropy", help="fork entropy of a matrix file")
    _add_run_flags(p)
    p.add_argument("--matrix", required=True, help="matrix NDJSON file")

    p = commands.add_parser("what-if", help="effect of adding one fork to a matrix")
    _add_run_flags(p)
    p.add_argument("--matrix", required=True, help="matrix NDJSON file")
    p.add_argument("--row", required=True, help="new fork as path=lines,path=lines")

    p = commands.add_parser("export", help="prepare the regression table from metrics.csv")
    _add_run_flags(p)
    p.add_argument("--metrics", help="metrics CSV (default <out>/metrics.csv)")

    p = commands.add_parser("report", help="render charts and report.html from compute output")
    _add_run_flags(p)
    p.add_argument("--input", help="compute output directory (default --out)")
    return parser


_RUN_KEYS = (
    "datasets", "out", "gamma", "hot_window_days", "outlier_fraction", "jobs", "role_cutoff",
    "hot_file_reference", "use_snapshot_cache", "interaction_terms", "theme",
    "lint_active_forks", "lint_issues", "lint_external_pull_requests",
)


def resolve_config(args: argparse.Namespace) -> RunConfig:
    overrides: Dict[str, Any] = {key: getattr(args, key, None) for key in _RUN_KEYS}
    return build_run_config(args.config, overrides)


def _print_json(payload: Any) -> None:
    print(json.dumps(payload, indent=2, sort_keys=True))


def _fetch_plan(args: argparse.Namespace) -> FetchPlan:
    resources = frozenset(RESOURCES)
    if args.resources:
        resources = frozenset(r.strip() for r in args.resources.split(",") if r.strip())
    since = None
    if args.since:
        try:
            since = parse_timestamp(args.since).astimezone(timezone.utc)
        except ValueError as e:
            raise ConfigError(f"--since is not a UTC timestamp: {e}", knob="since")
    return FetchPlan(
        api_base_url=args.api_base_url or ForgeConfig.get_api_base_url(),
        full_name=args.repo,
        resources=resources,
        since=since,
        token=ForgeConfig.get_token(),
        max_depth=args.max_depth,
        max_requests=args.max_requests,
        workers=args.workers,
    ).validate()


def dispatch(args: argparse.Namespace) -> int:
    config = resolve_config(args)
    if args.print_config:
        print(config.to_json())
        return EXIT_OK

    if args.command == "fetch":
        if len(config.datasets) != 1:
            raise ConfigError("fetch needs exactly one --dataset output directory", knob="datasets")
        report = fetch(_fetch_plan(args), config.datasets[0])
        _print_json(report.to_dict())
    elif args.command == "validate":
        _print_json(pipeline.run_validate(config))
    elif args.command == "compute":
        result = pipeline.run_pipeline(config)
        _print_json({"rows": len(result.rows), "written": [str(p) for p in result.written]})
    elif args.command == "entropy":
        print(f"{pipeline.run_entropy(args.matrix, config.gamma).value:.10f}")
    elif args.command == "what-if":
        a = pipeline.run_what_if(args.matrix, args.row, config.gamma)
        print(f"mean_distance   {a.mean_distance:.10f}")
        print(f"entropy_before  {a.entropy_before:.10f}")
        print(f"entropy_after   {a.entropy_after:.10f}")
        print(f"delta           {a.delta:+.10f}")
        print(f"approx_delta    {a.approx_delta:+.10f}")
        print(f"label           {a.label.value}")
    elif args.command == "export":
        exported = pipeline.run_export(config, args.metrics)
        _print_json({"rows": len(exported.table), "written": [str(p) for p in exported.written]})
    elif args.command == "report":
        print(pipeline.run_report(config, args.input))
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Main entry point. Returns the process exit code.

    Exit codes: 0 success, 2 validation/config failure, 3 fetch failure,
    1 anything unexpected.
    """
    parser = build_parser()
    args = parser.parse_args(list(argv) if argv is not None else None)
    setup_logging(args.log_level, args.log_file)
    logger.debug(f"forkentropy {__version__}: {args.command}")

    try:
        return dispatch(args)
    except ForkEntropyError as e:
        logger.error(f"{e.kind}: {e}")
        print(e.to_json(), file=sys.stderr)
        return e.exit_code
    except Exception as e:
        logger.critical(f"Fatal error in {args.command}: {e}", exc_info=True)
        payload: Dict[str, Any] = {"kind": "unexpected", "message": str(e), "context": {"type": type(e).__name__}}
        print(json.dumps(payload, sort_keys=True), file=sys.stderr)
        return EXIT_UNEXPECTED


if __name__ == "__main__":
    sys.exit(main())
