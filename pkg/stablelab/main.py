"""Command line entry point of the lab."""

import argparse
import json
import sys
import tomllib
from collections.abc import Sequence
from pathlib import Path
from typing import Any

from pydantic import ValidationError

from stablelab.config import LogLevelEnum, ReportFormatEnum, get_settings
from stablelab.exceptions import (
    EXIT_FAILED_CHECK,
    EXIT_OK,
    ConfigurationError,
    OutputError,
    exit_code_for,
)
from stablelab.experiments.report import emit_report
from stablelab.experiments.router import EXPERIMENTS, run_experiment
from stablelab.experiments.schemas import ExperimentConfig
from stablelab.logger import get_logger


def load_config(
    path: Path | None,
    *,
    experiment: str | None = None,
    output_dir: Path | None = None,
) -> ExperimentConfig:
    """Read a TOML or JSON configuration and apply the command line overrides.

    A missing path gives the default configuration.

    Raises:
        ConfigurationError: If the file cannot be read or parsed.
        ValidationError: If a key is unknown or a value is invalid.

    """
    data: dict[str, Any] = {}
    if path is not None:
        try:
            text = Path(path).read_text()
        except OSError as e:
            raise ConfigurationError(
                f"Cannot read configuration '{path}': {e.strerror or e}"
            ) from e
        try:
            data = json.loads(text) if path.suffix == ".json" else tomllib.loads(text)
        except (json.JSONDecodeError, tomllib.TOMLDecodeError) as e:
            raise ConfigurationError(f"Malformed configuration '{path}': {e}") from e
    if experiment is not None:
        data["experiment"] = experiment
    if output_dir is not None:
        data["output_dir"] = str(output_dir)
    return ExperimentConfig.model_validate(data)


def build_parser() -> argparse.ArgumentParser:
    """Return the argument parser of the stablelab command."""
    parser = argparse.ArgumentParser(
        prog="stablelab",
        description="Run a numerical experiment on stable solutions and report the "
        "checks. Exit code 0 when every assertion holds, 1 when one fails, 2 on "
        "configuration or output errors.",
    )
    parser.add_argument(
        "--config", type=Path, default=None, help="TOML or JSON configuration file"
    )
    parser.add_argument(
        "--experiment",
        default=None,
        help=f"Override the configured experiment: {', '.join(EXPERIMENTS)}",
    )
    parser.add_argument(
        "--out", type=Path, default=None, help="Override the output directory"
    )
    parser.add_argument(
        "--format",
        choices=[f.value for f in ReportFormatEnum],
        default=None,
        help="Report printed on stdout, Settings.REPORT_FORMAT by default",
    )
    parser.add_argument(
        "--log-level",
        choices=[level.name for level in LogLevelEnum],
        default=None,
        help="Override Settings.LOG_LEVEL",
    )
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    """Run the command line and return the exit code."""
    args = build_parser().parse_args(argv)
    settings = get_settings()
    level = LogLevelEnum[args.log_level] if args.log_level else settings.LOG_LEVEL
    logger = get_logger(log_level=level)
    fmt = ReportFormatEnum(args.format or settings.REPORT_FORMAT)
    try:
        config = load_config(
            args.config, experiment=args.experiment, output_dir=args.out
        )
        report = run_experiment(config, logger=logger)
    except (ConfigurationError, OutputError, ValidationError) as e:
        print(getattr(e, "message", str(e)), file=sys.stderr)
        return exit_code_for(e)
    sys.stdout.write(emit_report(report, fmt))
    return EXIT_OK if report.passed else EXIT_FAILED_CHECK


if __name__ == "__main__":
    raise SystemExit(main())
