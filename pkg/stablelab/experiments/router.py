"""Registry of the experiments and their dispatch."""

import time
from collections.abc import Callable
from logging import Logger
from pathlib import Path

from stablelab.allen_cahn.experiments import run_allen_cahn_layer, run_allen_cahn_saddle
from stablelab.config import get_settings
from stablelab.cones.experiments import run_cone_stability, run_simons_calibration
from stablelab.exceptions import ConfigurationError, OutputError
from stablelab.experiments.checks import ExperimentOutcome
from stablelab.experiments.report import CHECKS_FILE, REPORT_FILE, write_report
from stablelab.experiments.schemas import ExperimentConfig, ExperimentReport
from stablelab.foliation.experiments import run_foliation
from stablelab.gelfand.experiments import run_gelfand_branch
from stablelab.hardy.experiments import run_hardy
from stablelab.isoperimetric.experiments import run_isoperimetric
from stablelab.logger import get_logger

Runner = Callable[..., ExperimentOutcome]

# Experiment name -> (config section, runner)
EXPERIMENTS: dict[str, tuple[str, Runner]] = {
    "simons-calibration": ("simons_calibration", run_simons_calibration),
    "cone-stability": ("cone_stability", run_cone_stability),
    "foliation": ("foliation", run_foliation),
    "hardy": ("hardy", run_hardy),
    "allen-cahn-layer": ("allen_cahn_layer", run_allen_cahn_layer),
    "allen-cahn-saddle": ("allen_cahn_saddle", run_allen_cahn_saddle),
    "gelfand-branch": ("gelfand_branch", run_gelfand_branch),
    "isoperimetric": ("isoperimetric", run_isoperimetric),
}


def get_runner(name: str) -> tuple[str, Runner]:
    """Return the config section and the runner of an experiment.

    Raises:
        ConfigurationError: If the name is unknown; the message lists valid names.

    """
    try:
        return EXPERIMENTS[name]
    except KeyError as e:
        raise ConfigurationError(
            f"Unknown experiment '{name}', valid names: {', '.join(EXPERIMENTS)}"
        ) from e


def run_experiment(
    config: ExperimentConfig, *, logger: Logger | None = None
) -> ExperimentReport:
    """Run the configured experiment and write report.json and checks.csv.

    Args:
        config (ExperimentConfig): Validated configuration.
        logger (Logger | None): Logger, the lab logger when missing.

    Returns:
        ExperimentReport: Checks and artifacts of the run.

    Raises:
        ConfigurationError: If the experiment is unknown.
        OutputError: If the output directory cannot be written.

    """
    settings = get_settings()
    logger = logger or get_logger()
    section, runner = get_runner(config.experiment)
    output_dir = Path(config.output_dir or settings.OUTPUT_DIR)
    tolerance = config.tolerance or settings.DEFAULT_TOLERANCE
    try:
        output_dir.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise OutputError(output_dir, e.strerror or str(e)) from e

    msg = f"Running {config.experiment} in {output_dir} with seed {config.seed}"
    logger.info(msg)
    start = time.perf_counter()
    outcome = runner(
        getattr(config, section),
        tolerance=tolerance,
        seed=config.seed,
        output_dir=output_dir,
        logger=logger,
    )
    wall_clock = time.perf_counter() - start
    report = ExperimentReport(
        experiment=config.experiment,
        passed=outcome.passed,
        config=config.model_dump(mode="json"),
        checks=outcome.checks,
        artifacts=outcome.artifacts,
        wall_clock=wall_clock,
    )
    report.artifacts += [REPORT_FILE, CHECKS_FILE]
    write_report(report, output_dir)

    failed = [c.name for c in report.checks if c.status.value == "fail"]
    msg = f"{config.experiment} finished in {wall_clock:.1f} s"
    if failed:
        msg += f", failed checks: {', '.join(failed)}"
        logger.warning(msg)
    else:
        logger.info(msg)
    return report
