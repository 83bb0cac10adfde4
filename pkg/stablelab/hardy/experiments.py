"""Hardy experiment: sharpness of the constant and the supercritical spectrum."""

from logging import Logger
from pathlib import Path

from stablelab.experiments.artifacts import write_csv
from stablelab.experiments.checks import CheckRecord, ExperimentOutcome
from stablelab.hardy.schemas import HardyParams, RadialTestFunction
from stablelab.hardy.spectral import (
    ground_state_study,
    hardy_constant,
    hardy_quotient,
    hardy_sharpness_probe,
)

HARDY_REFERENCE = "Hardy inequality"
SCAN_DELTAS = (-0.5, -0.25, 0.0, 0.25, 0.5)
SCAN_RHOS = (1e-2, 1e-4, 1e-8)


def _sharpness_checks(params: HardyParams, logger: Logger) -> list[CheckRecord]:
    checks = []
    for n in params.sharpness_dimensions:
        witness = hardy_sharpness_probe(
            n,
            params.sharpness_tolerance,
            deltas=params.deltas,
            rhos=params.rhos,
            nodes_per_decade=params.nodes_per_decade,
            logger=logger,
        )
        checks.append(
            CheckRecord.assertion(
                f"hardy_sharpness_n{n}",
                "(n - 2)^2 / 4 is the best constant in Hardy's inequality",
                witness.converged,
                tolerance=params.sharpness_tolerance,
                **witness.model_dump(),
                reference=HARDY_REFERENCE,
            )
        )
    return checks


def _quotient_check(params: HardyParams) -> CheckRecord:
    n = params.spectral_dimension
    a = hardy_constant(n) + params.quotient_offset
    quotients = [
        hardy_quotient(
            n,
            a,
            RadialTestFunction(alpha=0.5 * (n - 2) + delta, rho=rho),
            nodes_per_decade=params.nodes_per_decade,
        )
        for delta in SCAN_DELTAS
        if 0.5 * (n - 2) + delta > 0
        for rho in SCAN_RHOS
    ]
    lowest = min(quotients)
    return CheckRecord.assertion(
        f"hardy_quotient_scan_n{n}",
        "the Hardy quotient is bounded below when a <= (n - 2)^2 / 4",
        lowest >= params.quotient_floor,
        floor=params.quotient_floor,
        n=n,
        a=a,
        probes=len(quotients),
        min_quotient=lowest,
        reference=HARDY_REFERENCE,
    )


def run_hardy(
    params: HardyParams,
    *,
    tolerance: float,
    seed: int,
    output_dir: Path,
    logger: Logger,
) -> ExperimentOutcome:
    """Probe the sharpness of the Hardy constant and the spectrum of -Laplacian - a/r^2.

    Below the constant mu_1 must stabilize as r_min shrinks, above it mu_1 must drop
    below the divergence threshold at the smallest truncation.
    """
    checks = _sharpness_checks(params, logger)
    checks.append(_quotient_check(params))

    n = params.spectral_dimension
    constant = hardy_constant(n)
    mesh_options = {
        "nodes_per_decade": params.mesh_nodes_per_decade,
        "max_spacing": params.mesh_max_spacing,
    }
    below = ground_state_study(
        n,
        constant + params.subcritical_offset,
        params.rmin_values,
        logger=logger,
        **mesh_options,
    )
    above = ground_state_study(
        n,
        constant + params.supercritical_offset,
        params.rmin_values,
        logger=logger,
        **mesh_options,
    )
    checks.append(
        CheckRecord.assertion(
            f"hardy_subcritical_n{n}",
            "the spectrum stays bounded below when a < (n - 2)^2 / 4",
            below.spread < params.stability_spread,
            tolerance=params.stability_spread,
            n=n,
            a=below.a,
            rmin_values=below.rmin_values,
            eigenvalues=below.eigenvalues,
            spread=below.spread,
            reference=HARDY_REFERENCE,
        )
    )
    smallest = min(range(len(above.rmin_values)), key=lambda i: above.rmin_values[i])
    checks.append(
        CheckRecord.assertion(
            f"hardy_supercritical_n{n}",
            "the spectrum goes to -infinity when a > (n - 2)^2 / 4",
            above.eigenvalues[smallest] < params.divergence_threshold,
            threshold=params.divergence_threshold,
            n=n,
            a=above.a,
            rmin_values=above.rmin_values,
            eigenvalues=above.eigenvalues,
            reference=HARDY_REFERENCE,
        )
    )
    checks.append(
        CheckRecord.observation(
            f"hardy_supercritical_scaling_n{n}",
            "mu_1 r_min^2 above the Hardy constant",
            rmin_values=above.rmin_values,
            mu_times_rmin_squared=above.scaled,
        )
    )
    artifact = write_csv(
        output_dir,
        f"hardy_ground_state_n{n}.csv",
        ["a", "r_min", "mu_1"],
        [
            (study.a, r_min, mu)
            for study in (below, above)
            for r_min, mu in zip(study.rmin_values, study.eigenvalues, strict=True)
        ],
    )
    return ExperimentOutcome(checks=checks, artifacts=[artifact])
