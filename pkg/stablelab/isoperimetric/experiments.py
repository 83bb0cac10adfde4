"""Isoperimetric experiment: Neumann calibration, contact set and ratios."""

import math
from logging import Logger
from pathlib import Path

from stablelab.experiments.artifacts import write_csv
from stablelab.experiments.checks import CheckRecord, ExperimentOutcome
from stablelab.isoperimetric.calibration import (
    contact_set_coverage,
    isoperimetric_ratio,
    sample_directions,
    solve_neumann_calibration,
    write_boundary_polyline,
    write_neumann_checkpoint,
)
from stablelab.isoperimetric.schemas import (
    IsoperimetricParams,
    NeumannSolution,
    PlanarDomain,
)

ISOPERIMETRIC_REFERENCE = "isoperimetric inequality by a Neumann calibration"
DISK_RATIO = 2.0 * math.sqrt(math.pi)
SCALE_TOLERANCE = 1e-8
CONTROL_SAMPLES = 64


def _domains(params: IsoperimetricParams) -> dict[str, PlanarDomain]:
    a, b = params.ellipse_axes
    return {
        "disk": PlanarDomain(kind="disk", radius=params.disk_radius),
        "square": PlanarDomain(
            kind="rectangle", width=params.square_side, height=params.square_side
        ),
        "ellipse": PlanarDomain(kind="ellipse", semi_major=a, semi_minor=b),
    }


def _solution_checks(
    params: IsoperimetricParams, name: str, sol: NeumannSolution
) -> list[CheckRecord]:
    domain = sol.domain
    measured = domain.perimeter / domain.area
    checks = [
        CheckRecord.assertion(
            f"isoperimetric_residual_{name}",
            "u solves Laplacian u = c in Omega with u_nu = 1",
            sol.interior_residual < params.residual_tolerance
            and sol.boundary_residual < params.residual_tolerance
            and abs(sol.mean) < params.residual_tolerance,
            tolerance=params.residual_tolerance,
            interior=sol.interior_residual,
            boundary=sol.boundary_residual,
            mean=sol.mean,
            reference=ISOPERIMETRIC_REFERENCE,
        ),
        CheckRecord.assertion(
            f"isoperimetric_compatibility_{name}",
            "c = |boundary| / |Omega| by the divergence theorem",
            abs(sol.constant - measured) <= params.compatibility_tolerance,
            tolerance=params.compatibility_tolerance,
            c=sol.constant,
            perimeter_over_area=measured,
            discrete_perimeter=sol.discrete_perimeter,
            discrete_area=sol.discrete_area,
            reference=ISOPERIMETRIC_REFERENCE,
        ),
    ]
    if domain.kind == "disk":
        big_r = domain.radius
        error = sol.error_against((sol.x**2 + sol.y**2) / (2.0 * big_r))
        checks.append(
            CheckRecord.assertion(
                "isoperimetric_disk_reference",
                "u = |x|^2 / (2R) up to a constant in the disk of radius R",
                error <= params.reference_tolerance,
                tolerance=params.reference_tolerance,
                max_error=error,
                reference=ISOPERIMETRIC_REFERENCE,
            )
        )
    return checks


def _coverage_checks(
    params: IsoperimetricParams,
    name: str,
    sol: NeumannSolution,
    seed: int,
    logger: Logger,
) -> list[CheckRecord]:
    inside = contact_set_coverage(
        sol,
        sample_directions(params.samples, seed=seed),
        gradient_factor=params.gradient_factor,
    )
    control = contact_set_coverage(
        sol,
        sample_directions(CONTROL_SAMPLES, seed=seed, magnitude=params.control_radius),
        gradient_factor=params.gradient_factor,
    )
    msg = f"Coverage {name}: {inside.model_dump()}, control {control.model_dump()}"
    logger.debug(msg)
    return [
        CheckRecord.assertion(
            f"isoperimetric_coverage_{name}",
            "B_1(0) is contained in grad u(Gamma_u)",
            inside.resolved_covered == inside.resolved > 0,
            tolerance=inside.tolerance,
            samples=inside.samples,
            resolved=inside.resolved,
            resolved_fraction=inside.resolved_fraction,
            fraction=inside.fraction,
            boundary_minimizers=inside.boundary_minimizers,
            max_gradient_gap=inside.max_gradient_gap,
            reference=ISOPERIMETRIC_REFERENCE,
        ),
        CheckRecord.observation(
            f"isoperimetric_coverage_control_{name}",
            "directions with |p| > 1 need not be attained",
            magnitude=params.control_radius,
            samples=control.samples,
            fraction=control.fraction,
            boundary_minimizers=control.boundary_minimizers,
        ),
    ]


def _refinement_check(
    params: IsoperimetricParams,
    domain: PlanarDomain,
    finest: NeumannSolution,
    seed: int,
    logger: Logger,
) -> tuple[CheckRecord, list[list[float]]]:
    directions = sample_directions(params.samples, seed=seed)
    rows = []
    for factor in params.refinement_factors:
        sol = finest
        if factor != 1:
            sol = solve_neumann_calibration(domain, factor * params.step, logger=logger)
        report = contact_set_coverage(
            sol, directions, gradient_factor=params.gradient_factor
        )
        rows.append([sol.step, report.fraction, report.max_gradient_gap])
    rows.sort(key=lambda row: -row[0])
    fractions = [row[1] for row in rows]
    record = CheckRecord.assertion(
        f"isoperimetric_coverage_refinement_{domain.kind}",
        "the covered fraction of B_1(0) does not drop under refinement",
        all(b >= a for a, b in zip(fractions, fractions[1:], strict=False)),
        steps=[row[0] for row in rows],
        fractions=fractions,
        reference=ISOPERIMETRIC_REFERENCE,
    )
    return record, rows


def _ratio_checks(
    params: IsoperimetricParams, domains: dict[str, PlanarDomain]
) -> tuple[list[CheckRecord], list[list]]:
    ratios = {name: isoperimetric_ratio(d) for name, d in domains.items()}
    scaled = {
        name: isoperimetric_ratio(d.scaled(params.scale_factor))
        for name, d in domains.items()
    }
    drift = max(abs(scaled[k] - ratios[k]) for k in ratios)
    ellipse = domains["ellipse"]
    oracle_gap = abs(ellipse.perimeter - ellipse.perimeter_oracle())
    checks = [
        CheckRecord.assertion(
            "isoperimetric_ratio_disk",
            "the disk has |boundary| / |Omega|^(1/2) = 2 sqrt(pi)",
            abs(ratios["disk"] - DISK_RATIO) <= params.ratio_tolerance,
            tolerance=params.ratio_tolerance,
            value=ratios["disk"],
            expected=DISK_RATIO,
            reference=ISOPERIMETRIC_REFERENCE,
        ),
        CheckRecord.assertion(
            "isoperimetric_ratio_square",
            "the square has ratio 4",
            abs(ratios["square"] - 4.0) <= params.ratio_tolerance,
            tolerance=params.ratio_tolerance,
            value=ratios["square"],
            reference=ISOPERIMETRIC_REFERENCE,
        ),
        CheckRecord.assertion(
            "isoperimetric_ratio_ellipse",
            "equality holds only for balls",
            ratios["ellipse"] > DISK_RATIO and oracle_gap <= params.ratio_tolerance,
            tolerance=params.ratio_tolerance,
            value=ratios["ellipse"],
            perimeter=ellipse.perimeter,
            perimeter_oracle=ellipse.perimeter_oracle(),
            reference=ISOPERIMETRIC_REFERENCE,
        ),
        CheckRecord.assertion(
            "isoperimetric_ratio_minimizer",
            "|boundary| / |Omega|^(1/2) >= 2 sqrt(pi), the value of the disk",
            min(ratios, key=ratios.get) == "disk",
            ratios=ratios,
            reference=ISOPERIMETRIC_REFERENCE,
        ),
        CheckRecord.assertion(
            "isoperimetric_ratio_scaling",
            "the ratio is invariant under dilations",
            drift <= SCALE_TOLERANCE,
            tolerance=SCALE_TOLERANCE,
            factor=params.scale_factor,
            max_drift=drift,
            reference=ISOPERIMETRIC_REFERENCE,
        ),
    ]
    rows = [[name, d.perimeter, d.area, ratios[name]] for name, d in domains.items()]
    return checks, rows


def run_isoperimetric(
    params: IsoperimetricParams,
    *,
    tolerance: float,
    seed: int,
    output_dir: Path,
    logger: Logger,
) -> ExperimentOutcome:
    """Calibrate disk, square and ellipse, cover B_1 by grad u and compare ratios."""
    domains = _domains(params)
    checks, artifacts = [], []
    solutions = {}
    for name, domain in domains.items():
        sol = solve_neumann_calibration(domain, params.step, logger=logger)
        solutions[name] = sol
        checks += _solution_checks(params, name, sol)
        artifacts.append(
            write_boundary_polyline(
                domain,
                output_dir,
                f"isoperimetric_boundary_{name}.csv",
                params.polyline_fraction,
            )
        )
        if params.checkpoint:
            checkpoint = f"isoperimetric_neumann_{name}.txt"
            write_neumann_checkpoint(sol, output_dir / checkpoint)
            artifacts.append(checkpoint)

    for name in ("disk", "ellipse"):
        checks += _coverage_checks(params, name, solutions[name], seed, logger)
    record, rows = _refinement_check(
        params, domains["ellipse"], solutions["ellipse"], seed, logger
    )
    checks.append(record)
    artifacts.append(
        write_csv(
            output_dir,
            "isoperimetric_coverage_refinement.csv",
            ["h", "fraction", "max_gradient_gap"],
            rows,
        )
    )

    ratio_checks, ratio_rows = _ratio_checks(params, domains)
    checks += ratio_checks
    artifacts.append(
        write_csv(
            output_dir,
            "isoperimetric_ratios.csv",
            ["domain", "perimeter", "area", "ratio"],
            ratio_rows,
        )
    )
    return ExperimentOutcome(checks=checks, artifacts=artifacts)
