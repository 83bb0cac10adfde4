"""Allen-Cahn experiments: the layer solution and the saddle solution."""

from logging import Logger
from pathlib import Path

from stablelab.allen_cahn.layer import layer_check, minimality_comparison
from stablelab.allen_cahn.saddle import (
    energy_growth_fit,
    monotonicity_violations,
    sign_violations,
    solve_saddle,
    supersolution_check,
    write_saddle_checkpoint,
)
from stablelab.allen_cahn.schemas import (
    LAYER_ENERGY,
    AllenCahnLayerParams,
    AllenCahnSaddleParams,
    SaddleField,
)
from stablelab.experiments.artifacts import write_csv
from stablelab.experiments.checks import CheckRecord, ExperimentOutcome

LAYER_REFERENCE = "one-dimensional Allen-Cahn layer"
SADDLE_REFERENCE = "saddle-shaped solution of the Allen-Cahn equation"
FAR_FIELD_GAP = 0.01
ENERGY_TOLERANCE = 1e-6
REFINEMENT_FACTORS = (4, 2, 1)
MIRROR_TOLERANCE = 1e-12


def run_allen_cahn_layer(
    params: AllenCahnLayerParams,
    *,
    tolerance: float,
    seed: int,
    output_dir: Path,
    logger: Logger,
) -> ExperimentOutcome:
    """Check the layer solution and compare it with the competitors v_R."""
    layer = layer_check(half_width=params.half_width, nodes=params.nodes)
    checks = [
        CheckRecord.assertion(
            "allen_cahn_layer_residual",
            "u*(y) = tanh(y / sqrt(2)) solves -u'' = u - u^3",
            layer.max_residual < params.residual_tolerance,
            tolerance=params.residual_tolerance,
            max_residual=layer.max_residual,
            odd_defect=layer.odd_defect,
            reference=LAYER_REFERENCE,
        ),
        CheckRecord.assertion(
            "allen_cahn_layer_energy",
            "the layer has energy 2 sqrt(2) / 3 per unit area",
            abs(layer.energy - LAYER_ENERGY) <= ENERGY_TOLERANCE
            and abs(layer.oracle - LAYER_ENERGY) <= ENERGY_TOLERANCE,
            tolerance=ENERGY_TOLERANCE,
            energy=layer.energy,
            oracle=layer.oracle,
            closed_form=LAYER_ENERGY,
            reference=LAYER_REFERENCE,
        ),
    ]

    n = params.minimality_dimension
    comparisons = []
    for radius in params.minimality_radii:
        comparisons.append(
            minimality_comparison(n, radius, step=params.minimality_step)
        )
        msg = f"Minimality n={n}, R={radius}: {comparisons[-1].model_dump()}"
        logger.debug(msg)
    checks.append(
        CheckRecord.assertion(
            f"allen_cahn_layer_minimality_n{n}",
            "the layer is a minimizer: E_{B_R}(u) <= E_{B_R}(v_R)",
            all(c.energy_u <= c.energy_v for c in comparisons)
            and all(c.energy_v_inner == 0 for c in comparisons),
            radii=params.minimality_radii,
            energy_u=[c.energy_u for c in comparisons],
            energy_v=[c.energy_v for c in comparisons],
            energy_v_inner=[c.energy_v_inner for c in comparisons],
            reference=LAYER_REFERENCE,
        )
    )
    scaled = [c.scaled_energy for c in comparisons]
    checks.append(
        CheckRecord.assertion(
            f"allen_cahn_layer_growth_n{n}",
            "E_{B_R}(u) <= C R^(n - 1)",
            max(scaled) <= params.growth_spread * min(scaled),
            tolerance=params.growth_spread,
            radii=params.minimality_radii,
            scaled_energy=scaled,
            reference=LAYER_REFERENCE,
        )
    )
    artifact = write_csv(
        output_dir,
        f"allen_cahn_minimality_n{n}.csv",
        ["R", "energy_u", "energy_v", "energy_u_over_R_n_minus_1"],
        [(c.radius, c.energy_u, c.energy_v, c.scaled_energy) for c in comparisons],
    )
    return ExperimentOutcome(checks=checks, artifacts=[artifact])


def _solve(
    params: AllenCahnSaddleParams, m: int, length: float, step: float, logger: Logger
) -> SaddleField:
    return solve_saddle(
        m,
        length,
        step,
        params.tol,
        params.max_iter,
        method=params.method,
        logger=logger,
    )


def _saddle_checks(
    params: AllenCahnSaddleParams, field: SaddleField
) -> list[CheckRecord]:
    n = 2 * field.m
    far = field.query(field.length, 0.0)
    mirrored = max(
        abs(field.query(t, s) + field.query(s, t))
        for s, t in ((1.0, 0.3), (2.5, 1.7), (0.5 * field.length, 0.2 * field.length))
    )
    return [
        CheckRecord.assertion(
            f"saddle_residual_n{n}",
            "the saddle solution solves the Allen-Cahn equation in (s, t)",
            field.converged,
            tolerance=params.tol,
            residual=field.residual,
            iterations=field.iterations,
            residual_history=field.residual_history,
            reference=SADDLE_REFERENCE,
        ),
        CheckRecord.assertion(
            f"saddle_sign_n{n}",
            "u > 0 in {s > t} and |u| < 1",
            sign_violations(field) == 0,
            violations=sign_violations(field),
            reference=SADDLE_REFERENCE,
        ),
        CheckRecord.assertion(
            f"saddle_far_field_n{n}",
            "u approaches the layer away from the Simons cone",
            abs(far - 1.0) <= FAR_FIELD_GAP,
            tolerance=FAR_FIELD_GAP,
            value=far,
            reference=SADDLE_REFERENCE,
        ),
        CheckRecord.assertion(
            f"saddle_odd_n{n}",
            "u vanishes on the Simons cone and is odd under s <-> t",
            mirrored <= MIRROR_TOLERANCE,
            tolerance=MIRROR_TOLERANCE,
            max_mirror_sum=mirrored,
            reference=SADDLE_REFERENCE,
        ),
        CheckRecord.assertion(
            f"saddle_monotone_n{n}",
            "u is nondecreasing along (1, -1)",
            monotonicity_violations(field) == 0,
            violations=monotonicity_violations(field),
            reference=SADDLE_REFERENCE,
        ),
    ]


def _growth_checks(
    params: AllenCahnSaddleParams, field: SaddleField, logger: Logger
) -> tuple[list[CheckRecord], list[list[float]]]:
    m = field.m
    target = 2 * m - 1
    growth = energy_growth_fit(field, params.energy_radii)
    exponents = []
    for factor in REFINEMENT_FACTORS[:-1]:
        coarse = _solve(params, m, params.length, factor * params.step, logger)
        exponents.append(energy_growth_fit(coarse, params.energy_radii).exponent)
    exponents.append(growth.exponent)
    errors = [abs(e - target) for e in exponents]
    changes = [abs(b - a) for a, b in zip(exponents, exponents[1:], strict=False)]
    pairs = zip(growth.energies, growth.energies[1:], strict=False)
    nondecreasing = all(b >= a for a, b in pairs)
    checks = [
        CheckRecord.assertion(
            f"saddle_energy_growth_n{2 * m}",
            "E_{B_R}(u) <= C R^(n - 1)",
            abs(growth.exponent - target) <= params.exponent_window
            and nondecreasing,
            tolerance=params.exponent_window,
            radii=growth.radii,
            energies=growth.energies,
            exponent=growth.exponent,
            expected=target,
            reference=SADDLE_REFERENCE,
        ),
        CheckRecord.assertion(
            f"saddle_energy_refinement_n{2 * m}",
            "the growth exponent approaches n - 1 under refinement",
            all(b < a for a, b in zip(changes, changes[1:], strict=False))
            and errors[-1] <= params.exponent_window,
            tolerance=params.exponent_window,
            steps=[f * params.step for f in REFINEMENT_FACTORS],
            exponents=exponents,
            changes=changes,
            errors=errors,
            monotone=all(b <= a for a, b in zip(errors, errors[1:], strict=False)),
            reference=SADDLE_REFERENCE,
        ),
    ]
    rows = [[r, e] for r, e in zip(growth.radii, growth.energies, strict=True)]
    return checks, rows


def _supersolution_records(
    params: AllenCahnSaddleParams, field: SaddleField, logger: Logger
) -> tuple[CheckRecord, list[list[float]]]:
    n = 2 * field.m
    report = supersolution_check(
        field,
        params.b_values,
        tol=params.defect_tolerance,
        axis_margin=params.axis_margin,
        far_fraction=params.far_fraction,
        refine_steps=params.refine_steps,
        probes=params.probes,
        logger=logger,
    )
    quotients = [q.quotient for q in report.quotients]
    values = {
        "n": n,
        "samples": report.samples,
        "witness": report.witness.model_dump() if report.witness else None,
        "quotients": quotients,
        "annuli": [[q.inner, q.outer] for q in report.quotients],
    }
    if field.m == params.stability_m:
        record = CheckRecord.assertion(
            f"saddle_stability_n{n}",
            "the saddle solution is stable in R^(2m) when 2m >= 14",
            report.witness is not None
            and all(q >= -params.defect_tolerance for q in quotients),
            tolerance=params.defect_tolerance,
            **values,
            reference=SADDLE_REFERENCE,
        )
    else:
        record = CheckRecord.observation(
            f"saddle_supersolution_scan_n{n}",
            "positive supersolutions phi of the linearized equation",
            **values,
        )
    rows = [
        [p.b, p.min_phi, p.max_defect, p.max_defect_direct] for p in report.probes
    ]
    return record, rows


def run_allen_cahn_saddle(
    params: AllenCahnSaddleParams,
    *,
    tolerance: float,
    seed: int,
    output_dir: Path,
    logger: Logger,
) -> ExperimentOutcome:
    """Solve the saddle solution, check its properties and test its stability.

    The field of dimension 2m is checked for sign, symmetry, monotonicity and energy
    growth; the field of dimension 2 stability_m carries the supersolution test.
    """
    field = _solve(params, params.m, params.length, params.step, logger)
    checks = _saddle_checks(params, field)
    growth, energy_rows = _growth_checks(params, field, logger)
    checks += growth
    artifacts = [
        write_csv(
            output_dir,
            f"saddle_energy_m{params.m}.csv",
            ["R", "energy"],
            energy_rows,
        )
    ]

    fields = [field]
    stability = (params.stability_m, params.stability_length, params.stability_step)
    if stability != (params.m, params.length, params.step):
        fields.append(_solve(params, *stability, logger))
        checks.append(_saddle_checks(params, fields[-1])[0])
    for item in fields:
        record, rows = _supersolution_records(params, item, logger)
        checks.append(record)
        artifacts.append(
            write_csv(
                output_dir,
                f"saddle_supersolution_m{item.m}.csv",
                ["b", "min_phi", "max_defect", "max_defect_direct"],
                rows,
            )
        )
        if params.checkpoint:
            name = f"saddle_m{item.m}.txt"
            write_saddle_checkpoint(item, output_dir / name)
            artifacts.append(name)
    return ExperimentOutcome(checks=checks, artifacts=artifacts)
