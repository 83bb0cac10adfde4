"""Experiments on the Simons cone: geometry, calibration, Simons gap, stability."""

from logging import Logger
from pathlib import Path

import numpy as np

from stablelab.cones.calibration import calibration_sign_scan
from stablelab.cones.geometry import (
    lawson_field,
    lawson_minimal_coefficient,
    mean_curvature,
    measure_simons_coefficient,
    second_form_norm_sq,
    simons_cone_point,
    simons_field,
    simons_inequality_gap,
)
from stablelab.cones.schemas import (
    ConeStabilityParams,
    RadialConeProfile,
    SimonsCalibrationParams,
)
from stablelab.cones.stability import scan_cone_stability
from stablelab.exceptions import ConsistencyError
from stablelab.experiments.artifacts import write_csv
from stablelab.experiments.checks import CheckRecord, ExperimentOutcome

SIMONS_CONE_REFERENCE = "minimality of the Simons cone"
SIMONS_INEQUALITY_REFERENCE = "Simons inequality"
CALIBRATION_THRESHOLD_M = 4
MINIMIZING_DIMENSION = 8
PROBE_COLUMNS = ["alpha", "beta", "rho_in", "rho_out", "q", "in_window", "tail_finite"]


def _geometry_checks(
    params: SimonsCalibrationParams, tolerance: float, rng: np.random.Generator
) -> list[CheckRecord]:
    checks = []
    for m in params.geometry_m:
        field = simons_field(m)
        radii = rng.uniform(0.1, 10.0, params.samples)
        points = [simons_cone_point(m, r, rng) for r in radii]
        curvature = max(abs(mean_curvature(field, p)) for p in points)
        checks.append(
            CheckRecord.assertion(
                f"simons_mean_curvature_m{m}",
                "the Simons cone has zero mean curvature",
                curvature <= tolerance,
                tolerance=tolerance,
                m=m,
                samples=params.samples,
                max_abs_mean_curvature=curvature,
                reference=SIMONS_CONE_REFERENCE,
            )
        )
        spread = 0.0
        for p in points:
            base = float(p @ p) * second_form_norm_sq(field, p)
            for factor in params.dilations:
                q = factor * p
                spread = max(
                    spread, abs(float(q @ q) * second_form_norm_sq(field, q) - base)
                )
        checks.append(
            CheckRecord.assertion(
                f"simons_homogeneity_m{m}",
                "c^2 is homogeneous of degree -2",
                spread <= tolerance,
                tolerance=tolerance,
                m=m,
                max_ray_spread=spread,
                reference=SIMONS_CONE_REFERENCE,
            )
        )
    return checks


def _calibration_checks(params: SimonsCalibrationParams) -> list[CheckRecord]:
    checks = []
    for m in params.calibration_m:
        scan = calibration_sign_scan(
            m, upper=params.calibration_upper, nodes=params.calibration_nodes
        )
        expect_calibration = m >= CALIBRATION_THRESHOLD_M
        holds = scan.violations == 0 if expect_calibration else scan.violations > 0
        checks.append(
            CheckRecord.assertion(
                f"calibration_sign_m{m}",
                "div X has the same sign as s^4 - t^4 exactly when 2m >= 8",
                holds,
                m=m,
                violations=scan.violations,
                nodes=scan.nodes,
                first_violation=scan.first_violation,
                reference=SIMONS_CONE_REFERENCE,
            )
        )
    return checks


def _gap_checks(
    params: SimonsCalibrationParams, tolerance: float, seed: int
) -> list[CheckRecord]:
    checks = []
    for n in params.gap_dimensions:
        coefficient = measure_simons_coefficient(
            n // 2, samples=params.samples, seed=seed
        )
        checks.append(
            CheckRecord.observation(
                f"simons_coefficient_n{n}",
                "c^2 r^2 is constant on the Simons cone",
                n=n,
                measured_d=coefficient.d,
                spread=coefficient.spread,
                cross_section_oracle=coefficient.oracle,
                n_minus_2=n - 2,
            )
        )
        profile = RadialConeProfile(n=n, d=coefficient.d, label="simons")
        radii = np.asarray(params.gap_radii)
        try:
            gap = simons_inequality_gap(
                profile,
                radii,
                cross_check=True,
                tol=params.consistency_tolerance,
            )
        except ConsistencyError as e:
            checks.append(
                CheckRecord.assertion(
                    f"simons_gap_consistency_n{n}",
                    "Simons inequality closed form matches finite differences",
                    False,
                    tolerance=params.consistency_tolerance,
                    n=n,
                    message=e.message,
                    reference=SIMONS_INEQUALITY_REFERENCE,
                )
            )
            continue
        scaled = float(np.max(np.abs(gap.gaps) * radii**4))
        checks.append(
            CheckRecord.assertion(
                f"simons_gap_equality_n{n}",
                "equality holds in the Simons inequality on the Simons cone",
                scaled <= tolerance,
                tolerance=tolerance,
                n=n,
                max_abs_gap_times_r4=scaled,
                reference=SIMONS_INEQUALITY_REFERENCE,
            )
        )
        checks.append(
            CheckRecord.assertion(
                f"simons_gap_consistency_n{n}",
                "Simons inequality closed form matches finite differences",
                gap.max_mismatch <= params.consistency_tolerance,
                tolerance=params.consistency_tolerance,
                n=n,
                max_relative_mismatch=gap.max_mismatch,
                fd_gaps=gap.fd_gaps,
                reference=SIMONS_INEQUALITY_REFERENCE,
            )
        )
    return checks


def _lawson_check(params: SimonsCalibrationParams) -> CheckRecord:
    m, k = params.lawson_m, params.lawson_k
    coefficient = lawson_minimal_coefficient(m, k)
    field = lawson_field(m, k, coefficient)
    point = np.zeros(m + k)
    point[0], point[m] = np.sqrt(coefficient), 1.0
    return CheckRecord.observation(
        f"lawson_mean_curvature_m{m}_k{k}",
        "Lawson cones with the minimal coefficient are stationary",
        m=m,
        k=k,
        coefficient=coefficient,
        mean_curvature=mean_curvature(field, point),
    )


def run_simons_calibration(
    params: SimonsCalibrationParams,
    *,
    tolerance: float,
    seed: int,
    output_dir: Path,
    logger: Logger,
) -> ExperimentOutcome:
    """Check the Simons cone geometry, its calibration and the Simons gap."""
    rng = np.random.default_rng(seed)
    checks = _geometry_checks(params, tolerance, rng)
    logger.info("Simons cone geometry checked")
    checks += _calibration_checks(params)
    logger.info("Calibration sign scans done")
    checks += _gap_checks(params, tolerance, seed)
    checks.append(_lawson_check(params))
    return ExperimentOutcome(checks=checks)


def run_cone_stability(
    params: ConeStabilityParams,
    *,
    tolerance: float,
    seed: int,
    output_dir: Path,
    logger: Logger,
) -> ExperimentOutcome:
    """Scan cutoff probes of the Simons cone stability form in several dimensions.

    Below dimension 8 some admissible probe must give a negative value, from
    dimension 8 on no tail-finite probe may.
    """
    checks, artifacts = [], []
    for n in params.dimensions:
        measured = measure_simons_coefficient(
            n // 2, samples=params.samples, seed=seed
        )
        profile = RadialConeProfile(n=n, d=measured.d, label="simons")
        scan = scan_cone_stability(
            profile,
            params.alphas,
            params.betas,
            params.radii,
            form=params.form,
            nodes_per_decade=params.nodes_per_decade,
            logger=logger,
        )
        artifacts.append(
            write_csv(
                output_dir,
                f"cone_stability_n{n}.csv",
                PROBE_COLUMNS,
                ([getattr(r, c) for c in PROBE_COLUMNS] for r in scan.results),
            )
        )
        values = {
            "n": n,
            "d": measured.d,
            "form": params.form,
            "probes": len(scan.results),
            "min_admissible_q": scan.min_admissible_q,
            "min_tail_finite_q": scan.min_tail_finite_q,
            "min_q": scan.min_q,
            "tail_finite_probes": sum(r.tail_finite for r in scan.results),
        }
        if n < MINIMIZING_DIMENSION:
            holds = scan.min_admissible_q is not None and scan.min_admissible_q < 0
            anchor = "the Simons cone is unstable when 2m < 8"
        else:
            holds = scan.min_q is not None and scan.min_q >= -params.probe_tolerance
            anchor = "the Simons cone is stable when 2m >= 8"
        checks.append(
            CheckRecord.assertion(
                f"cone_stability_n{n}",
                anchor,
                holds,
                tolerance=params.probe_tolerance,
                **values,
                reference=SIMONS_CONE_REFERENCE,
            )
        )
    return ExperimentOutcome(checks=checks, artifacts=artifacts)
