"""Foliation experiment: leaves on both sides of the dimension threshold."""

import math
from logging import Logger
from pathlib import Path

import numpy as np

from stablelab.experiments.artifacts import write_csv
from stablelab.experiments.checks import CheckRecord, ExperimentOutcome
from stablelab.foliation.leaves import (
    angular_cross_check,
    foliation_report,
    integrate_leaf_angular,
    integrate_leaf_parametric,
    linearized_rate,
    refinement_difference,
    reflection_mismatch,
)
from stablelab.foliation.schemas import FoliationParams, LeafTrajectory

FOLIATION_REFERENCE = "foliation by minimal leaves"
MINIMIZING_DIMENSION = 8
LEAF_COLUMNS = ["tau", "s", "t", "ds", "dt"]
SCALING_FACTOR = 2.0
SCALING_TAU = 10.0
SYMMETRY_START = (0.3, (0.0, 0.4))
SYMMETRY_END = 0.6
ANGULAR_STEP = 1e-3


def _export(output_dir: Path, leaf: LeafTrajectory) -> str:
    return write_csv(
        output_dir,
        f"leaf_m{leaf.m}_s0_{leaf.s0:g}.csv",
        LEAF_COLUMNS,
        zip(leaf.tau, leaf.s, leaf.t, leaf.ds, leaf.dt, strict=True),
    )


def _ordering_check(params: FoliationParams, m: int, report) -> CheckRecord:
    n = 2 * m
    counts = {f"{leaf.s0:g}": leaf.crossings for leaf in report.leaves}
    distances = [p.min_distance for p in report.pairs]
    if n >= MINIMIZING_DIMENSION:
        holds = all(c == 0 for c in counts.values()) and all(
            d is not None and d > 0 for d in distances
        )
        anchor = "leaves neither cross the Simons cone nor each other when 2m >= 8"
    else:
        leaf = next(
            (lf for lf in report.leaves if lf.s0 == params.crossing_s0), None
        )
        crossings = leaf.crossings if leaf is not None else 0
        holds = crossings >= params.min_crossings
        anchor = "leaves cross the Simons cone repeatedly when 2m < 8"
    return CheckRecord.assertion(
        f"foliation_ordering_n{n}",
        anchor,
        holds,
        n=n,
        crossings=counts,
        min_pair_distances=distances,
        outside_fractions=[leaf.outside_fraction for leaf in report.leaves],
        tau_max=params.tau_max,
        annulus=list(report.annulus),
        reference=FOLIATION_REFERENCE,
    )


def _rate_observation(m: int, report) -> CheckRecord:
    rate = linearized_rate(2 * m)
    ratios = []
    for leaf in report.leaves:
        radii = leaf.crossing_radii
        ratios += [b / a for a, b in zip(radii, radii[1:], strict=False)]
    return CheckRecord.observation(
        f"linearized_rate_n{2 * m}",
        "oscillation about the Simons cone is governed by its Jacobi equation",
        n=2 * m,
        real_part=rate.real_part,
        omega=rate.omega,
        predicted_crossing_ratio=rate.crossing_ratio,
        observed_crossing_ratios=ratios,
    )


def _refinement_check(params: FoliationParams, m: int) -> CheckRecord:
    args = (m, params.crossing_s0, params.tau_max)
    coarse = integrate_leaf_parametric(*args, params.tol, bound=params.bound)
    fine = integrate_leaf_parametric(*args, 0.5 * params.tol, bound=params.bound)
    difference = refinement_difference(coarse, fine)
    normalization = float(np.max(np.abs(coarse.ds**2 + coarse.dt**2 - 1.0)))
    holds = (
        coarse.crossing_count == fine.crossing_count
        and difference <= params.refinement_tolerance
        and normalization <= 1e-8
    )
    return CheckRecord.assertion(
        f"foliation_refinement_n{2 * m}",
        "leaf samples and crossing counts are stable under tolerance halving",
        holds,
        tolerance=params.refinement_tolerance,
        n=2 * m,
        crossings=coarse.crossing_count,
        crossings_refined=fine.crossing_count,
        max_relative_difference=difference,
        max_normalization_defect=normalization,
        reference=FOLIATION_REFERENCE,
    )


def _invariance_checks(params: FoliationParams, tolerance: float) -> list[CheckRecord]:
    m, s0 = params.cross_check_m, params.crossing_s0
    base = integrate_leaf_parametric(m, s0, SCALING_TAU, mode="fixed")
    scaled = integrate_leaf_parametric(
        m, SCALING_FACTOR * s0, SCALING_FACTOR * SCALING_TAU, mode="fixed"
    )
    scaling = float(
        max(
            np.max(np.abs(scaled.s - SCALING_FACTOR * base.s)),
            np.max(np.abs(scaled.t - SCALING_FACTOR * base.t)),
        )
    )
    theta0, z0 = SYMMETRY_START
    symmetry = reflection_mismatch(m, z0, (theta0, SYMMETRY_END), ANGULAR_STEP)
    shift = math.log(SCALING_FACTOR)
    span = (theta0, SYMMETRY_END)
    plain = integrate_leaf_angular(m, z0, span, mode="fixed", step=ANGULAR_STEP)
    shifted = integrate_leaf_angular(
        m, (z0[0] + shift, z0[1]), span, mode="fixed", step=ANGULAR_STEP
    )
    size = min(plain.theta.size, shifted.theta.size)
    additive = float(np.max(np.abs(shifted.z[:size] - plain.z[:size] - shift)))
    leaf = integrate_leaf_parametric(m, s0, params.tau_max, params.tol)
    angular = angular_cross_check(leaf, params.theta_range, params.tol)
    return [
        CheckRecord.assertion(
            "leaf_scaling",
            "the leaf equation is invariant under dilations",
            scaling <= tolerance,
            tolerance=tolerance,
            m=m,
            factor=SCALING_FACTOR,
            max_difference=scaling,
            reference=FOLIATION_REFERENCE,
        ),
        CheckRecord.assertion(
            "angular_reflection",
            "exchanging s and t maps leaves to leaves",
            symmetry <= tolerance,
            tolerance=tolerance,
            m=m,
            max_difference=symmetry,
            reference=FOLIATION_REFERENCE,
        ),
        CheckRecord.assertion(
            "angular_additive_shift",
            "adding a constant to z rescales the leaf",
            additive <= tolerance,
            tolerance=tolerance,
            m=m,
            max_difference=additive,
            reference=FOLIATION_REFERENCE,
        ),
        CheckRecord.assertion(
            "angular_parametric_agreement",
            "the angular and parametric forms describe the same leaves",
            angular <= params.angular_tolerance,
            tolerance=params.angular_tolerance,
            m=m,
            s0=s0,
            theta_range=list(params.theta_range),
            max_distance=angular,
            reference=FOLIATION_REFERENCE,
        ),
    ]


def run_foliation(
    params: FoliationParams,
    *,
    tolerance: float,
    seed: int,
    output_dir: Path,
    logger: Logger,
) -> ExperimentOutcome:
    """Integrate leaf families for every m and compare them with the Simons cone."""
    checks, artifacts = [], []
    for m in params.dimensions_m:
        values = sorted(set(params.s0_values) | {params.crossing_s0})
        report = foliation_report(
            m,
            values,
            params.tau_max,
            annulus=params.annulus,
            tol=params.tol,
            mode=params.mode,
            bound=params.bound,
            logger=logger,
        )
        msg = f"Foliation m={m}: {[leaf.crossings for leaf in report.leaves]} crossings"
        logger.info(msg)
        checks.append(_ordering_check(params, m, report))
        checks.append(_rate_observation(m, report))
        checks.append(_refinement_check(params, m))
        if params.export_leaves:
            artifacts += [_export(output_dir, leaf) for leaf in report.trajectories]
    checks += _invariance_checks(params, tolerance)
    return ExperimentOutcome(checks=checks, artifacts=artifacts)
