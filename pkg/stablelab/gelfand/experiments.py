"""Gelfand experiment: the branch, its extremal parameter and its stability."""

from logging import Logger
from pathlib import Path

import numpy as np

from stablelab.experiments.artifacts import write_csv
from stablelab.experiments.checks import CheckRecord, ExperimentOutcome
from stablelab.gelfand.branch import (
    branch_continuation,
    richardson_extrapolate,
    shoot_radial,
)
from stablelab.gelfand.schemas import (
    Branch,
    GelfandParams,
    Nonlinearity,
    known_extremal,
    planar_branch,
    singular_coefficient,
)
from stablelab.gelfand.stability import (
    branch_ordering_defect,
    singular_distance,
    singular_solution_check,
    stability_testfunction_checks,
)

GELFAND_REFERENCE = "extremal solution of the Gelfand problem"
REFINEMENT_FACTORS = (1, 2, 4)
FD_RELATIVE_TOLERANCE = 1e-5
ORDERING_TOLERANCE = 1e-6
THRESHOLD_DIMENSION = 10


def _centers(params: GelfandParams, factor: int = 1) -> list[float]:
    step = params.center_step / factor
    count = int(round(params.center_max / step))
    return [k * step for k in range(count + 1)]


def _continue(
    params: GelfandParams,
    n: int,
    f: Nonlinearity,
    centers: list[float],
    logger: Logger,
    *,
    refine: bool = True,
) -> Branch:
    return branch_continuation(
        n,
        f,
        centers,
        params.root_tol,
        scan_points=params.scan_points,
        refine=refine,
        eigen_max_spacing=params.eigen_max_spacing,
        logger=logger,
    )


def _export(output_dir: Path, branch: Branch, name: str) -> str:
    return write_csv(
        output_dir,
        name,
        ["M", "lambda", "sup_norm", "mu1"],
        [(r.center, r.lam, r.sup_norm, r.mu1) for r in branch.records],
    )


def _branch_checks(
    params: GelfandParams, branch: Branch, logger: Logger
) -> list[CheckRecord]:
    n, f = branch.n, branch.nonlinearity
    first = branch.records[0] if branch.records else None
    minimal = branch.minimal_records
    unstable = [r for r in branch.records if r not in minimal]
    checks = [
        CheckRecord.assertion(
            f"gelfand_trivial_n{n}",
            "M = 0 gives lambda = 0 and u = 0",
            first is not None and first.center == 0 and first.lam == 0,
            center=first.center if first else None,
            lam=first.lam if first else None,
            reference=GELFAND_REFERENCE,
        ),
        CheckRecord.assertion(
            f"gelfand_minimal_stability_n{n}",
            "the minimal solutions u_lambda are stable",
            bool(minimal)
            and all(r.mu1 >= -params.stability_tolerance for r in minimal),
            tolerance=params.stability_tolerance,
            centers=[r.center for r in minimal],
            mu1=[r.mu1 for r in minimal],
            reference=GELFAND_REFERENCE,
        ),
        CheckRecord.observation(
            f"gelfand_fold_n{n}",
            "past the maximizer of lambda(M) the solutions are unstable",
            centers=[r.center for r in unstable],
            mu1=[r.mu1 for r in unstable],
            multivalued=branch.multivalued,
            skipped=[s.model_dump() for s in branch.skipped],
        ),
    ]

    estimates = [branch.lambda_star]
    for factor in REFINEMENT_FACTORS[1:]:
        refined = _continue(params, n, f, _centers(params, factor), logger)
        estimates.append(refined.lambda_star)
    change = abs(estimates[-1] - estimates[-2]) / abs(estimates[-1])
    checks.append(
        CheckRecord.assertion(
            f"gelfand_extremal_refinement_n{n}",
            "lambda* is the supremum of lambda(M) along the branch",
            change <= params.refinement_tolerance,
            tolerance=params.refinement_tolerance,
            steps=[params.center_step / k for k in REFINEMENT_FACTORS],
            estimates=estimates,
            extrapolated=richardson_extrapolate(estimates),
            interior=branch.extremal.interior,
            reference=GELFAND_REFERENCE,
        )
    )

    known = known_extremal(n) if f.kind == "exponential" else None
    if known is not None:
        closed_form = [planar_branch(r.center) for r in branch.records]
        deviation = max(
            abs(r.lam - c) for r, c in zip(branch.records, closed_form, strict=True)
        )
        checks.append(
            CheckRecord.assertion(
                f"gelfand_known_extremal_n{n}",
                "lambda* = 2 for e^u in the unit disk",
                abs(estimates[-1] - known) <= params.known_extremal_tolerance,
                tolerance=params.known_extremal_tolerance,
                lambda_star=estimates[-1],
                expected=known,
                max_branch_deviation=deviation,
                reference=GELFAND_REFERENCE,
            )
        )
    return checks


def _testfunction_checks(params: GelfandParams, branch: Branch) -> list[CheckRecord]:
    n, f = branch.n, branch.nonlinearity
    candidates = [r for r in branch.minimal_records if r.lam > 0]
    picks = []
    if candidates:
        spread = np.linspace(0, len(candidates) - 1, params.testfunction_profiles)
        picks = [candidates[k] for k in np.unique(spread.astype(int))]
    profiles = [shoot_radial(n, f, r.lam, r.center) for r in picks]
    slacks = [
        stability_testfunction_checks(
            p, params.testfunction_alpha, radial_alpha=params.radial_alpha
        )
        for p in profiles
    ]
    flat = [s for group in slacks for s in group]
    ordering = branch_ordering_defect(profiles)
    return [
        CheckRecord.assertion(
            f"gelfand_testfunctions_n{n}",
            "int lambda f'(u) xi^2 <= int |grad xi|^2 for stable solutions",
            len(profiles) == params.testfunction_profiles
            and all(s.slack >= -params.slack_tolerance for s in flat),
            tolerance=params.slack_tolerance,
            centers=[p.center for p in profiles],
            lam=[p.lam for p in profiles],
            functions=[s.name for s in flat],
            lhs=[s.lhs for s in flat],
            rhs=[s.rhs for s in flat],
            slack=[s.slack for s in flat],
            reference=GELFAND_REFERENCE,
        ),
        CheckRecord.assertion(
            f"gelfand_minimal_ordering_n{n}",
            "the minimal branch is increasing in lambda",
            ordering <= ORDERING_TOLERANCE,
            tolerance=ORDERING_TOLERANCE,
            max_decrease=ordering,
            reference=GELFAND_REFERENCE,
        ),
    ]


def _singular_checks(
    params: GelfandParams, logger: Logger
) -> tuple[list[CheckRecord], Branch]:
    n = params.singular_dimension
    f = Nonlinearity()
    branch = _continue(params, n, f, params.singular_centers, logger, refine=False)
    target = singular_coefficient(n)
    last = branch.records[-1] if branch.records else None
    distance = None
    if last is not None:
        distance = singular_distance(shoot_radial(n, f, last.lam, last.center))
    checks = [
        CheckRecord.assertion(
            f"gelfand_singular_limit_n{n}",
            "-2 log r is the extremal solution for e^u when n >= 10",
            last is not None
            and abs(last.lam - target) < params.singular_gap
            and distance < params.singular_distance,
            tolerance=params.singular_gap,
            center=last.center if last else None,
            lam=last.lam if last else None,
            expected=target,
            distance=distance,
            distance_tolerance=params.singular_distance,
            reference=GELFAND_REFERENCE,
        ),
        CheckRecord.observation(
            f"gelfand_large_m_n{n}",
            "the sup-norm grows while lambda(M) stays near 2 (n - 2)",
            centers=[r.center for r in branch.records],
            lam=[r.lam for r in branch.records],
            sup_norm=[r.sup_norm for r in branch.records],
            mu1=[r.mu1 for r in branch.records],
        ),
    ]

    results = [singular_solution_check(d) for d in params.threshold_dimensions]
    for result in results:
        worst = max(abs(v) for v in result.sample_residuals)
        fd = max(abs(v) for v in result.fd_residuals)
        checks.append(
            CheckRecord.assertion(
                f"gelfand_singular_residual_n{result.n}",
                "-2 log r solves -Laplacian u = 2 (n - 2) e^u",
                result.symbolic_residual == "0"
                and worst <= params.singular_residual_tolerance
                and fd <= FD_RELATIVE_TOLERANCE,
                tolerance=params.singular_residual_tolerance,
                symbolic=result.symbolic_residual,
                radii=result.sample_radii,
                residuals=result.sample_residuals,
                fd_relative=result.fd_residuals,
                reference=GELFAND_REFERENCE,
            )
        )
    checks.append(
        CheckRecord.assertion(
            "gelfand_singular_threshold",
            "-2 log r is stable exactly when 2 (n - 2) <= (n - 2)^2 / 4, n >= 10",
            all(r.stable == (r.n >= THRESHOLD_DIMENSION) for r in results),
            dimensions=[r.n for r in results],
            margins=[r.margin for r in results],
            reference=GELFAND_REFERENCE,
        )
    )
    return checks, branch


def run_gelfand_branch(
    params: GelfandParams,
    *,
    tolerance: float,
    seed: int,
    output_dir: Path,
    logger: Logger,
) -> ExperimentOutcome:
    """Follow the Gelfand branches, estimate lambda* and test their stability.

    The branches of params.dimensions are checked for stability below the fold and
    for the convergence of lambda*. The exponential branch in dimension
    singular_dimension is compared with -2 log r.
    """
    f = Nonlinearity(kind=params.kind, p=params.p)
    checks, artifacts = [], []
    dimensions = [*params.dimensions, params.testfunction_dimension]
    dimensions = list(dict.fromkeys(dimensions))
    for n in dimensions:
        branch = _continue(params, n, f, _centers(params), logger)
        artifacts.append(_export(output_dir, branch, f"gelfand_n{n}_{f.label}.csv"))
        if n in params.dimensions:
            checks += _branch_checks(params, branch, logger)
        if n == params.testfunction_dimension:
            checks += _testfunction_checks(params, branch)

    singular, branch = _singular_checks(params, logger)
    checks += singular
    name = f"gelfand_n{branch.n}_exp_large_m.csv"
    artifacts.append(_export(output_dir, branch, name))
    return ExperimentOutcome(checks=checks, artifacts=artifacts)
