"""Shooting and continuation of the radial Gelfand branch."""

import math
from collections.abc import Sequence
from logging import Logger

import numpy as np
from scipy import optimize

from stablelab.exceptions import DomainError, IntegrationError
from stablelab.gelfand.schemas import (
    Branch,
    BranchRecord,
    ExtremalEstimate,
    Nonlinearity,
    RadialProfile,
    SkippedShot,
)
from stablelab.gelfand.stability import linearized_first_eigenvalue
from stablelab.numerics.ode import Rhs, rk_integrate
from stablelab.utils import check_strictly_increasing

LAUNCH_RADIUS = 1e-6
LAUNCH_SCALE = 1e-3
BLOWUP = 1e8
LAMBDA_CAP = 1e6


def radial_rhs(n: int, f: Nonlinearity, lam: float) -> Rhs:
    """Return the right hand side of the first order system in (u, u_r)."""

    def rhs(r: float, y: np.ndarray) -> np.ndarray:
        return np.array([y[1], -(n - 1) * y[1] / r - lam * float(f.f(y[0]))])

    return rhs


def launch_radius(f: Nonlinearity, lam: float, center: float) -> float:
    """Return the series launch radius, 1e-6 unless the core is smaller."""
    forcing = lam * max(float(f.f(center)), float(f.df(center)))
    if forcing <= 0:
        return LAUNCH_RADIUS
    return min(LAUNCH_RADIUS, LAUNCH_SCALE / math.sqrt(forcing))


def series_launch(
    n: int, f: Nonlinearity, lam: float, center: float, r0: float
) -> np.ndarray:
    """Return (u, u_r) at r0 from u = M + c2 r^2 + c4 r^4.

    c2 = -lambda f(M) / (2n) and c4 = -lambda f'(M) c2 / (4 (n + 2)).
    """
    c2 = -lam * float(f.f(center)) / (2 * n)
    c4 = -lam * float(f.df(center)) * c2 / (4 * (n + 2))
    return np.array(
        [center + c2 * r0**2 + c4 * r0**4, 2 * c2 * r0 + 4 * c4 * r0**3]
    )


def _flux_residual(
    n: int, f: Nonlinearity, lam: float, r: np.ndarray, u: np.ndarray, du: np.ndarray
) -> float:
    """Largest relative cell defect of r^{n-1} u' + lambda int r^{n-1} f(u) dr.

    The cell integrals use the trapezoid rule with its endpoint derivative correction.
    """
    forcing = lam * f.f(u)
    lower = (n - 1) * r ** (n - 2) if n > 1 else np.zeros_like(r)
    g = r ** (n - 1) * forcing
    dg = lam * (lower * f.f(u) + r ** (n - 1) * f.df(u) * du)
    h = np.diff(r)
    integral = 0.5 * h * (g[1:] + g[:-1]) + h**2 / 12.0 * (dg[:-1] - dg[1:])
    flux = r ** (n - 1) * du
    mid = 0.5 * (r[1:] + r[:-1])
    defect = np.abs(np.diff(flux) + integral) / (h * mid ** (n - 1))
    scale = 1.0 + np.maximum(forcing[1:], forcing[:-1])
    return float(np.max(defect / scale))


def shoot_radial(
    n: int,
    f: Nonlinearity,
    lam: float,
    center: float,
    *,
    tol: float = 1e-10,
    blowup: float = BLOWUP,
) -> RadialProfile:
    """Integrate u'' + (n - 1) u' / r + lambda f(u) = 0 from u(0) = M, u'(0) = 0.

    The integration starts from the series expansion at r0 = 1e-6, or closer to the
    origin when the core length 1 / sqrt(lambda f(M)) is below 1e-3, and proceeds to
    r = 1 with the adaptive Runge-Kutta controller.

    Args:
        n (int): Dimension.
        f (Nonlinearity): The nonlinearity.
        lam (float): lambda >= 0.
        center (float): M = u(0) >= 0.
        tol (float): Adaptive local error tolerance.
        blowup (float): Bound on |u| beyond which the shot is abandoned.

    Returns:
        RadialProfile: The samples. A blow-up or an integration failure before r = 1
            returns the partial profile flagged supercritical.

    Raises:
        DomainError: If n < 1, lambda < 0 or M < 0.

    """
    if n < 1 or lam < 0 or center < 0:
        raise DomainError(
            f"Shooting needs n >= 1, lambda >= 0 and M >= 0, got {n}, {lam}, {center}"
        )
    if lam == 0:
        r = np.linspace(0.0, 1.0, 3)
        flat = np.zeros_like(r)
        return RadialProfile(
            n=n,
            lam=0.0,
            center=center,
            nonlinearity=f,
            r=r,
            u=flat + center,
            du=flat,
            ddu=flat,
        )

    r0 = launch_radius(f, lam, center)
    rhs = radial_rhs(n, f, lam)

    def stop(_: float, y: np.ndarray) -> str | None:
        return "blow-up" if abs(y[0]) > blowup else None

    supercritical = False
    try:
        trajectory = rk_integrate(
            rhs,
            series_launch(n, f, lam, center, r0),
            (r0, 1.0),
            tol=tol,
            step=r0,
            stop=stop,
        )
    except IntegrationError as e:
        trajectory, supercritical = e.trajectory, True
    supercritical = supercritical or trajectory.reason != "completed"

    r = np.concatenate([[0.0], trajectory.times])
    u = np.concatenate([[center], trajectory.states[:, 0]])
    du = np.concatenate([[0.0], trajectory.states[:, 1]])
    samples = zip(trajectory.times, trajectory.states, strict=True)
    ddu = np.array([-lam * float(f.f(center)) / n] + [rhs(t, y)[1] for t, y in samples])
    return RadialProfile(
        n=n,
        lam=lam,
        center=center,
        nonlinearity=f,
        r=r,
        u=u,
        du=du,
        ddu=ddu,
        residual=_flux_residual(n, f, lam, r, u, du),
        reason=trajectory.reason,
        supercritical=supercritical,
    )


def boundary_value(
    n: int, f: Nonlinearity, lam: float, center: float, *, tol: float = 1e-10
) -> float:
    """Return u(1) of the shot, -1e8 for supercritical shots."""
    shot = shoot_radial(n, f, lam, center, tol=tol)
    return -BLOWUP if shot.supercritical else shot.boundary_value


def solve_lambda(
    n: int,
    f: Nonlinearity,
    center: float,
    *,
    root_tol: float = 1e-10,
    scan_points: int = 8,
    lam_cap: float = LAMBDA_CAP,
    tol: float = 1e-10,
) -> tuple[float | None, bool, str]:
    """Find lambda with u(1) = 0 for the shot from u(0) = M.

    The upper end of the bracket doubles from 1 until u(1) <= 0. The bracket is then
    scanned with scan_points equal cells and the first sign change, the one with the
    smallest lambda, is refined by bisection.

    Returns:
        tuple[float | None, bool, str]: lambda, or None when u(1) stays positive up to
            lam_cap; whether the scan met more than one sign change; a reason.

    """
    if center == 0:
        return 0.0, False, "trivial"

    def shot(lam: float) -> float:
        return boundary_value(n, f, lam, center, tol=tol)

    upper = 1.0
    while shot(upper) > 0:
        upper *= 2.0
        if upper > lam_cap:
            return None, False, f"u(1) > 0 for every lambda <= {lam_cap:g}"
    grid = np.linspace(0.0, upper, scan_points + 1)
    values = np.array([center] + [shot(lam) for lam in grid[1:]])
    positive = values > 0
    changes = np.flatnonzero(positive[:-1] != positive[1:])
    k = int(changes[0])
    multivalued = changes.size > 1
    if values[k + 1] == 0:
        return float(grid[k + 1]), multivalued, "exact"
    lam = optimize.bisect(shot, grid[k], grid[k + 1], xtol=root_tol)
    return float(lam), multivalued, "bisection"


def extremal_parameter(
    branch: Branch,
    *,
    root_tol: float = 1e-10,
    scan_points: int = 8,
    xatol: float = 1e-4,
    tol: float = 1e-10,
) -> ExtremalEstimate:
    """Return the largest lambda(M), refined around the grid maximizer.

    The refinement maximizes lambda(M) with bounded Brent iterations. A maximizer at
    either end of the grid is returned as it is, flagged as not interior.

    Raises:
        DomainError: If the branch has no record.

    """
    records = branch.records
    if not records:
        raise DomainError("Cannot estimate lambda* on an empty branch")
    k = int(np.argmax([r.lam for r in records]))
    best = records[k]
    if k in (0, len(records) - 1):
        return ExtremalEstimate(lam=best.lam, center=best.center, interior=False)

    def objective(center: float) -> float:
        lam, _, _ = solve_lambda(
            branch.n,
            branch.nonlinearity,
            center,
            root_tol=root_tol,
            scan_points=scan_points,
            tol=tol,
        )
        return -lam if lam is not None else 0.0

    result = optimize.minimize_scalar(
        objective,
        bounds=(records[k - 1].center, records[k + 1].center),
        method="bounded",
        options={"xatol": xatol},
    )
    if -result.fun <= best.lam:
        return ExtremalEstimate(lam=best.lam, center=best.center, interior=True)
    return ExtremalEstimate(lam=-result.fun, center=float(result.x), interior=True)


def richardson_extrapolate(
    values: Sequence[float], ratio: float = 2.0, order: float = 2.0
) -> float:
    """Extrapolate the last two values of a refinement sequence.

    Raises:
        DomainError: If less than two values are given or ratio^order == 1.

    """
    if len(values) < 2:
        raise DomainError("Richardson extrapolation needs two values")
    factor = ratio**order - 1.0
    if factor == 0:
        raise DomainError(f"Degenerate refinement ratio {ratio}")
    return values[-1] + (values[-1] - values[-2]) / factor


def branch_continuation(
    n: int,
    f: Nonlinearity,
    centers: Sequence[float],
    root_tol: float = 1e-10,
    *,
    scan_points: int = 8,
    lam_cap: float = LAMBDA_CAP,
    tol: float = 1e-10,
    refine: bool = True,
    eigen_max_spacing: float = 2e-3,
    logger: Logger | None = None,
) -> Branch:
    """Follow lambda(M) along an increasing grid of M = u(0).

    Every M gets lambda(M) from solve_lambda, the sup-norm of its profile and the first
    eigenvalue of the linearized operator. Values of M without a bracket are skipped
    with their reason. lambda* is the largest lambda(M), refined near the maximizer
    when refine is True.

    Args:
        n (int): Dimension.
        f (Nonlinearity): The nonlinearity.
        centers (Sequence[float]): Increasing values of M >= 0.
        root_tol (float): Bisection tolerance on lambda.
        scan_points (int): Cells of the bracketing scan.
        lam_cap (float): Largest lambda tried by the bracket expansion.
        tol (float): Adaptive shooting tolerance.
        refine (bool): Refine lambda* between the neighbours of the grid maximizer.
        eigen_max_spacing (float): Mesh spacing of the eigenvalue problems.
        logger (Logger | None): Progress logger.

    Returns:
        Branch: The records ordered by M.

    Raises:
        DomainError: If the grid is empty, negative or not increasing.

    """
    try:
        check_strictly_increasing(centers)
    except ValueError as e:
        raise DomainError(f"Invalid M grid: {e}") from e
    if len(centers) == 0 or centers[0] < 0:
        raise DomainError("The M grid must be non-empty and nonnegative")

    branch = Branch(n=n, nonlinearity=f)
    for center in centers:
        lam, multivalued, reason = solve_lambda(
            n,
            f,
            center,
            root_tol=root_tol,
            scan_points=scan_points,
            lam_cap=lam_cap,
            tol=tol,
        )
        if lam is None:
            branch.skipped.append(SkippedShot(center=center, reason=reason))
            if logger is not None:
                msg = f"Gelfand n={n}, M={center}: skipped, {reason}"
                logger.warning(msg)
            continue
        profile = shoot_radial(n, f, lam, center, tol=tol)
        mu1 = linearized_first_eigenvalue(profile, max_spacing=eigen_max_spacing)
        branch.records.append(
            BranchRecord(
                center=center,
                lam=lam,
                sup_norm=profile.sup_norm,
                mu1=mu1,
                multivalued=multivalued,
            )
        )
        if logger is not None:
            msg = f"Gelfand n={n}, M={center}: lambda={lam:.10g}, mu_1={mu1:.6g}"
            logger.debug(msg)

    if branch.records:
        if refine:
            branch.extremal = extremal_parameter(
                branch, root_tol=root_tol, scan_points=scan_points, tol=tol
            )
        else:
            best = max(branch.records, key=lambda r: r.lam)
            branch.extremal = ExtremalEstimate(
                lam=best.lam,
                center=best.center,
                interior=best is not branch.records[-1]
                and best is not branch.records[0],
            )
    if logger is not None:
        msg = (
            f"Gelfand branch n={n}, f={f.label}: {len(branch.records)} records, "
            f"{len(branch.skipped)} skipped, lambda*={branch.lambda_star}"
        )
        logger.info(msg)
    return branch
