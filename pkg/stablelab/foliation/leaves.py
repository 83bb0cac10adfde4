"""Minimal leaves of O(m) x O(m) invariant hypersurfaces and their ordering.

A leaf is a curve (s(tau), t(tau)) in the open quarter plane solving

    s'' t' - s' t'' + (m - 1) ((s')^2 + (t')^2) (s' / t - t' / s) = 0.

With arc-length and the tangent angle phi, s' = cos(phi) and t' = sin(phi), the
equation becomes phi' = (m - 1) (cos(phi) / t - sin(phi) / s), which keeps
(s')^2 + (t')^2 = 1 exactly. The Simons cone s = t, phi = pi / 4 is a solution.
"""

import itertools
import math
from collections.abc import Sequence
from logging import Logger

import numpy as np
from scipy import optimize
from scipy.interpolate import CubicSpline
from scipy.spatial import cKDTree

from stablelab.exceptions import DomainError, IntegrationError
from stablelab.foliation.schemas import (
    AngularLeaf,
    FoliationReport,
    IntegrationMode,
    LeafDistance,
    LeafSummary,
    LeafTrajectory,
    LinearizedRate,
)
from stablelab.numerics.ode import Rhs, rk4_step, rk_integrate
from stablelab.numerics.schemas import Trajectory

LAUNCH_FRACTION = 1e-4
FIXED_STEP_FRACTION = 1e-2
THETA_MARGIN = 0.05
DZ_BLOWUP = 1e6


def leaf_rhs(m: int) -> Rhs:
    """Return the right hand side of the (s, t, phi) system."""
    k = m - 1

    def rhs(_: float, y: np.ndarray) -> np.ndarray:
        s, t, phi = y
        c, sn = math.cos(phi), math.sin(phi)
        return np.array([c, sn, k * (c / t - sn / s)])

    return rhs


def series_launch(m: int, s0: float, tau0: float) -> np.ndarray:
    """Return (s, t, phi) at tau0 from the two-term expansion at (s0, 0).

    The term s'/t is 0/0 at the axis. Balancing it gives the initial curvature
    (m - 1) / (m s0), so phi = pi/2 - (m - 1) tau / (m s0),
    s = s0 + (m - 1) tau^2 / (2 m s0) and t = tau up to third order.
    """
    kappa = (m - 1) / (m * s0)
    return np.array([s0 + 0.5 * kappa * tau0**2, tau0, 0.5 * math.pi - kappa * tau0])


def _quadrant_stop(bound: float):
    def stop(_: float, y: np.ndarray) -> str | None:
        if y[0] <= 0 or y[1] <= 0:
            return "left the quarter plane"
        if y[0] > bound or y[1] > bound:
            return "bound"
        return None

    return stop


def _refine_crossings(
    trajectory: Trajectory, rhs: Rhs, crossing_tol: float
) -> np.ndarray:
    """Locate the zeros of s - t by root finding on single RK4 steps."""
    gap = trajectory.states[:, 0] - trajectory.states[:, 1]
    signs = np.sign(gap)
    nonzero = np.flatnonzero(signs)
    crossings = []
    for a, b in itertools.pairwise(nonzero):
        if signs[a] == signs[b]:
            continue
        if b > a + 1:
            crossings.append(float(trajectory.times[a + 1]))
            continue
        tau, y = float(trajectory.times[a]), trajectory.states[a]
        width = float(trajectory.times[b]) - tau

        def g(h: float, tau: float = tau, y: np.ndarray = y) -> float:
            if h == 0:
                return float(y[0] - y[1])
            z = rk4_step(rhs, tau, y, h)
            return float(z[0] - z[1])

        if np.sign(g(width)) == signs[a]:
            # The accepted state is extrapolated, fall back to linear interpolation.
            crossings.append(tau + width * gap[a] / (gap[a] - gap[b]))
            continue
        crossings.append(tau + optimize.brentq(g, 0.0, width, xtol=crossing_tol))
    return np.array(crossings)


def integrate_leaf_parametric(
    m: int,
    s0: float,
    tau_max: float,
    tol: float = 1e-10,
    *,
    mode: IntegrationMode = "adaptive",
    step: float | None = None,
    bound: float = 1e3,
    crossing_tol: float = 1e-9,
) -> LeafTrajectory:
    """Integrate the leaf through (s0, 0) with vertical initial tangent.

    The integration starts at tau0 = 1e-4 s0 from the series launch and ends at
    tau_max, when s or t exceeds bound, or when the leaf would leave the quarter
    plane. The fixed mode uses a step proportional to s0 unless one is given, so that
    leaf(m, 2 s0) is exactly twice leaf(m, s0).

    Args:
        m (int): Dimension of each factor, n = 2m.
        s0 (float): Initial intercept.
        tau_max (float): Final arc length.
        tol (float): Adaptive local error tolerance.
        mode (str): "fixed" or "adaptive".
        step (float | None): Fixed step length, defaults to 1e-2 s0.
        bound (float): Stop once s or t exceeds this value.
        crossing_tol (float): Arc length accuracy of the crossing points.

    Returns:
        LeafTrajectory: The samples and the cone crossings. Step underflow returns
            the partial trajectory with the failure as reason.

    Raises:
        DomainError: If m < 2, s0 <= 0 or tau_max is below the launch point.

    """
    if m < 2:
        raise DomainError(f"Leaves need m >= 2, got {m}")
    if s0 <= 0:
        raise DomainError(f"The intercept must be positive, got {s0}")
    tau0 = LAUNCH_FRACTION * s0
    if tau_max <= tau0:
        raise DomainError(f"tau_max={tau_max} must exceed the launch point {tau0}")

    rhs = leaf_rhs(m)
    try:
        trajectory = rk_integrate(
            rhs,
            series_launch(m, s0, tau0),
            (tau0, tau_max),
            controller=mode,
            step=step if step is not None else FIXED_STEP_FRACTION * s0,
            tol=tol,
            stop=_quadrant_stop(bound),
        )
    except IntegrationError as e:
        trajectory = e.trajectory

    states, times = trajectory.states, trajectory.times
    inside = np.flatnonzero((states[:, 0] < 0) | (states[:, 1] < 0))
    if inside.size:
        states, times = states[: inside[0]], times[: inside[0]]
        trajectory = Trajectory(times=times, states=states, reason=trajectory.reason)
    return LeafTrajectory(
        m=m,
        s0=s0,
        tau=times,
        s=states[:, 0],
        t=states[:, 1],
        ds=np.cos(states[:, 2]),
        dt=np.sin(states[:, 2]),
        crossings=_refine_crossings(trajectory, rhs, crossing_tol),
        reason=trajectory.reason,
    )


def angular_rhs(m: int) -> Rhs:
    """Return the right hand side of the (z, z') system in the polar angle."""

    def rhs(theta: float, y: np.ndarray) -> np.ndarray:
        dz = y[1]
        cot = math.cos(2 * theta) / math.sin(2 * theta)
        return np.array([dz, (1 + dz**2) * ((2 * m - 1) - 2 * (m - 1) * cot * dz)])

    return rhs


def integrate_leaf_angular(
    m: int,
    z0: tuple[float, float],
    theta_range: tuple[float, float],
    tol: float = 1e-10,
    *,
    mode: IntegrationMode = "adaptive",
    step: float = 1e-3,
    theta_margin: float = THETA_MARGIN,
) -> AngularLeaf:
    """Integrate z'' = (1 + z'^2) ((2m - 1) - 2 (m - 1) cot(2 theta) z').

    Args:
        m (int): Dimension of each factor.
        z0 (tuple[float, float]): z and z' at theta_range[0].
        theta_range (tuple[float, float]): Start and end angle. A decreasing range
            integrates backwards; the samples are returned in increasing order.
        tol (float): Adaptive local error tolerance.
        mode (str): "fixed" or "adaptive".
        step (float): Fixed step, or initial adaptive step.
        theta_margin (float): Distance kept from 0 and pi/2.

    Returns:
        AngularLeaf: The samples. A blow-up of z' ends the leaf with the reason.

    Raises:
        DomainError: If the range is not inside (theta_margin, pi/2 - theta_margin).

    """
    lo, hi = sorted(theta_range)
    if lo < theta_margin or hi > 0.5 * math.pi - theta_margin or lo == hi:
        raise DomainError(
            f"Angle range {theta_range} must lie in "
            f"({theta_margin}, pi/2 - {theta_margin})"
        )

    def stop(_: float, y: np.ndarray) -> str | None:
        return "z' blow-up" if abs(y[1]) > DZ_BLOWUP else None

    try:
        trajectory = rk_integrate(
            angular_rhs(m),
            np.array(z0, dtype=float),
            theta_range,
            controller=mode,
            step=step,
            tol=tol,
            stop=stop,
        )
    except IntegrationError as e:
        trajectory = e.trajectory
    order = np.argsort(trajectory.times)
    return AngularLeaf(
        m=m,
        theta=trajectory.times[order],
        z=trajectory.states[order, 0],
        dz=trajectory.states[order, 1],
        reason=trajectory.reason,
    )


def angular_cross_check(
    leaf: LeafTrajectory, theta_range: tuple[float, float], tol: float = 1e-10
) -> float:
    """Compare a parametric leaf with the angular integration through one of its points.

    The angular leaf starts at the first sample with theta >= theta_range[0]. Both
    curves are compared at equal angles on the segment where theta(tau) increases.

    Returns:
        float: Largest distance between the two curves.

    Raises:
        DomainError: If the parametric leaf does not sweep theta_range monotonically.

    """
    theta = leaf.theta
    turning = np.flatnonzero(np.diff(theta) <= 0)
    end = int(turning[0]) + 1 if turning.size else theta.size
    lo, hi = theta_range
    start = int(np.searchsorted(theta[:end], lo))
    if start >= end or theta[end - 1] <= hi:
        raise DomainError(
            f"Leaf s0={leaf.s0} does not sweep the angles {theta_range} monotonically"
        )
    phi = math.atan2(leaf.dt[start], leaf.ds[start])
    z0 = (math.log(leaf.radius[start]), 1.0 / math.tan(phi - theta[start]))
    angular = integrate_leaf_angular(leaf.m, z0, (float(theta[start]), hi), tol)
    spline = CubicSpline(theta[start:end], leaf.radius[start:end])
    return float(np.max(np.abs(np.exp(angular.z) - spline(angular.theta))))


def reflection_mismatch(
    m: int, z0: tuple[float, float], theta_range: tuple[float, float], step: float
) -> float:
    """Integrate a leaf and its mirror image under s <-> t with the same fixed step.

    The mirror of z(theta) is z(pi/2 - theta), launched from pi/2 - theta_range[0]
    with slope -z'. Returns the largest difference of z at mirrored angles.
    """
    forward = integrate_leaf_angular(m, z0, theta_range, mode="fixed", step=step)
    mirrored = integrate_leaf_angular(
        m,
        (z0[0], -z0[1]),
        (0.5 * math.pi - theta_range[0], 0.5 * math.pi - theta_range[1]),
        mode="fixed",
        step=step,
    )
    size = min(forward.theta.size, mirrored.theta.size)
    if theta_range[1] > theta_range[0]:
        return float(np.max(np.abs(forward.z[:size] - mirrored.z[::-1][:size])))
    return float(np.max(np.abs(forward.z[::-1][:size] - mirrored.z[:size])))


def refinement_difference(coarse: LeafTrajectory, fine: LeafTrajectory) -> float:
    """Return the sup of |fine - coarse| / max(1, r) on the common arc length window."""
    window = coarse.tau <= fine.tau[-1]
    tau = coarse.tau[window]
    s = CubicSpline(fine.tau, fine.s)(tau)
    t = CubicSpline(fine.tau, fine.t)(tau)
    scale = np.maximum(1.0, coarse.radius[window])
    diff = np.maximum(np.abs(s - coarse.s[window]), np.abs(t - coarse.t[window]))
    return float(np.max(diff / scale))


def _annulus_points(leaf: LeafTrajectory, annulus: tuple[float, float]) -> np.ndarray:
    r = leaf.radius
    keep = (r >= annulus[0]) & (r <= annulus[1])
    return np.column_stack([leaf.s[keep], leaf.t[keep]])


def foliation_report(
    m: int,
    s0_values: Sequence[float],
    tau_max: float,
    *,
    annulus: tuple[float, float] = (0.1, 10.0),
    tol: float = 1e-10,
    mode: IntegrationMode = "adaptive",
    bound: float = 1e3,
    logger: Logger | None = None,
) -> FoliationReport:
    """Integrate a family of leaves and measure crossings and mutual distances.

    Args:
        m (int): Dimension of each factor.
        s0_values (Sequence[float]): Strictly increasing positive intercepts.
        tau_max (float): Final arc length of every leaf.
        annulus (tuple[float, float]): Radii restricting the distance computation.
        tol (float): Adaptive tolerance.
        mode (str): "fixed" or "adaptive".
        bound (float): Coordinate bound ending the integration.
        logger (Logger | None): Progress logger.

    Returns:
        FoliationReport: One summary per leaf and one distance per pair i < j.

    Raises:
        DomainError: If the intercepts are not positive and strictly increasing.

    """
    values = np.asarray(s0_values, dtype=float)
    if values.size == 0 or np.any(values <= 0) or np.any(np.diff(values) <= 0):
        raise DomainError(
            f"Intercepts must be positive and strictly increasing, got {s0_values}"
        )
    leaves = [
        integrate_leaf_parametric(m, float(s0), tau_max, tol, mode=mode, bound=bound)
        for s0 in values
    ]
    summaries = []
    for leaf in leaves:
        index = np.searchsorted(leaf.tau, leaf.crossings).clip(max=leaf.tau.size - 1)
        summaries.append(
            LeafSummary(
                s0=leaf.s0,
                crossings=leaf.crossing_count,
                crossing_radii=leaf.radius[index].tolist(),
                outside_fraction=float(np.mean(leaf.s > leaf.t)),
                reason=leaf.reason,
            )
        )
        if logger is not None:
            msg = (
                f"Leaf m={m} s0={leaf.s0}: {leaf.crossing_count} crossings, "
                f"{leaf.tau.size} samples, {leaf.reason}"
            )
            logger.debug(msg)

    pairs = []
    for first, second in itertools.combinations(leaves, 2):
        a, b = _annulus_points(first, annulus), _annulus_points(second, annulus)
        distance = None
        if len(a) and len(b):
            distance = float(np.min(cKDTree(a).query(b)[0]))
        pairs.append(
            LeafDistance(s0_first=first.s0, s0_second=second.s0, min_distance=distance)
        )
    return FoliationReport(
        m=m, annulus=annulus, leaves=summaries, pairs=pairs, trajectories=leaves
    )


def linearized_rate(n: int) -> LinearizedRate:
    """Solve gamma^2 + (n - 3) gamma + (n - 2) = 0.

    Perturbations w of the Simons cone along rays behave like r^gamma. Complex roots
    (4 <= n <= 6) make w oscillate, with consecutive zeros at radii in the ratio
    e^(pi / omega).
    """
    roots = np.roots([1.0, n - 3.0, n - 2.0])
    omega = float(np.max(np.abs(roots.imag)))
    if omega == 0:
        return LinearizedRate(
            n=n, real_part=float(np.max(roots.real)), omega=None, crossing_ratio=None
        )
    return LinearizedRate(
        n=n,
        real_part=float(roots.real[0]),
        omega=omega,
        crossing_ratio=math.exp(math.pi / omega),
    )
