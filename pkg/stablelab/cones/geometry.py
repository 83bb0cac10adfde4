"""Level set geometry: mean curvature, second fundamental form and the Simons gap."""

import math

import numpy as np
import sympy as sp

from stablelab.cones.schemas import (
    LevelSetField,
    RadialConeProfile,
    SimonsCoefficient,
    SimonsGap,
)
from stablelab.config import get_settings
from stablelab.exceptions import ConsistencyError, DegenerateGradientError, DomainError
from stablelab.numerics.stencils import fd_derivative


def _step(point: np.ndarray) -> float:
    return get_settings().FD_STEP * max(1.0, float(np.linalg.norm(point)))


def _derivatives(
    field: LevelSetField, point: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Return grad u and D^2 u after checking the point is a regular one."""
    point = np.asarray(point, dtype=float)
    if point.shape != (field.dimension,):
        raise DomainError(
            f"Point of shape {point.shape} for a field on R^{field.dimension}"
        )
    radius = float(np.linalg.norm(point))
    if field.vertex_exclusion is not None and radius < field.vertex_exclusion:
        raise DegenerateGradientError(point.tolist(), 0.0)
    h = _step(point)
    grad = (
        np.asarray(field.gradient(point), dtype=float)
        if field.gradient is not None
        else fd_derivative(field.evaluator, point, 1, h)
    )
    norm = float(np.linalg.norm(grad))
    if norm <= field.gradient_eps:
        raise DegenerateGradientError(point.tolist(), norm)
    hess = (
        np.asarray(field.hessian(point), dtype=float)
        if field.hessian is not None
        else fd_derivative(field.evaluator, point, 2, h)
    )
    return grad, hess


def mean_curvature(field: LevelSetField, point: np.ndarray) -> float:
    """Return div(grad u / |grad u|) at point.

    Args:
        field (LevelSetField): The level set field.
        point (np.ndarray): Query point in R^n.

    Returns:
        float: The mean curvature of the level set through point, with respect to
            the outward normal of {u < 0}.

    Raises:
        DegenerateGradientError: If |grad u| <= eps_g or the point is too close to a
            cone vertex.

    """
    grad, hess = _derivatives(field, point)
    norm = np.linalg.norm(grad)
    nu = grad / norm
    return float((np.trace(hess) - nu @ hess @ nu) / norm)


def second_form_norm_sq(field: LevelSetField, point: np.ndarray) -> float:
    """Return c^2, the squared norm of the second fundamental form, at point.

    c^2 is the squared Frobenius norm of P D^2u P / |grad u|, where P projects on
    the tangent space of the level set.
    """
    grad, hess = _derivatives(field, point)
    norm = np.linalg.norm(grad)
    nu = grad / norm
    proj = np.eye(nu.size) - np.outer(nu, nu)
    shape_operator = proj @ hess @ proj / norm
    return float(np.sum(shape_operator**2))


def lawson_field(m: int, k: int, coefficient: float = 1.0) -> LevelSetField:
    """Return u = |x'|^2 - coefficient |x''|^2 on R^m x R^k with exact derivatives.

    The zero set is a cone. It is minimal when coefficient = (m - 1) / (k - 1).
    """
    if m < 1 or k < 1 or coefficient <= 0:
        raise DomainError(
            f"Invalid Lawson parameters m={m}, k={k}, coefficient={coefficient}"
        )
    weights = np.concatenate([np.ones(m), -coefficient * np.ones(k)])

    return LevelSetField(
        dimension=m + k,
        evaluator=lambda x: float(np.sum(weights * x**2)),
        gradient=lambda x: 2.0 * weights * x,
        hessian=lambda x: np.diag(2.0 * weights),
        vertex_exclusion=get_settings().VERTEX_EXCLUSION,
        label=f"lawson(m={m}, k={k}, c={coefficient:g})",
    )


def lawson_minimal_coefficient(m: int, k: int) -> float:
    """Return the coefficient making the Lawson cone a minimal cone."""
    if k < 2:
        raise DomainError("The minimal Lawson coefficient needs k >= 2")
    return (m - 1) / (k - 1)


def simons_field(m: int) -> LevelSetField:
    """Return u = |x'|^2 - |x''|^2 on R^{2m}, whose zero set is the Simons cone."""
    return lawson_field(m, m, 1.0).model_copy(update={"label": f"simons(m={m})"})


def sphere_field(n: int) -> LevelSetField:
    """Return u = |x|^2 - 1 on R^n."""
    return LevelSetField(
        dimension=n,
        evaluator=lambda x: float(x @ x - 1.0),
        gradient=lambda x: 2.0 * x,
        hessian=lambda x: 2.0 * np.eye(n),
        label=f"sphere(n={n})",
    )


def hyperplane_field(n: int) -> LevelSetField:
    """Return u = x_n on R^n."""
    unit = np.zeros(n)
    unit[-1] = 1.0
    return LevelSetField(
        dimension=n,
        evaluator=lambda x: float(x[-1]),
        gradient=lambda x: unit.copy(),
        hessian=lambda x: np.zeros((n, n)),
        label=f"hyperplane(n={n})",
    )


def simons_cone_point(
    m: int, radius: float, rng: np.random.Generator | None = None
) -> np.ndarray:
    """Return a point of the Simons cone in R^{2m} at distance radius from 0.

    Without a generator the point is r (e_1 + e_{m+1}) / sqrt(2).
    """
    if rng is None:
        first, second = np.zeros(m), np.zeros(m)
        first[0] = second[0] = 1.0
    else:
        first, second = rng.standard_normal(m), rng.standard_normal(m)
        first /= np.linalg.norm(first)
        second /= np.linalg.norm(second)
    return radius / math.sqrt(2.0) * np.concatenate([first, second])


def cross_section_oracle(m: int) -> sp.Expr:
    """Return r^2 c^2 on the Simons cone by symbolic differentiation.

    For a level set of u(s, t) in R^{2m}, the principal curvatures are the curvature
    of the planar level curve and nu_s / s, nu_t / t, each with multiplicity m - 1.
    The expression is evaluated at s = t.
    """
    s, t = sp.symbols("s t", positive=True)
    u = s**2 - t**2
    u_s, u_t = sp.diff(u, s), sp.diff(u, t)
    norm = sp.sqrt(u_s**2 + u_t**2)
    curve = (
        sp.diff(u, s, 2) * u_t**2
        - 2 * sp.diff(u, s, t) * u_s * u_t
        + sp.diff(u, t, 2) * u_s**2
    ) / norm**3
    c_sq = curve**2 + (m - 1) * ((u_s / (s * norm)) ** 2 + (u_t / (t * norm)) ** 2)
    return sp.simplify(((s**2 + t**2) * c_sq).subs(t, s))


def measure_simons_coefficient(
    m: int, *, samples: int = 100, seed: int = 0
) -> SimonsCoefficient:
    """Measure d = r^2 c^2 at random points of the Simons cone in R^{2m}.

    Args:
        m (int): Half the ambient dimension, m >= 2.
        samples (int): Number of random cone points.
        seed (int): Seed of the point generator.

    Returns:
        SimonsCoefficient: Measured values, mean, spread and symbolic oracle.

    """
    if m < 2:
        raise DomainError(f"The Simons cone needs m >= 2, got {m}")
    field = simons_field(m)
    rng = np.random.default_rng(seed)
    radii = rng.uniform(0.1, 10.0, samples)
    values = np.array(
        [
            r**2 * second_form_norm_sq(field, simons_cone_point(m, r, rng))
            for r in radii
        ]
    )
    return SimonsCoefficient(
        m=m,
        samples=values,
        d=float(np.mean(values)),
        spread=float(np.ptp(values)),
        oracle=float(cross_section_oracle(m)),
    )


def _tangential_gap(field: LevelSetField, point: np.ndarray) -> float:
    """Return 1/2 Lap_LB c^2 - |delta c|^2 + c^4 - 2 c^2 / r^2 by finite differences.

    c^2 is extended off the surface as the c^2 of the level set through each point.
    """
    h = 1e-3 * float(np.linalg.norm(point))
    grad_u, _ = _derivatives(field, point)
    nu = grad_u / np.linalg.norm(grad_u)
    curvature = mean_curvature(field, point)

    def c_sq(x: np.ndarray) -> float:
        return second_form_norm_sq(field, x)

    value = c_sq(point)
    grad = fd_derivative(c_sq, point, 1, h)
    hess = fd_derivative(c_sq, point, 2, h)
    laplace_beltrami = np.trace(hess) - nu @ hess @ nu - curvature * (grad @ nu)
    tangential = grad - (grad @ nu) * nu
    delta_c_sq = float(tangential @ tangential) / (4.0 * value)
    radius_sq = float(point @ point)
    return float(
        0.5 * laplace_beltrami - delta_c_sq + value**2 - 2.0 * value / radius_sq
    )


def simons_inequality_gap(
    profile: RadialConeProfile,
    radii: list[float] | np.ndarray,
    *,
    cross_check: bool = False,
    tol: float = 1e-4,
) -> SimonsGap:
    """Evaluate the Simons inequality gap along a ray.

    The closed form is d (d - (n - 2)) / r^4, valid when c is constant on the
    cross-section. With cross_check the gap is also computed by finite differences
    of c^2 on the embedded Simons cone of dimension n and compared, relative to
    c^4 + 2 c^2 / r^2.

    Args:
        profile (RadialConeProfile): Cone profile with d > 0.
        radii (list[float]): Positive radii.
        cross_check (bool): Whether to run the finite difference comparison. It
            needs an even n.
        tol (float): Largest accepted relative mismatch.

    Returns:
        SimonsGap: Closed form gaps and, if requested, the FD gaps and mismatch.

    Raises:
        DomainError: If d <= 0, a radius is not positive or the cross-check is
            requested for an odd dimension.
        ConsistencyError: If the two evaluations differ by more than tol.

    """
    if profile.d <= 0:
        raise DomainError("The Simons gap needs d > 0")
    radii = np.asarray(radii, dtype=float)
    if np.any(radii <= 0):
        raise DomainError("Radii must be positive")
    n, d = profile.n, profile.d
    gaps = d * (d - (n - 2)) / radii**4
    if not cross_check:
        return SimonsGap(radii=radii, gaps=gaps)

    if n % 2:
        raise DomainError(f"The Simons cone lives in even dimension, got n={n}")
    m = n // 2
    field = simons_field(m)
    fd_gaps = np.array(
        [_tangential_gap(field, simons_cone_point(m, r)) for r in radii]
    )
    scale = d**2 / radii**4 + 2.0 * d / radii**4
    mismatch = float(np.max(np.abs(fd_gaps - gaps) / scale))
    if mismatch > tol:
        msg = (
            f"Simons gap closed form and finite differences differ by {mismatch:.3e} "
            f"(relative), above {tol:.1e}"
        )
        raise ConsistencyError(msg)
    return SimonsGap(radii=radii, gaps=gaps, fd_gaps=fd_gaps, max_mismatch=mismatch)
