"""Stability of radial Gelfand solutions and of the singular solution -2 log r."""

import math
from collections.abc import Sequence

import numpy as np
import sympy

from stablelab.exceptions import DomainError
from stablelab.gelfand.schemas import (
    RadialProfile,
    SingularSolutionCheck,
    StabilitySlack,
    singular_coefficient,
    singular_profile,
)
from stablelab.hardy.spectral import hardy_constant
from stablelab.numerics.eigen import smallest_eigenvalue
from stablelab.numerics.quadrature import quadrature
from stablelab.numerics.schemas import Mesh1D, SymmetricTridiagonal
from stablelab.numerics.stencils import fd_derivative
from stablelab.utils import sphere_area

SAMPLE_RADII = (0.1, 0.5, 0.9)
CORE_FRACTION = 0.1
MESH_START = 1e-3


def _require_complete(profile: RadialProfile) -> None:
    if profile.supercritical or profile.r[-1] != 1.0:
        raise DomainError(
            f"The shot M={profile.center}, lambda={profile.lam} did not reach r = 1"
        )


def stability_mesh(
    profile: RadialProfile, *, nodes_per_decade: int = 40, max_spacing: float = 2e-3
) -> np.ndarray:
    """Return radii 0 < ... < 1 graded toward the core of the profile.

    The geometric part starts below a tenth of the length 1 / sqrt(lambda f'(M)) on
    which the linearized potential varies.
    """
    forcing = profile.lam * float(profile.nonlinearity.df(profile.center))
    start = MESH_START
    if forcing > 0:
        start = min(start, CORE_FRACTION / math.sqrt(forcing))
    mesh = Mesh1D.graded(
        start, 1.0, nodes_per_decade=nodes_per_decade, max_spacing=max_spacing
    )
    return np.concatenate([[0.0], mesh.nodes])


def linearized_operator(
    profile: RadialProfile, nodes: np.ndarray
) -> SymmetricTridiagonal:
    """Discretize -u'' - (n - 1) u' / r - lambda f'(u) u with u(1) = 0.

    Finite volumes around every node but the last, the one at r = 0 being a ball, with
    masses (r_right^n - r_left^n) / n and fluxes r_mid^{n-1} / h. The matrix is
    symmetrized by the square root of the masses.
    """
    n = profile.n
    h = np.diff(nodes)
    mid = 0.5 * (nodes[1:] + nodes[:-1])
    flux = mid ** (n - 1) / h
    left = np.concatenate([[0.0], mid[:-1]])
    mass = (mid**n - left**n) / n
    u, _ = profile.resample(nodes[:-1])
    potential = profile.lam * profile.nonlinearity.df(u)
    inflow = np.concatenate([[0.0], flux[:-1]])
    diagonal = (inflow + flux) / mass - potential
    off_diagonal = -flux[:-1] / np.sqrt(mass[:-1] * mass[1:])
    return SymmetricTridiagonal(diagonal=diagonal, off_diagonal=off_diagonal)


def linearized_first_eigenvalue(
    profile: RadialProfile,
    *,
    nodes_per_decade: int = 40,
    max_spacing: float = 2e-3,
    tol: float = 1e-10,
) -> float:
    """Return the first Dirichlet eigenvalue of -Laplacian - lambda f'(u) in B_1.

    Raises:
        DomainError: If the shot did not reach r = 1.
        ConvergenceError: Propagated from the eigenvalue iteration.

    """
    _require_complete(profile)
    nodes = stability_mesh(
        profile, nodes_per_decade=nodes_per_decade, max_spacing=max_spacing
    )
    value, _ = smallest_eigenvalue(linearized_operator(profile, nodes), tol=tol)
    return value


def singular_solution_check(
    n: int, radii: Sequence[float] = SAMPLE_RADII, *, fd_step: float = 1e-3
) -> SingularSolutionCheck:
    """Substitute -2 log r into -Laplacian u - 2 (n - 2) e^u.

    The residual is simplified symbolically and evaluated at the sample radii, and
    recomputed there with central differences of step fd_step * r.

    Raises:
        DomainError: If n < 3 or a radius is not in (0, 1].

    """
    if n < 3:
        raise DomainError(f"The singular solution needs n >= 3, got {n}")
    if any(not 0 < x <= 1 for x in radii):
        raise DomainError(f"Sample radii must lie in (0, 1], got {list(radii)}")
    coefficient = singular_coefficient(n)
    r = sympy.symbols("r", positive=True)
    u = -2 * sympy.log(r)
    laplacian = sympy.diff(u, r, 2) + sympy.Integer(n - 1) / r * sympy.diff(u, r)
    residual = -laplacian - sympy.Integer(2 * (n - 2)) * sympy.exp(u)
    evaluate = sympy.lambdify(r, residual, "numpy")

    def field(x: float) -> float:
        return -2.0 * math.log(x)

    fd_residuals = []
    for x in radii:
        h = fd_step * x
        first = fd_derivative(field, x, 1, h)
        second = fd_derivative(field, x, 2, h)
        value = -(second + (n - 1) * first / x) - coefficient * math.exp(field(x))
        fd_residuals.append(float(value / (coefficient / x**2)))
    return SingularSolutionCheck(
        n=n,
        symbolic_residual=str(sympy.simplify(residual)),
        sample_radii=list(radii),
        sample_residuals=[float(evaluate(x)) for x in radii],
        fd_residuals=fd_residuals,
        coefficient=coefficient,
        hardy_constant=hardy_constant(n),
    )


def singular_distance(
    profile: RadialProfile, lower: float = 0.1, upper: float = 0.9, num: int = 81
) -> float:
    """Return max |u + 2 log r| on [lower, upper]."""
    radii = np.linspace(lower, upper, num)
    u, _ = profile.resample(radii)
    return float(np.max(np.abs(u - singular_profile(radii))))


def stability_testfunction_checks(
    profile: RadialProfile,
    alpha: float = 1.9,
    *,
    radial_alpha: float = 1.0,
    scale: float = 1.0,
    cutoff: float = 1e-3,
    max_spacing: float = 1e-3,
) -> list[StabilitySlack]:
    """Evaluate int lambda f'(u) xi^2 and int |grad xi|^2 over B_1 for two xi.

    The first is xi = e^{alpha u} - 1. The second is xi = r u_r (r^-a - 2^a)_+ with
    r^-a frozen below cutoff, so that it is Lipschitz, and a = radial_alpha. Both are
    multiplied by scale.

    Args:
        profile (RadialProfile): Complete shot with u(1) = 0.
        alpha (float): Exponent of the exponential test function, in (0, 2).
        radial_alpha (float): Exponent of the radial test function.
        scale (float): Common factor of the test functions.
        cutoff (float): Radius below which r^-a is frozen.
        max_spacing (float): Quadrature mesh spacing away from the origin.

    Returns:
        list[StabilitySlack]: The exponential and the radial test function.

    Raises:
        DomainError: If alpha is not in (0, 2) or the shot did not reach r = 1.

    """
    if not 0 < alpha < 2:
        raise DomainError(
            f"The exponential test function needs 0 < alpha < 2, got {alpha}"
        )
    if radial_alpha <= 0 or cutoff <= 0:
        raise DomainError("The radial test function needs a > 0 and cutoff > 0")
    _require_complete(profile)
    n, lam, f = profile.n, profile.lam, profile.nonlinearity
    r = stability_mesh(profile, max_spacing=max_spacing)
    mesh = Mesh1D(nodes=r)
    u, du = profile.resample(r)
    weight = sphere_area(n) * r ** (n - 1)
    potential = lam * f.df(u)

    def slack(
        name: str, exponent: float, xi: np.ndarray, dxi: np.ndarray
    ) -> StabilitySlack:
        return StabilitySlack(
            name=name,
            alpha=exponent,
            lhs=quadrature(potential * xi**2, mesh, weight),
            rhs=quadrature(dxi**2, mesh, weight),
        )

    growth = np.exp(alpha * u)
    exponential = slack(
        "exponential", alpha, scale * (growth - 1.0), scale * alpha * du * growth
    )

    a = radial_alpha
    frozen = np.maximum(r, cutoff)
    window = np.maximum(frozen ** (-a) - 2.0**a, 0.0)
    dwindow = np.where((r > cutoff) & (r < 0.5), -a * frozen ** (-a - 1.0), 0.0)
    # (r u_r)' = r u_rr + u_r = -(n - 2) u_r - lambda f(u) r
    flux = r * du
    dflux = -(n - 2) * du - lam * f.f(u) * r
    radial = slack(
        "radial", a, scale * flux * window, scale * (dflux * window + flux * dwindow)
    )
    return [exponential, radial]


def branch_ordering_defect(profiles: Sequence[RadialProfile], num: int = 201) -> float:
    """Return the largest decrease max(u_k - u_{k+1}, 0) between consecutive profiles.

    The profiles are sorted by lambda and compared on a uniform mesh of [0, 1].
    """
    radii = np.linspace(0.0, 1.0, num)
    ordered = sorted(profiles, key=lambda p: p.lam)
    values = [p.resample(radii)[0] for p in ordered]
    pairs = zip(values, values[1:], strict=False)
    return max((max(0.0, float(np.max(a - b))) for a, b in pairs), default=0.0)
