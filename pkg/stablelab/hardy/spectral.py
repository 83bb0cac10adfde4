"""Hardy's inequality and the radial spectrum of -Laplacian - a / |x|^2 in B_1."""

from collections.abc import Sequence
from logging import Logger

import numpy as np

from stablelab.exceptions import DomainError
from stablelab.hardy.schemas import GroundStateStudy, HardySharpness, RadialTestFunction
from stablelab.numerics.eigen import smallest_eigenvalue
from stablelab.numerics.schemas import Mesh1D, SymmetricTridiagonal

DEFAULT_DELTAS = (0.1, 0.05, 0.02, 0.01, 0.005, 0.002, 0.001, 5e-4)
DEFAULT_RHOS = (1e-4, 1e-8, 1e-16, 1e-32, 1e-64, 1e-128, 1e-256)


def hardy_constant(n: int) -> float:
    """Return the best constant (n - 2)^2 / 4 of Hardy's inequality in R^n."""
    return (n - 2) ** 2 / 4


def _sampled_integrals(
    n: int, values: np.ndarray, mesh: Mesh1D
) -> tuple[float, float, float]:
    """Integrals of a piecewise linear profile given by its nodal values."""
    r = mesh.nodes
    if values.shape != r.shape:
        raise DomainError(f"Profile shape {values.shape} differs from mesh {r.shape}")
    if r[-1] != 1.0 or values[-1] != 0.0:
        raise DomainError("Sampled profiles must end at r = 1 with value 0")
    slope = np.diff(values) / np.diff(r)
    cell_weight = (r[1:] ** n - r[:-1] ** n) / n
    gradient = float(np.sum(slope**2 * cell_weight))
    with np.errstate(divide="ignore", invalid="ignore"):
        hardy_density = np.where(values != 0, values**2 * r ** (n - 3.0), 0.0)
    hardy = float(np.trapezoid(hardy_density, r))
    mass = float(np.trapezoid(values**2 * r ** (n - 1.0), r))
    return gradient, hardy, mass


def hardy_quotient(
    n: int,
    a: float,
    xi: RadialTestFunction | np.ndarray,
    mesh: Mesh1D | None = None,
    *,
    nodes_per_decade: int = 50,
) -> float:
    """Evaluate (int |grad xi|^2 - a xi^2 / |x|^2) / int xi^2 over B_1 for radial xi.

    The angular factor cancels, so the integrals are taken against r^{n-1} dr.

    Args:
        n (int): Dimension, at least 3.
        a (float): Coefficient of the inverse square potential.
        xi (RadialTestFunction | np.ndarray): Test function, or nodal values of a
            piecewise linear profile on mesh.
        mesh (Mesh1D | None): Mesh of a sampled profile, ending at r = 1.
        nodes_per_decade (int): Quadrature resolution of RadialTestFunction.

    Returns:
        float: The quotient.

    Raises:
        DomainError: If n < 3, a sampled profile does not vanish at r = 1 or the
            denominator is zero.

    """
    if n < 3:
        raise DomainError(f"Hardy quotients need n >= 3, got {n}")
    if isinstance(xi, RadialTestFunction):
        gradient, hardy, mass = xi.integrals(n, nodes_per_decade=nodes_per_decade)
    else:
        if mesh is None:
            raise DomainError("A sampled profile needs its mesh")
        gradient, hardy, mass = _sampled_integrals(n, np.asarray(xi, float), mesh)
    if mass <= 0:
        raise DomainError("The test function vanishes identically")
    return (gradient - a * hardy) / mass


def hardy_ratio(n: int, xi: RadialTestFunction, *, nodes_per_decade: int = 50) -> float:
    """Return int xi'^2 r^{n-1} dr / int xi^2 r^{n-3} dr."""
    gradient, hardy, _ = xi.integrals(n, nodes_per_decade=nodes_per_decade)
    return gradient / hardy


def hardy_sharpness_probe(
    n: int,
    eps: float,
    *,
    deltas: Sequence[float] = DEFAULT_DELTAS,
    rhos: Sequence[float] = DEFAULT_RHOS,
    nodes_per_decade: int = 50,
    logger: Logger | None = None,
) -> HardySharpness:
    """Search alpha = (n - 2)/2 + delta and rho until the ratio nears (n - 2)^2 / 4.

    The candidates are visited with delta decreasing in the outer loop and rho
    decreasing in the inner loop. The first witness within relative error eps is
    returned; when none is found the best one is returned with converged False.

    Args:
        n (int): Dimension, at least 3.
        eps (float): Target relative error.
        deltas (Sequence[float]): Positive offsets of the exponent.
        rhos (Sequence[float]): Cutoff radii in (0, 1).
        nodes_per_decade (int): Quadrature resolution.
        logger (Logger | None): Progress logger.

    Returns:
        HardySharpness: The witness.

    Raises:
        DomainError: If n < 3, eps <= 0 or the search grid is empty.

    """
    if n < 3 or eps <= 0:
        raise DomainError(f"Sharpness probe needs n >= 3 and eps > 0, got {n}, {eps}")
    if not deltas or not rhos:
        raise DomainError("Empty sharpness search grid")
    target = hardy_constant(n)
    best = None
    for delta in sorted(deltas, reverse=True):
        for rho in sorted(rhos, reverse=True):
            xi = RadialTestFunction(alpha=0.5 * (n - 2) + delta, rho=rho)
            ratio = hardy_ratio(n, xi, nodes_per_decade=nodes_per_decade)
            error = abs(ratio - target) / target
            if best is None or error < best.relative_error:
                best = HardySharpness(
                    n=n,
                    alpha=xi.alpha,
                    rho=rho,
                    ratio=ratio,
                    target=target,
                    relative_error=error,
                    converged=error <= eps,
                )
            if error <= eps:
                if logger is not None:
                    msg = (
                        f"Hardy sharpness n={n}: ratio {ratio:.6g} at "
                        f"alpha={xi.alpha:.6g}, rho={rho:.3g}"
                    )
                    logger.info(msg)
                return best
    if logger is not None:
        msg = (
            f"Hardy sharpness n={n}: budget exhausted, "
            f"best error {best.relative_error}"
        )
        logger.warning(msg)
    return best


def radial_operator(n: int, a: float, mesh: Mesh1D) -> SymmetricTridiagonal:
    """Discretize -u'' - (n - 1) u' / r - a u / r^2 with Dirichlet ends.

    The operator -(r^{n-1} u')' / r^{n-1} - a u / r^2 is discretized with fluxes at
    cell midpoints and lumped masses r_i^{n-1} (h_{i-1} + h_i) / 2, then symmetrized
    by the square root of the masses. Unknowns are the interior nodes.
    """
    r = mesh.nodes
    h = np.diff(r)
    flux = (0.5 * (r[1:] + r[:-1])) ** (n - 1) / h
    inner = r[1:-1]
    mass = inner ** (n - 1) * 0.5 * (h[:-1] + h[1:])
    diagonal = (flux[:-1] + flux[1:]) / mass - a / inner**2
    off_diagonal = -flux[1:-1] / np.sqrt(mass[:-1] * mass[1:])
    return SymmetricTridiagonal(diagonal=diagonal, off_diagonal=off_diagonal)


def ground_state_mesh(
    r_min: float, *, nodes_per_decade: int = 100, max_spacing: float = 1e-3
) -> Mesh1D:
    """Return the default graded mesh of [r_min, 1]."""
    return Mesh1D.graded(
        r_min, 1.0, nodes_per_decade=nodes_per_decade, max_spacing=max_spacing
    )


def schrodinger_ground_state(
    n: int, a: float, mesh: Mesh1D, *, tol: float = 1e-10
) -> float:
    """Return the smallest Dirichlet eigenvalue of the radial operator on the mesh.

    The singularity at the origin is removed by truncating the domain to
    [mesh.nodes[0], 1].

    Raises:
        DomainError: If the mesh starts at r <= 0 or does not end at 1.
        ConvergenceError: Propagated from the eigenvalue iteration.

    """
    if mesh.nodes[0] <= 0 or mesh.nodes[-1] != 1.0:
        raise DomainError(
            f"The mesh must cover [r_min, 1] with r_min > 0, got "
            f"[{mesh.nodes[0]}, {mesh.nodes[-1]}]"
        )
    value, _ = smallest_eigenvalue(radial_operator(n, a, mesh), tol=tol)
    return value


def ground_state_study(
    n: int,
    a: float,
    rmin_values: Sequence[float],
    *,
    nodes_per_decade: int = 100,
    max_spacing: float = 1e-3,
    logger: Logger | None = None,
) -> GroundStateStudy:
    """Compute mu_1 on [r_min, 1] for every truncation radius."""
    eigenvalues = []
    for r_min in rmin_values:
        mesh = ground_state_mesh(
            r_min, nodes_per_decade=nodes_per_decade, max_spacing=max_spacing
        )
        eigenvalues.append(schrodinger_ground_state(n, a, mesh))
        if logger is not None:
            msg = f"mu_1(n={n}, a={a}, r_min={r_min:g}) = {eigenvalues[-1]:.6g}"
            logger.info(msg)
    return GroundStateStudy(
        n=n, a=a, rmin_values=list(rmin_values), eigenvalues=eigenvalues
    )
