"""The one-dimensional layer solution and its minimality in balls."""

import math

import numpy as np
from scipy import integrate

from stablelab.allen_cahn.schemas import LayerCheck, LayerProfile, MinimalityComparison
from stablelab.exceptions import DomainError
from stablelab.numerics.quadrature import quadrature
from stablelab.numerics.schemas import Grid2D, Mesh1D
from stablelab.utils import sphere_area


def potential(u: np.ndarray) -> np.ndarray:
    """Return the double well G(u) = (1 - u^2)^2 / 4."""
    return 0.25 * (1.0 - u**2) ** 2


def layer_check(
    *, half_width: float = 20.0, nodes: int = 4001, layer: LayerProfile | None = None
) -> LayerCheck:
    """Check that u* solves -u'' = u - u^3 and measure its energy per unit area.

    The residual uses the closed form derivatives on a uniform mesh of
    [-half_width, half_width]. The energy int (u'^2 / 2 + G(u)) dy is integrated with
    the trapezoid rule, the oracle by adaptive quadrature in the variable u.
    """
    layer = layer or LayerProfile()
    mesh = Mesh1D.uniform(-half_width, half_width, nodes)
    y = mesh.nodes
    u = layer.value(y)
    residual = -layer.second_derivative(y) - (u - u**3)
    energy = quadrature(
        lambda x: 0.5 * layer.derivative(x) ** 2 + potential(layer.value(x)), mesh
    )
    oracle, _ = integrate.quad(
        lambda v: (1.0 - v**2) / math.sqrt(2.0), -1.0, 1.0, epsabs=1e-14
    )
    return LayerCheck(
        max_residual=float(np.max(np.abs(residual))),
        energy=energy,
        oracle=oracle,
        odd_defect=float(np.max(np.abs(layer.value(-y) + u))),
    )


def cutoff(r: np.ndarray, radius: float) -> tuple[np.ndarray, np.ndarray]:
    """Return phi_R and phi_R' for the cutoff equal to 1 in B_(R-1) and 0 off B_R.

    The ramp is (1 + cos(pi (r - R + 1))) / 2, so |phi_R'| <= pi / 2.
    """
    x = np.clip(r - radius + 1.0, 0.0, 1.0)
    value = 0.5 * (1.0 + np.cos(math.pi * x))
    slope = np.where((x > 0) & (x < 1), -0.5 * math.pi * np.sin(math.pi * x), 0.0)
    return value, slope


def minimality_comparison(
    n: int,
    radius: float,
    *,
    step: float = 0.025,
    layer: LayerProfile | None = None,
) -> MinimalityComparison:
    """Compare the energies in B_R of u(x) = u*(x_n) and of v_R = (1 - phi_R) u + phi_R.

    Both functions depend only on y = x_n and rho = |(x_1, ..., x_{n-1})|, so the
    energies are integrated on a half disk of the (y, rho) plane against the weight
    |S^{n-2}| rho^{n-2}. Cells cut by the sphere are dropped.

    Args:
        n (int): Dimension, at least 2.
        radius (float): Ball radius R >= 2.
        step (float): Quadrature step.
        layer (LayerProfile | None): Layer solution, the default one when None.

    Returns:
        MinimalityComparison: E_{B_R}(u), E_{B_R}(v_R) and E_{B_(R-1)}(v_R).

    Raises:
        DomainError: If n < 2 or R < 2.

    """
    if n < 2 or radius < 2:
        raise DomainError(f"Minimality needs n >= 2 and R >= 2, got {n}, {radius}")
    layer = layer or LayerProfile()
    cells = math.ceil(radius / step)
    shape = (2 * cells + 1, cells + 1)
    grid = Grid2D.rectangle((-radius, 0.0), (radius, radius), shape)
    y, rho = grid.coordinates()
    r = np.hypot(y, rho)
    weight = sphere_area(n - 1) * rho ** (n - 2)

    u, du = layer.value(y), layer.derivative(y)
    phi, dphi = cutoff(r, radius)
    v = (1.0 - phi) * u + phi
    with np.errstate(divide="ignore", invalid="ignore"):
        dy = np.where(r > 0, y / r, 0.0)
        drho = np.where(r > 0, rho / r, 0.0)
    grad_v_y = (1.0 - phi) * du + (1.0 - u) * dphi * dy
    grad_v_rho = (1.0 - u) * dphi * drho

    density_u = 0.5 * du**2 + potential(u)
    density_v = 0.5 * (grad_v_y**2 + grad_v_rho**2) + potential(v)

    def energy(density: np.ndarray, ball: float) -> float:
        disk = grid.model_copy(update={"mask": r <= ball})
        return quadrature(density, disk, weight)

    return MinimalityComparison(
        n=n,
        radius=radius,
        energy_u=energy(density_u, radius),
        energy_v=energy(density_v, radius),
        energy_v_inner=energy(density_v, radius - 1.0),
    )
