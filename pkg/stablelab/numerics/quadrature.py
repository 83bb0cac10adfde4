"""Composite trapezoid and bilinear cell quadrature."""

from collections.abc import Callable

import numpy as np
from scipy import integrate

from stablelab.exceptions import DomainError
from stablelab.numerics.schemas import Grid2D, Mesh1D

Integrand = Callable[..., np.ndarray] | np.ndarray


def _nodal(values: Integrand | None, *coords: np.ndarray) -> np.ndarray | None:
    if values is None:
        return None
    if callable(values):
        return np.asarray(values(*coords), dtype=float)
    return np.asarray(values, dtype=float)


def quadrature(
    f: Integrand, mesh: Mesh1D | Grid2D, weight: Integrand | None = None
) -> float:
    """Integrate nodal values over a mesh.

    On a Mesh1D the composite trapezoid rule is used. On a Grid2D every cell whose four
    corners are active contributes its area times the mean of the corner values, which
    is exact for bilinear integrands.

    Args:
        f (Callable | np.ndarray): Integrand. Callables receive the node array (1D) or
            the two coordinate arrays of the grid shape (2D); arrays are nodal values.
        mesh (Mesh1D | Grid2D): Integration mesh.
        weight (Callable | np.ndarray | None): Optional pointwise weight, same
            conventions as f.

    Returns:
        float: The quadrature value.

    Raises:
        DomainError: If the mesh has no complete cell or values have the wrong shape.

    """
    if isinstance(mesh, Mesh1D):
        values = _nodal(f, mesh.nodes)
        weights = _nodal(weight, mesh.nodes)
        if values.shape != mesh.nodes.shape:
            raise DomainError(
                f"Integrand shape {values.shape} differs from mesh {mesh.nodes.shape}"
            )
        if weights is not None:
            values = values * weights
        return float(integrate.trapezoid(values, mesh.nodes))

    coords = mesh.coordinates()
    values = _nodal(f, *coords)
    weights = _nodal(weight, *coords)
    if values.shape != tuple(mesh.shape):
        raise DomainError(
            f"Integrand shape {values.shape} differs from grid {tuple(mesh.shape)}"
        )
    if weights is not None:
        values = values * weights
    cells = mesh.mask[:-1, :-1] & mesh.mask[1:, :-1] & mesh.mask[:-1, 1:]
    cells &= mesh.mask[1:, 1:]
    if not cells.any():
        raise DomainError("The grid has no cell with four active corners")
    values = np.where(mesh.mask, values, 0.0)
    corner_sum = values[:-1, :-1] + values[1:, :-1] + values[:-1, 1:] + values[1:, 1:]
    area = mesh.spacing[0] * mesh.spacing[1]
    return float(0.25 * area * np.sum(corner_sum[cells]))
