"""Central difference stencils."""

from collections.abc import Callable
from typing import Literal

import numpy as np
from scipy import sparse

from stablelab.exceptions import DomainError, EvaluationError
from stablelab.numerics.schemas import Grid2D


def _evaluate(field: Callable, point: np.ndarray, scalar: bool) -> float:
    value = field(float(point[0]) if scalar else point)
    value = float(value)
    if not np.isfinite(value):
        msg = f"Non-finite field value {value} at point {point.tolist()}"
        raise EvaluationError(msg, point=point.tolist())
    return value


def fd_derivative(
    field: Callable, point: float | np.ndarray, order: Literal[1, 2], h: float
) -> float | np.ndarray:
    """Approximate the first or second derivatives of a scalar field.

    Central differences with O(h^2) truncation error. For order 2 the mixed entries use
    the four point cross stencil and the result is symmetrized.

    Args:
        field (Callable): Scalar field. It receives a float when point is a scalar and a
            1D numpy array otherwise.
        point (float | np.ndarray): Evaluation point.
        order (int): 1 for the gradient, 2 for the Hessian.
        h (float): Absolute step.

    Returns:
        float | np.ndarray: A scalar for scalar points, otherwise the gradient vector
            (order 1) or the symmetric Hessian matrix (order 2).

    Raises:
        DomainError: If h is not positive or order is not 1 or 2.
        EvaluationError: If the field is not finite at a stencil node.

    """
    if h <= 0:
        raise DomainError(f"Finite difference step must be positive, got {h}")
    if order not in (1, 2):
        raise DomainError(f"Unsupported derivative order {order}")

    scalar = np.ndim(point) == 0
    x = np.atleast_1d(np.asarray(point, dtype=float))
    dim = x.size
    eye = np.eye(dim) * h

    def f(p: np.ndarray) -> float:
        return _evaluate(field, p, scalar)

    if order == 1:
        grad = np.array([(f(x + eye[i]) - f(x - eye[i])) / (2 * h) for i in range(dim)])
        return float(grad[0]) if scalar else grad

    center = f(x)
    hess = np.empty((dim, dim))
    for i in range(dim):
        hess[i, i] = (f(x + eye[i]) - 2 * center + f(x - eye[i])) / h**2
        for j in range(i + 1, dim):
            hess[i, j] = (
                f(x + eye[i] + eye[j])
                - f(x + eye[i] - eye[j])
                - f(x - eye[i] + eye[j])
                + f(x - eye[i] - eye[j])
            ) / (4 * h**2)
            hess[j, i] = hess[i, j]
    hess = 0.5 * (hess + hess.T)
    return float(hess[0, 0]) if scalar else hess


def masked_laplacian(grid: Grid2D) -> sparse.csr_matrix:
    """Assemble the 5-point negative Laplacian on the active nodes of a grid.

    Inactive neighbours carry homogeneous Dirichlet data, so the matrix is symmetric
    positive definite. Unknowns are the active nodes in row-major order.

    Args:
        grid (Grid2D): Grid whose mask selects the unknowns.

    Returns:
        sparse.csr_matrix: The assembled operator.

    """
    mask = grid.mask
    index = -np.ones(mask.shape, dtype=int)
    index[mask] = np.arange(int(mask.sum()))
    hx, hy = grid.spacing
    diag = np.full(int(mask.sum()), 2.0 / hx**2 + 2.0 / hy**2)
    rows, cols, vals = [np.arange(diag.size)], [np.arange(diag.size)], [diag]

    for shift, axis, step in ((1, 0, hx), (-1, 0, hx), (1, 1, hy), (-1, 1, hy)):
        neighbour = np.roll(index, -shift, axis=axis)
        edge = [slice(None), slice(None)]
        edge[axis] = slice(-1, None) if shift == 1 else slice(0, 1)
        neighbour[tuple(edge)] = -1
        both = mask & (neighbour >= 0)
        rows.append(index[both])
        cols.append(neighbour[both])
        vals.append(np.full(int(both.sum()), -1.0 / step**2))

    size = diag.size
    return sparse.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(size, size),
    )
