"""Unit tests for stablelab.numerics.stencils.

These tests cover:
- fd_derivative exactness on polynomials and its O(h^2) refinement slope
- fd_derivative error reporting on non-finite values and invalid arguments
- masked_laplacian assembly and symmetry
"""

import numpy as np
import pytest

from stablelab.exceptions import DomainError, EvaluationError
from stablelab.numerics.schemas import Grid2D
from stablelab.numerics.stencils import fd_derivative, masked_laplacian


def test_first_derivative_of_square():
    """Central differences are exact for quadratics."""
    assert fd_derivative(lambda x: x**2, 1.0, 1, 1e-4) == pytest.approx(2.0, abs=1e-8)


def test_second_derivative_of_constant_is_zero():
    """A constant field has an identically zero Hessian."""
    hess = fd_derivative(lambda p: 3.0, np.array([0.2, -1.0]), 2, 1e-3)
    assert np.all(hess == 0.0)


def test_hessian_of_bilinear_field():
    """f(x, y) = xy has unit mixed derivative and zero diagonal."""
    hess = fd_derivative(lambda p: p[0] * p[1], np.array([0.3, 0.7]), 2, 1e-4)
    assert hess[0, 1] == pytest.approx(1.0, abs=1e-8)
    assert hess[1, 0] == pytest.approx(1.0, abs=1e-8)
    assert hess[0, 0] == pytest.approx(0.0, abs=1e-8)
    assert hess[1, 1] == pytest.approx(0.0, abs=1e-8)


def test_hessian_is_symmetric():
    """The second order output is symmetrized."""
    hess = fd_derivative(
        lambda p: np.sin(p[0]) * np.exp(p[1]) + p[2] ** 3 * p[0],
        np.array([0.1, 0.2, 0.3]),
        2,
        1e-3,
    )
    assert np.array_equal(hess, hess.T)


@pytest.mark.parametrize("order", [1, 2])
def test_refinement_slope_is_two(order):
    """The truncation error decreases as O(h^2)."""
    exact = np.cos(0.7) if order == 1 else -np.sin(0.7)
    steps = np.array([0.1, 0.05, 0.025, 0.0125])
    errors = [abs(fd_derivative(np.sin, 0.7, order, h) - exact) for h in steps]
    slope = np.polyfit(np.log(steps), np.log(errors), 1)[0]
    assert 1.8 <= slope <= 2.2


def test_non_finite_value_reports_point():
    """A NaN inside the stencil raises an evaluation error naming the point."""

    def field(p):
        return np.nan if p[0] > 1.0 else p[0]

    with pytest.raises(EvaluationError) as exc:
        fd_derivative(field, np.array([1.0, 0.0]), 1, 1e-3)
    assert exc.value.point[0] > 1.0
    assert "Non-finite" in exc.value.message


@pytest.mark.parametrize("h,order", [(0.0, 1), (-1e-3, 2), (1e-3, 3)])
def test_invalid_arguments(h, order):
    """Non-positive steps and unknown orders are rejected."""
    with pytest.raises(DomainError):
        fd_derivative(np.sin, 0.0, order, h)


def test_masked_laplacian_is_symmetric_with_dirichlet_rows():
    """Nodes next to inactive ones lose the corresponding off-diagonal entry."""
    grid = Grid2D.rectangle((0.0, 0.0), (1.0, 1.0), (5, 5))
    op = masked_laplacian(grid)
    assert op.shape == (25, 25)
    assert abs(op - op.T).max() == 0.0
    h = 0.25
    assert op[0, 0] == pytest.approx(4.0 / h**2)
    # Corner node has two active neighbours, center node four.
    assert op[0].nnz == 3
    assert op[12].nnz == 5
