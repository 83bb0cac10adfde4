"""Unit tests for stablelab.numerics.eigen.

These tests cover:
- 1D Dirichlet Laplacian ground state
- identity and diagonal operators
- masked 5-point operators
- residual bound and eigenvector normalization
- non-convergence reporting
"""

import math

import numpy as np
import pytest
from scipy import sparse

from stablelab.exceptions import ConvergenceError, DomainError
from stablelab.numerics.eigen import smallest_eigenvalue
from stablelab.numerics.schemas import Grid2D, SymmetricTridiagonal
from stablelab.numerics.stencils import masked_laplacian


def dirichlet_laplacian(num: int) -> SymmetricTridiagonal:
    """Return -d^2/dx^2 on [0, 1] with num interior nodes."""
    h = 1.0 / (num + 1)
    return SymmetricTridiagonal(
        diagonal=np.full(num, 2.0 / h**2), off_diagonal=np.full(num - 1, -1.0 / h**2)
    )


def test_dirichlet_laplacian_ground_state():
    """The smallest eigenvalue approaches pi^2."""
    value, vector = smallest_eigenvalue(dirichlet_laplacian(200))
    assert value == pytest.approx(math.pi**2, rel=1e-2)
    assert np.linalg.norm(vector) == pytest.approx(1.0)
    assert np.all(vector > 0) or np.all(vector < 0)


def test_identity():
    """The identity has eigenvalue one."""
    op = SymmetricTridiagonal(diagonal=np.ones(6), off_diagonal=np.zeros(5))
    value, _ = smallest_eigenvalue(op)
    assert value == pytest.approx(1.0, abs=1e-12)


def test_diagonal_operator():
    """diag(3, 1, 2) has smallest eigenvalue 1 with eigenvector e_2."""
    op = SymmetricTridiagonal(diagonal=[3.0, 1.0, 2.0], off_diagonal=[0.0, 0.0])
    value, vector = smallest_eigenvalue(op)
    assert value == pytest.approx(1.0, abs=1e-12)
    assert abs(vector[1]) == pytest.approx(1.0, abs=1e-6)


def test_indefinite_operator():
    """Negative spectra are handled by the Gershgorin shift."""
    op = dirichlet_laplacian(50)
    shifted = SymmetricTridiagonal(
        diagonal=op.diagonal - 1e5, off_diagonal=op.off_diagonal
    )
    value, _ = smallest_eigenvalue(shifted)
    reference, _ = smallest_eigenvalue(op)
    assert value == pytest.approx(reference - 1e5, rel=1e-10)


def test_residual_bound():
    """The returned pair satisfies |Av - mu v| <= 10 tol |v|."""
    tol = 1e-8
    op = dirichlet_laplacian(40)
    value, vector = smallest_eigenvalue(op, tol=tol)
    residual = np.linalg.norm(op.matvec(vector) - value * vector)
    assert residual <= 10 * tol * np.linalg.norm(vector)


def test_masked_square_operator():
    """The 5-point Dirichlet Laplacian on the unit square approaches 2 pi^2."""
    num = 30
    h = 1.0 / (num + 1)
    grid = Grid2D.rectangle((h, h), (1.0 - h, 1.0 - h), (num, num))
    value, vector = smallest_eigenvalue(masked_laplacian(grid), tol=1e-9)
    exact = 2 * 4 / h**2 * math.sin(math.pi * h / 2) ** 2
    assert value == pytest.approx(exact, rel=1e-8)
    assert vector.size == num * num


def test_sparse_diagonal_matrix():
    """Generic sparse matrices are accepted."""
    value, _ = smallest_eigenvalue(sparse.diags([4.0, -2.0, 7.0]))
    assert value == pytest.approx(-2.0, abs=1e-12)


def test_non_convergence_carries_rayleigh_quotient():
    """An exhausted budget reports the last Rayleigh quotient."""
    with pytest.raises(ConvergenceError) as exc:
        smallest_eigenvalue(dirichlet_laplacian(100), max_iter=1)
    assert exc.value.last_value is not None
    assert len(exc.value.history) == 1


def test_invalid_tolerance():
    """The tolerance must be positive."""
    with pytest.raises(DomainError):
        smallest_eigenvalue(dirichlet_laplacian(5), tol=0.0)
