"""Smallest eigenvalue of symmetric operators by shifted inverse iteration."""

from collections.abc import Callable

import numpy as np
from scipy import linalg, sparse
from scipy.sparse.linalg import splu

from stablelab.config import get_settings
from stablelab.exceptions import ConvergenceError, DomainError
from stablelab.numerics.schemas import SymmetricTridiagonal

Operator = SymmetricTridiagonal | sparse.spmatrix | sparse.sparray

MAX_SHIFT_BISECTIONS = 8


def _shifted_solver(op: Operator, shift: float) -> Callable | None:
    """Factorize op - shift*I if it is positive definite.

    Returns:
        Callable | None: A solver for the shifted system, or None when the shifted
            operator is not positive definite.

    """
    if isinstance(op, SymmetricTridiagonal):
        banded = np.zeros((2, op.size))
        banded[0, 1:] = op.off_diagonal
        banded[1] = op.diagonal - shift
        try:
            factor = linalg.cholesky_banded(banded, lower=False)
        except linalg.LinAlgError:
            return None
        return lambda rhs: linalg.cho_solve_banded((factor, False), rhs)

    shifted = (op - shift * sparse.identity(op.shape[0], format="csc")).tocsc()
    try:
        lu = splu(
            shifted,
            permc_spec="NATURAL",
            diag_pivot_thresh=0.0,
            options={"SymmetricMode": True},
        )
    except RuntimeError:
        return None
    # Without pivoting U holds the LDL^T pivots on its diagonal.
    if np.any(lu.U.diagonal() <= 0):
        return None
    return lu.solve


def _bounds(op: Operator) -> tuple[float, float]:
    if isinstance(op, SymmetricTridiagonal):
        return op.gershgorin_bounds()
    csr = sparse.csr_matrix(op)
    diag = csr.diagonal()
    radius = np.asarray(abs(csr).sum(axis=1)).ravel() - np.abs(diag)
    return float(np.min(diag - radius)), float(np.max(diag + radius))


def smallest_eigenvalue(
    op: Operator, *, tol: float = 1e-10, max_iter: int | None = None
) -> tuple[float, np.ndarray]:
    """Compute the smallest eigenvalue of a symmetric operator.

    Inverse iteration starts from the Gershgorin lower bound minus one. After every
    iteration the shift moves up to the Rayleigh quotient minus the residual norm, but
    only when a positive definite factorization of the shifted operator certifies that
    the new shift is still below the spectrum; otherwise the move is bisected.

    Args:
        op (SymmetricTridiagonal | sparse matrix): Symmetric operator, e.g. a 1D
            Sturm-Liouville matrix or a masked 5-point operator.
        tol (float): Relative tolerance on the eigenvalue and the residual.
        max_iter (int | None): Iteration budget. Defaults to Settings.EIGEN_MAX_ITER.

    Returns:
        tuple[float, np.ndarray]: The eigenvalue and an eigenvector normalized to unit
            discrete L2 norm.

    Raises:
        DomainError: If tol is not positive or the operator is not square.
        ConvergenceError: If the budget is exhausted. The error carries the last
            Rayleigh quotient.

    """
    if tol <= 0:
        raise DomainError(f"Tolerance must be positive, got {tol}")
    if max_iter is None:
        max_iter = get_settings().EIGEN_MAX_ITER
    if isinstance(op, SymmetricTridiagonal):
        size, matvec = op.size, op.matvec
    else:
        if op.shape[0] != op.shape[1]:
            raise DomainError(f"Operator must be square, got shape {op.shape}")
        csr = sparse.csr_matrix(op)
        size, matvec = csr.shape[0], csr.dot
    if size == 1:
        return float(matvec(np.ones(1))[0]), np.ones(1)

    lower, upper = _bounds(op)
    norm = max(abs(lower), abs(upper))
    floor = 64.0 * np.finfo(float).eps * norm
    shift = lower - 1.0
    solve = _shifted_solver(op, shift)
    vector = np.ones(size) / np.sqrt(size)
    previous = None
    history: list[float] = []

    for _ in range(max_iter):
        vector = solve(vector)
        vector /= np.linalg.norm(vector)
        image = matvec(vector)
        rayleigh = float(vector @ image)
        residual = float(np.linalg.norm(image - rayleigh * vector))
        history.append(rayleigh)
        scale = max(1.0, abs(rayleigh))
        if (
            previous is not None
            and abs(rayleigh - previous) <= tol * scale
            and residual <= max(tol, floor)
        ):
            return rayleigh, vector
        previous = rayleigh

        candidate = rayleigh - residual
        for _ in range(MAX_SHIFT_BISECTIONS):
            if candidate <= shift:
                break
            new_solve = _shifted_solver(op, candidate)
            if new_solve is not None:
                shift, solve = candidate, new_solve
                break
            candidate = 0.5 * (shift + candidate)

    msg = f"Inverse iteration did not converge in {max_iter} iterations"
    raise ConvergenceError(msg, last_value=history[-1], history=history)
