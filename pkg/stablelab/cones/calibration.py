"""Calibration of the Simons cone by the normal field of s^4 - t^4."""

from collections.abc import Callable

import numpy as np

from stablelab.cones.schemas import CalibrationScan
from stablelab.exceptions import DomainError


def calibration_divergence(
    m: int, s: float | np.ndarray, t: float | np.ndarray
) -> float | np.ndarray:
    """Return div X for X = grad u / |grad u|, u = s^4 - t^4, on R^{2m}.

    With a = s^2, b = t^2 and D = s^6 + t^6:

        div X = (a - b)(a + b)[(m - 4) a b + (m - 1)(a - b)^2] / D^{3/2}

    so the sign of div X matches the sign of u everywhere when m >= 4.

    Args:
        m (int): Half the ambient dimension, m >= 2.
        s (float | np.ndarray): |x'|, non negative.
        t (float | np.ndarray): |x''|, non negative.

    Returns:
        float | np.ndarray: The divergence, same shape as the broadcast inputs.

    Raises:
        DomainError: If m < 2 or (s, t) = (0, 0) somewhere.

    """
    if m < 2:
        raise DomainError(f"The calibration needs m >= 2, got {m}")
    s = np.asarray(s, dtype=float)
    t = np.asarray(t, dtype=float)
    if np.any((s == 0) & (t == 0)):
        raise DomainError("The calibration is undefined at the cone vertex")
    a, b = s**2, t**2
    denominator = (s**6 + t**6) ** 1.5
    value = (a - b) * (a + b) * ((m - 4) * a * b + (m - 1) * (a - b) ** 2)
    value = value / denominator
    return float(value) if value.ndim == 0 else value


def calibration_vector_field(m: int) -> Callable[[np.ndarray], np.ndarray]:
    """Return X(x) = grad u / |grad u| in full R^{2m} coordinates."""

    def field(x: np.ndarray) -> np.ndarray:
        first, second = x[:m], x[m:]
        grad = 4.0 * np.concatenate(
            [(first @ first) * first, -(second @ second) * second]
        )
        return grad / np.linalg.norm(grad)

    return field


def calibration_sign_scan(
    m: int, *, upper: float = 2.0, nodes: int = 200
) -> CalibrationScan:
    """Count the grid nodes of (0, upper]^2 where sign(div X) != sign(s^4 - t^4).

    The grid has nodes k upper / nodes, k = 1, ..., nodes, along each axis.
    """
    axis = upper * np.arange(1, nodes + 1) / nodes
    s, t = np.meshgrid(axis, axis, indexing="ij")
    divergence = calibration_divergence(m, s, t)
    wrong = np.sign(divergence) != np.sign(s**4 - t**4)
    first = None
    if wrong.any():
        i, j = np.argwhere(wrong)[0]
        first = (float(s[i, j]), float(t[i, j]))
    return CalibrationScan(
        m=m,
        nodes=nodes,
        upper=upper,
        violations=int(wrong.sum()),
        first_violation=first,
    )
