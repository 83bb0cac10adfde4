"""Classical Runge-Kutta integration with fixed or step-doubling adaptive steps."""

import math
from collections.abc import Callable, Sequence
from typing import Literal

import numpy as np

from stablelab.config import get_settings
from stablelab.exceptions import DomainError, IntegrationError
from stablelab.numerics.schemas import Trajectory

Rhs = Callable[[float, np.ndarray], np.ndarray]
StopCondition = Callable[[float, np.ndarray], str | None]


def rk4_step(rhs: Rhs, t: float, y: np.ndarray, h: float) -> np.ndarray:
    """Advance one classical 4th order Runge-Kutta step."""
    k1 = rhs(t, y)
    k2 = rhs(t + 0.5 * h, y + 0.5 * h * k1)
    k3 = rhs(t + 0.5 * h, y + 0.5 * h * k2)
    k4 = rhs(t + h, y + h * k3)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _finish(times: list, states: list, reason: str) -> Trajectory:
    return Trajectory(times=np.array(times), states=np.array(states), reason=reason)


def _fail(times: list, states: list, message: str) -> None:
    partial = _finish(times, states, message)
    raise IntegrationError(message, last_state=states[-1], trajectory=partial)


def rk_integrate(
    rhs: Rhs,
    y0: Sequence[float] | np.ndarray,
    span: tuple[float, float],
    *,
    controller: Literal["fixed", "adaptive"] = "adaptive",
    step: float | None = None,
    tol: float = 1e-10,
    min_step: float | None = None,
    max_steps: int = 1_000_000,
    stop: StopCondition | None = None,
) -> Trajectory:
    """Integrate y' = rhs(t, y) over span and return every accepted step.

    The fixed controller takes ceil(|span| / step) equal steps, so the result is exactly
    equivariant under a common rescaling of span and step. The adaptive controller
    compares one full step with two half steps, keeps the locally extrapolated value and
    accepts the step when the estimated local error is below tol * max(1, |y|).
    Decreasing spans integrate backwards.

    Args:
        rhs (Callable): Right hand side, rhs(t, y) -> dy/dt.
        y0 (array-like): Initial state at span[0].
        span (tuple[float, float]): Start and end of the independent variable.
        controller (str): "fixed" or "adaptive".
        step (float | None): Fixed step length, or the initial adaptive step.
        tol (float): Adaptive local error tolerance.
        min_step (float | None): Smallest admissible adaptive step. Defaults to
            Settings.RK_MIN_STEP scaled by the span length.
        max_steps (int): Budget of accepted steps.
        stop (Callable | None): Called after every accepted step; a non-None return
            value ends the integration and becomes the trajectory reason.

    Returns:
        Trajectory: Accepted steps, including the initial state.

    Raises:
        DomainError: If the span is degenerate or the fixed step is missing.
        IntegrationError: On step underflow or non-finite states. The exception carries
            the last good state and the partial trajectory.

    """
    t0, t1 = float(span[0]), float(span[1])
    length = abs(t1 - t0)
    if length == 0 or not math.isfinite(length):
        raise DomainError(f"Degenerate integration span {span}")
    direction = 1.0 if t1 > t0 else -1.0
    y = np.array(y0, dtype=float)
    times, states = [t0], [y.copy()]

    if controller == "fixed":
        if step is None or step <= 0:
            raise DomainError("The fixed controller needs a positive step")
        count = math.ceil(length / step - 1e-9)
        h = direction * length / count
        for k in range(count):
            t = t0 + k * h
            y = rk4_step(rhs, t, y, h)
            t_next = t1 if k == count - 1 else t0 + (k + 1) * h
            if not np.all(np.isfinite(y)):
                _fail(times, states, f"Non-finite state at t={t_next}")
            times.append(t_next)
            states.append(y.copy())
            reason = stop(t_next, y) if stop is not None else None
            if reason is not None:
                return _finish(times, states, reason)
        return _finish(times, states, "completed")

    floor = min_step if min_step is not None else get_settings().RK_MIN_STEP * max(
        1.0, length
    )
    h = direction * min(step if step is not None else length / 100.0, length)
    t = t0
    while direction * (t1 - t) > 0:
        if len(times) > max_steps:
            return _finish(times, states, "max_steps")
        if direction * (t + h - t1) > 0:
            h = t1 - t
        full = rk4_step(rhs, t, y, h)
        half = rk4_step(rhs, t, y, 0.5 * h)
        double = rk4_step(rhs, t + 0.5 * h, half, 0.5 * h)
        if not (np.all(np.isfinite(full)) and np.all(np.isfinite(double))):
            error = math.inf
        else:
            scale = max(1.0, float(np.max(np.abs(double))))
            error = float(np.max(np.abs(double - full))) / 15.0 / (tol * scale)

        if error <= 1.0:
            t = t1 if abs(t1 - (t + h)) <= 1e-14 * max(1.0, abs(t1)) else t + h
            y = double + (double - full) / 15.0
            times.append(t)
            states.append(y.copy())
            reason = stop(t, y) if stop is not None else None
            if reason is not None:
                return _finish(times, states, reason)
            factor = 4.0 if error == 0 else min(4.0, 0.9 * error ** (-0.2))
            h *= max(factor, 1.0)
        else:
            factor = 0.5 if math.isinf(error) else max(0.1, 0.9 * error ** (-0.2))
            h *= factor
            if abs(h) < floor:
                _fail(times, states, f"Step underflow at t={t}, h={abs(h):.3e}")
    return _finish(times, states, "completed")
