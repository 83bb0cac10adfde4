"""Saddle-shaped solutions of -Laplacian u = u - u^3 in R^(2m).

A saddle solution depends only on s = |x'| and t = |x''|, with x = (x', x'') in
R^m x R^m, and solves

    u_ss + u_tt + (m - 1) (u_s / s + u_t / t) + u - u^3 = 0

in the triangle {0 <= t <= s <= L}. It vanishes on the diagonal s = t, which is the
Simons cone, and is odd under the exchange of s and t.
"""

from collections.abc import Sequence
from logging import Logger
from pathlib import Path

import numpy as np
from scipy import sparse
from scipy.sparse import linalg

from stablelab.allen_cahn.layer import potential
from stablelab.allen_cahn.schemas import (
    EnergyGrowth,
    RayleighQuotient,
    SaddleField,
    SaddleMethod,
    SupersolutionProbe,
    SupersolutionReport,
)
from stablelab.exceptions import DomainError, SolverError
from stablelab.numerics.checkpoint import read_grid_checkpoint, write_grid_checkpoint
from stablelab.numerics.quadrature import quadrature
from stablelab.numerics.schemas import Grid2D
from stablelab.utils import sphere_area

DEFAULT_PROBES = ((0.0, 3.0), (1.0, 5.0), (2.0, 8.0), (4.0, 12.0))
MIN_DAMPING = 1.0 / 64
SWEEP_RELAXATION = 1.0


def far_field(s: np.ndarray, t: np.ndarray) -> np.ndarray:
    """Return the layer at the signed distance (s - t) / sqrt(2) to the cone."""
    return np.tanh(0.5 * (s - t))


class _SaddleSystem:
    """Discrete equation at the unknown nodes 1 <= i < N, 0 <= j < i.

    Nodes on the diagonal are zero and nodes on s = L carry the far field. At t = 0
    the term (m - 1) u_t / t is replaced by (m - 1) u_tt and u_t = 0 is imposed by a
    mirror node.
    """

    def __init__(self, m: int, grid: Grid2D):
        self.m = m
        self.grid = grid
        h = grid.spacing[0]
        cells = grid.shape[0] - 1
        i, j = np.indices(grid.shape)
        self.unknown = (j < i) & (i < cells)
        index = -np.ones(grid.shape, dtype=int)
        index[self.unknown] = np.arange(int(self.unknown.sum()))
        row_i, col_j = i[self.unknown], j[self.unknown]
        s, t = row_i * h, col_j * h
        axis = col_j == 0
        size = row_i.size
        self.colors = (row_i + col_j) % 2

        rows, cols, vals = [], [], []
        rhs = np.zeros(size)
        row = np.arange(size)

        def couple(mask: np.ndarray, ni: np.ndarray, nj: np.ndarray, coef: np.ndarray):
            dirichlet = mask & (ni == cells)
            rhs[dirichlet] += coef[dirichlet] * far_field(
                ni[dirichlet] * h, nj[dirichlet] * h
            )
            inner = mask & (ni < cells) & (nj < ni)
            rows.append(row[inner])
            cols.append(index[ni[inner], nj[inner]])
            vals.append(coef[inner])

        radial_t = np.where(axis, 0.0, (m - 1) / (2 * h * np.where(axis, 1.0, t)))
        radial_s = (m - 1) / (2 * h * s)
        center = np.where(axis, -(2.0 + 2.0 * m) / h**2, -4.0 / h**2)
        rows.append(row)
        cols.append(row)
        vals.append(center)
        everywhere = np.ones(size, dtype=bool)
        north = np.where(axis, 2.0 * m / h**2, 1 / h**2 + radial_t)
        couple(everywhere, row_i + 1, col_j, 1 / h**2 + radial_s)
        couple(everywhere, row_i - 1, col_j, 1 / h**2 - radial_s)
        couple(everywhere, row_i, col_j + 1, north)
        couple(~axis, row_i, col_j - 1, 1 / h**2 - radial_t)

        self.operator = sparse.csr_matrix(
            (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
            shape=(size, size),
        )
        self.rhs = rhs
        self.diagonal = self.operator.diagonal()

    def residual(self, u: np.ndarray) -> np.ndarray:
        return self.operator @ u + self.rhs + u - u**3

    def jacobian(self, u: np.ndarray) -> sparse.csr_matrix:
        return (self.operator + sparse.diags(1.0 - 3.0 * u**2)).tocsc()

    def initial_guess(self) -> np.ndarray:
        s, t = self.grid.coordinates()
        return far_field(s, t)[self.unknown]

    def field_values(self, u: np.ndarray) -> np.ndarray:
        """Return the odd extension of the unknowns to the whole square."""
        s, t = self.grid.coordinates()
        half = np.zeros(self.grid.shape)
        half[self.unknown] = u
        half[-1, :-1] = far_field(s[-1, :-1], t[-1, :-1])
        return half - half.T


def _newton_step(system: _SaddleSystem, u: np.ndarray, norm: float) -> np.ndarray:
    """Damped Newton update, halving the step until the max residual decreases."""
    try:
        delta = linalg.spsolve(system.jacobian(u), -system.residual(u))
    except RuntimeError as e:
        raise SolverError(f"Singular saddle Jacobian: {e}") from e
    if not np.all(np.isfinite(delta)):
        raise SolverError("Singular saddle Jacobian")
    damping = 1.0
    while True:
        trial = u + damping * delta
        trial_norm = float(np.max(np.abs(system.residual(trial))))
        if trial_norm < norm or damping <= MIN_DAMPING:
            return trial
        damping *= 0.5


def _red_black_sweep(system: _SaddleSystem, u: np.ndarray) -> np.ndarray:
    """Pointwise Newton update of every red node, then of every black node.

    With the 5-point stencil nodes of one color only couple to the other color, so
    each half sweep is an exact Gauss-Seidel pass.
    """
    u = u.copy()
    for color in (0, 1):
        rows = np.flatnonzero(system.colors == color)
        local = u[rows]
        value = system.operator[rows] @ u + system.rhs[rows] + local - local**3
        slope = system.diagonal[rows] + 1.0 - 3.0 * local**2
        u[rows] = local - SWEEP_RELAXATION * value / slope
    return u


def solve_saddle(
    m: int,
    length: float,
    step: float,
    tol: float = 1e-8,
    max_iter: int = 50,
    *,
    method: SaddleMethod = "newton",
    logger: Logger | None = None,
) -> SaddleField:
    """Solve the saddle equation on the triangle {0 <= t <= s <= L}.

    Args:
        m (int): Half dimension, the solution lives in R^(2m).
        length (float): Side L. The far field tanh((s - t) / 2) is imposed on s = L.
        step (float): Grid step, adjusted so that L is a whole number of cells.
        tol (float): Target max residual at the unknowns.
        max_iter (int): Newton iterations, or red-black sweeps.
        method (str): "newton" for damped global Newton with a sparse Jacobian,
            "newton-gauss-seidel" for red-black pointwise Newton sweeps.
        logger (Logger | None): Progress logger.

    Returns:
        SaddleField: The field. When the budget runs out it is returned with
            converged False and its residual history.

    Raises:
        DomainError: If m < 1, L or h is not positive or the grid has less than 3
            cells per side.
        SolverError: If a Newton linear system is singular.

    """
    if m < 1 or length <= 0 or step <= 0:
        raise DomainError(f"Invalid saddle problem m={m}, L={length}, h={step}")
    if round(length / step) < 3:
        raise DomainError(f"The grid needs at least 3 cells, got L={length}, h={step}")
    grid = Grid2D.lower_triangle(length, step)
    system = _SaddleSystem(m, grid)
    u = system.initial_guess()
    norm = float(np.max(np.abs(system.residual(u))))
    history = [norm]
    iterations = 0
    while norm > tol and iterations < max_iter:
        if method == "newton":
            u = _newton_step(system, u, norm)
        else:
            u = _red_black_sweep(system, u)
        iterations += 1
        norm = float(np.max(np.abs(system.residual(u))))
        history.append(norm)
        if logger is not None:
            msg = f"Saddle m={m} {method} iteration {iterations}: residual {norm:.3e}"
            logger.debug(msg)
    converged = norm <= tol
    if logger is not None:
        msg = (
            f"Saddle m={m}, L={length}, h={grid.spacing[0]:g}: residual {norm:.3e} "
            f"after {iterations} iterations"
        )
        if converged:
            logger.info(msg)
        else:
            logger.warning(msg + ", not converged")
    return SaddleField(
        m=m,
        length=length,
        grid=grid,
        values=system.field_values(u),
        residual=norm,
        iterations=iterations,
        residual_history=history,
        converged=converged,
    )


def _square(field: SaddleField) -> tuple[np.ndarray, np.ndarray]:
    axis = field.axis
    return np.meshgrid(axis, axis, indexing="ij")


def _full_grid(field: SaddleField) -> Grid2D:
    size = field.values.shape[0]
    return Grid2D.rectangle((0.0, 0.0), (field.length, field.length), (size, size))


def energy_growth_fit(field: SaddleField, radii: Sequence[float]) -> EnergyGrowth:
    """Fit E_{B_R}(u) ~ R^k on balls of R^(2m).

    E(R) = |S^(m-1)|^2 int_{s^2 + t^2 <= R^2} s^(m-1) t^(m-1) (|grad u|^2 / 2 + G(u))
    over the quadrant s, t >= 0, with the odd extension in s < t. The exponent is the
    least squares slope of log E against log R.

    Raises:
        DomainError: If fewer than 3 radii are given or a radius is not in
            (0, L / 2].

    """
    if len(radii) < 3:
        raise DomainError(f"The growth fit needs at least 3 radii, got {len(radii)}")
    if min(radii) <= 0 or max(radii) > 0.5 * field.length:
        raise DomainError(f"Radii must lie in (0, L/2], got {list(radii)}")
    m, h = field.m, field.step
    s, t = _square(field)
    u_s, u_t = np.gradient(field.values, h, edge_order=2)
    density = 0.5 * (u_s**2 + u_t**2) + potential(field.values)
    weight = sphere_area(m) ** 2 * s ** (m - 1) * t ** (m - 1)
    r = np.hypot(s, t)
    grid = _full_grid(field)
    # Indicator of the ball ramped over one cell, second order in h.
    energies = [
        quadrature(density, grid, weight * np.clip((radius - r) / h + 0.5, 0, 1))
        for radius in radii
    ]
    slope, _ = np.polyfit(np.log(radii), np.log(energies), 1)
    return EnergyGrowth(
        m=m, radii=list(radii), energies=energies, exponent=float(slope)
    )


def monotonicity_violations(field: SaddleField, tol: float = 1e-8) -> int:
    """Count grid pairs where u decreases by more than tol along (1, -1)."""
    u = field.values
    return int(np.sum(u[1:, :-1] < u[:-1, 1:] - tol))


def sign_violations(field: SaddleField) -> int:
    """Count nodes of {s > t}, off s = L, where u is not in (0, 1)."""
    u = field.values
    i, j = np.indices(u.shape)
    inside = (j < i) & (i < u.shape[0] - 1)
    return int(np.sum((u[inside] <= 0) | (u[inside] >= 1)))


class SupersolutionFields:
    """Derivatives of u and the sample set shared by every exponent b."""

    def __init__(self, field: SaddleField, axis_margin: float, far_fraction: float):
        h = field.step
        self.m = field.m
        self.s, self.t = _square(field)
        self.u = field.values
        self.u_s, self.u_t = np.gradient(field.values, h, edge_order=2)
        self.u_st = np.gradient(self.u_s, h, axis=1, edge_order=2)
        self.h = h
        self.positive = (self.s > 0) & (self.t > 0)
        self.sample = (
            (self.t <= self.s)
            & (self.t >= axis_margin)
            & (np.hypot(self.s, self.t) <= far_fraction * field.length)
        )
        if not self.sample.any():
            raise DomainError("The supersolution sample set is empty")

    def _coordinates(self) -> tuple[np.ndarray, np.ndarray]:
        s = np.where(self.positive, self.s, 1.0)
        t = np.where(self.positive, self.t, 1.0)
        return s, t

    def phi(self, b: float) -> np.ndarray:
        s, t = self._coordinates()
        value = t**-b * self.u_s - s**-b * self.u_t
        return np.where(self.positive, value, np.nan)

    def commuted(self, b: float) -> np.ndarray:
        """(Laplacian + f'(u)) phi written with u_s, u_t and u_st.

        Differentiating the equation gives (L + f'(u)) u_s = (m - 1) u_s / s^2 and
        the same with t, where L is the Laplacian of R^(2m) in (s, t).
        """
        m = self.m
        s, t = self._coordinates()
        first = (m - 1) * (t**-b * self.u_s / s**2 - s**-b * self.u_t / t**2)
        second = b * (b + 2 - m) * (self.u_s * t ** (-b - 2) - self.u_t * s ** (-b - 2))
        mixed = -2 * b * self.u_st * (t ** (-b - 1) - s ** (-b - 1))
        return np.where(self.positive, first + second + mixed, np.nan)

    def direct(self, b: float) -> np.ndarray:
        """(Laplacian + f'(u)) phi with phi differenced on the grid."""
        phi = self.phi(b)
        h, m = self.h, self.m
        s, t = self._coordinates()
        phi_s, phi_t = np.gradient(phi, h, edge_order=2)
        phi_ss = np.gradient(phi_s, h, axis=0, edge_order=2)
        phi_tt = np.gradient(phi_t, h, axis=1, edge_order=2)
        image = phi_ss + phi_tt + (m - 1) * (phi_s / s + phi_t / t)
        return image + (1.0 - 3.0 * self.u**2) * phi

    def probe(self, b: float) -> SupersolutionProbe:
        sample = self.sample
        with np.errstate(invalid="ignore"):
            direct = self.direct(b)[sample]
        direct = direct[np.isfinite(direct)]
        return SupersolutionProbe(
            b=b,
            min_phi=float(np.min(self.phi(b)[sample])),
            max_defect=float(np.max(self.commuted(b)[sample])),
            max_defect_direct=float(direct.max()) if direct.size else float("nan"),
        )


def _bisect_sign_change(
    fields: SupersolutionFields,
    low: SupersolutionProbe,
    high: SupersolutionProbe,
    steps: int,
    tol: float,
) -> list[SupersolutionProbe]:
    probes = []
    for _ in range(steps):
        middle = fields.probe(0.5 * (low.b + high.b))
        probes.append(middle)
        if (middle.max_defect <= tol) == (low.max_defect <= tol):
            low = middle
        else:
            high = middle
    return probes


def stability_quotient(
    field: SaddleField, inner: float, outer: float, *, amplitude: float = 1.0
) -> float:
    """Rayleigh quotient int (|grad xi|^2 - f'(u) xi^2) / int xi^2 in R^(2m).

    xi = amplitude * sin^2(pi (r - inner) / (outer - inner)) on inner <= r <= outer
    with r = |(s, t)|, and the measure is s^(m-1) t^(m-1) ds dt.

    Raises:
        DomainError: If the annulus is empty or leaves the square.

    """
    if not 0 <= inner < outer <= field.length:
        raise DomainError(f"Invalid probe annulus [{inner}, {outer}]")
    s, t = _square(field)
    r = np.hypot(s, t)
    width = outer - inner
    x = np.clip((r - inner) / width, 0.0, 1.0)
    xi = amplitude * np.sin(np.pi * x) ** 2
    slope = amplitude * np.pi / width * np.sin(2 * np.pi * x)
    weight = s ** (field.m - 1) * t ** (field.m - 1)
    grid = _full_grid(field)
    energy = slope**2 - (1.0 - 3.0 * field.values**2) * xi**2
    mass = quadrature(xi**2, grid, weight)
    if mass <= 0:
        raise DomainError("The probe vanishes on the grid")
    return quadrature(energy, grid, weight) / mass


def supersolution_check(
    field: SaddleField,
    b_values: Sequence[float],
    *,
    tol: float = 1e-6,
    axis_margin: float = 0.5,
    far_fraction: float = 0.5,
    refine_steps: int = 6,
    probes: Sequence[tuple[float, float]] = DEFAULT_PROBES,
    logger: Logger | None = None,
) -> SupersolutionReport:
    """Scan phi = t^-b u_s - s^-b u_t for a positive supersolution of the linearization.

    For each b the smallest phi and the largest (Laplacian + f'(u)) phi are taken over
    the sample set {t <= s, t >= axis_margin, |(s, t)| <= far_fraction L}. Between
    consecutive b where the defect test changes outcome, b is refined by bisection.
    The witness is the passing b with the most negative defect. Rayleigh quotients of
    radial bumps supported in the probe annuli complete the report.

    Raises:
        DomainError: If a b is not positive, the sample set is empty or a probe
            annulus is invalid.

    """
    if not b_values or min(b_values) <= 0:
        raise DomainError(f"Exponents b must be positive, got {list(b_values)}")
    fields = SupersolutionFields(field, axis_margin, far_fraction)
    scan = [fields.probe(b) for b in sorted(b_values)]
    refined = []
    for low, high in zip(scan, scan[1:], strict=False):
        if (low.max_defect <= tol) != (high.max_defect <= tol):
            refined += _bisect_sign_change(fields, low, high, refine_steps, tol)
    results = sorted(scan + refined, key=lambda p: p.b)
    passing = [p for p in results if p.is_witness(tol)]
    witness = min(passing, key=lambda p: p.max_defect) if passing else None
    quotients = [
        RayleighQuotient(
            inner=inner, outer=outer, quotient=stability_quotient(field, inner, outer)
        )
        for inner, outer in probes
    ]
    if logger is not None:
        found = f"b={witness.b:g}" if witness is not None else "none"
        msg = (
            f"Supersolution scan m={field.m}: {len(results)} exponents, "
            f"witness {found}"
        )
        logger.info(msg)
    return SupersolutionReport(
        m=field.m,
        samples=int(fields.sample.sum()),
        probes=results,
        witness=witness,
        quotients=quotients,
    )


def write_saddle_checkpoint(field: SaddleField, path: Path) -> Path:
    """Write the field as a grid checkpoint with header m, L, h and residual."""
    header = {
        "m": field.m,
        "L": field.length,
        "h": field.step,
        "residual": field.residual,
        "iterations": field.iterations,
        "converged": int(field.converged),
    }
    return write_grid_checkpoint(path, header, field.values)


def read_saddle_checkpoint(path: Path) -> SaddleField:
    """Rebuild a SaddleField from a grid checkpoint.

    Raises:
        DomainError: If the checkpoint is malformed or does not match its grid.

    """
    header, values = read_grid_checkpoint(path)
    try:
        grid = Grid2D.lower_triangle(header["L"], header["h"])
        return SaddleField(
            m=int(header["m"]),
            length=header["L"],
            grid=grid,
            values=values,
            residual=header["residual"],
            iterations=int(header.get("iterations", 0)),
            converged=bool(header.get("converged", 1)),
        )
    except (KeyError, ValueError) as e:
        raise DomainError(f"Checkpoint {path} is not a saddle field: {e}") from e
