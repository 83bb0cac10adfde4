"""Neumann calibration of a planar domain and the gradient image of its contact set.

The solution of

    Laplacian u = c in Omega,    u_nu = 1 on the boundary,    c = |boundary| / |Omega|

has lower contact set Gamma_u, the points where a tangent plane stays below u, and
every p in the open unit disk is attained as grad u(y) for some y in Gamma_u.

Each domain is meshed in boundary fitted orthogonal coordinates: polar for the disk,
elliptic for the ellipse and Cartesian for the rectangle. The five point stencil is
written in finite volume form on that logical grid, with half cells on the boundary
carrying the flux u_nu = 1, which is the ghost node condition after elimination.
Summing the rows shows that the discrete problem is compatible exactly when c is the
discrete perimeter over the discrete area.
"""

import math
from logging import Logger
from pathlib import Path
from typing import NamedTuple

import numpy as np
from scipy import sparse
from scipy.sparse import linalg

from stablelab.exceptions import DomainError, SolverError
from stablelab.experiments.artifacts import write_csv
from stablelab.isoperimetric.schemas import (
    CoverageReport,
    NeumannSolution,
    PlanarDomain,
)
from stablelab.numerics.checkpoint import write_grid_checkpoint

MIN_INTERIOR_NODES = 30
GOLDEN = 0.5 * (math.sqrt(5.0) - 1.0)


class _ControlVolumes(NamedTuple):
    x: np.ndarray
    y: np.ndarray
    volume: np.ndarray
    boundary_length: np.ndarray
    edges: np.ndarray
    coefficients: np.ndarray


def _grid_edges(
    shape: tuple[int, int],
    radial: np.ndarray,
    angular: np.ndarray,
    *,
    periodic: bool,
) -> tuple[np.ndarray, np.ndarray]:
    """Return face pairs and conductances of a rows x cols logical grid.

    radial[i, j] couples (i, j) with (i + 1, j); angular[i, j] couples (i, j) with
    (i, j + 1), wrapping around the last column when periodic.
    """
    index = np.arange(shape[0] * shape[1]).reshape(shape)
    pairs = [np.stack([index[:-1].ravel(), index[1:].ravel()], axis=1)]
    weights = [radial.ravel()]
    if periodic:
        pairs.append(
            np.stack([index.ravel(), np.roll(index, -1, axis=1).ravel()], axis=1)
        )
        weights.append(angular.ravel())
    else:
        pairs.append(np.stack([index[:, :-1].ravel(), index[:, 1:].ravel()], axis=1))
        weights.append(angular[:, :-1].ravel())
    return np.concatenate(pairs), np.concatenate(weights)


def _row_extents(step: float, rows: int, outer: float) -> tuple[np.ndarray, ...]:
    """Return centers (i + 1/2) step and cell bounds, the last cell ending at outer."""
    centers = (np.arange(rows) + 0.5) * step
    lower = np.arange(rows) * step
    upper = np.minimum(centers + 0.5 * step, outer)
    return centers, lower, upper


def _angles(count: int) -> np.ndarray:
    return 2.0 * math.pi * np.arange(count) / count


def _angular_count(length: float, h: float) -> int:
    """Return a multiple of 4 so that the angle grid is symmetric under t -> -t."""
    return 4 * math.ceil(length / (4.0 * h))


def _disk_volumes(domain: PlanarDomain, h: float) -> _ControlVolumes:
    big_r = domain.radius
    rows = math.ceil(big_r / h + 0.5)
    cols = _angular_count(2.0 * math.pi * big_r, h)
    dr, dt = big_r / (rows - 0.5), 2.0 * math.pi / cols
    rho, lower, upper = _row_extents(dr, rows, big_r)
    theta = _angles(cols)
    volume = np.outer(0.5 * dt * (upper**2 - lower**2), np.ones(cols))
    radial = np.outer(upper[:-1] * dt / dr, np.ones(cols))
    angular = np.outer((upper - lower) / (rho * dt), np.ones(cols))
    edges, coefficients = _grid_edges((rows, cols), radial, angular, periodic=True)
    boundary_length = np.zeros((rows, cols))
    boundary_length[-1] = big_r * dt
    return _ControlVolumes(
        x=np.outer(rho, np.cos(theta)),
        y=np.outer(rho, np.sin(theta)),
        volume=volume,
        boundary_length=boundary_length,
        edges=edges,
        coefficients=coefficients,
    )


def _ellipse_volumes(domain: PlanarDomain, h: float) -> _ControlVolumes:
    """Elliptic coordinates x = f cosh(mu) cos(nu), y = f sinh(mu) sin(nu).

    The map is conformal with scale factor s = f sqrt(sinh^2 mu + sin^2 nu), so the
    conductances are those of the flat logical grid. The first row sits at mu = dmu / 2
    and is coupled across the focal segment to its mirror image nu -> -nu.
    """
    a, b = domain.semi_major, domain.semi_minor
    focal = math.sqrt(a * a - b * b)
    outer = math.atanh(b / a)
    rows = math.ceil(outer * a / h + 0.5)
    cols = _angular_count(2.0 * math.pi * a, h)
    dmu, dnu = outer / (rows - 0.5), 2.0 * math.pi / cols
    mu, lower, upper = _row_extents(dmu, rows, outer)
    nu = _angles(cols)

    def primitive(t: np.ndarray) -> np.ndarray:
        return 0.25 * np.sinh(2.0 * t) - 0.5 * t

    volume = (
        dnu
        * focal**2
        * (
            (primitive(upper) - primitive(lower))[:, None]
            + np.outer(upper - lower, np.sin(nu) ** 2)
        )
    )
    radial = np.full((rows - 1, cols), dnu / dmu)
    angular = np.outer((upper - lower) / dnu, np.ones(cols))
    edges, coefficients = _grid_edges((rows, cols), radial, angular, periodic=True)
    mirror = (cols - np.arange(cols)) % cols
    seam = np.arange(cols) < mirror
    first = np.arange(cols)
    edges = np.concatenate([edges, np.stack([first[seam], mirror[seam]], axis=1)])
    coefficients = np.concatenate([coefficients, np.full(int(seam.sum()), dnu / dmu)])
    boundary_length = np.zeros((rows, cols))
    boundary_length[-1] = focal * np.sqrt(np.sinh(outer) ** 2 + np.sin(nu) ** 2) * dnu
    return _ControlVolumes(
        x=focal * np.outer(np.cosh(mu), np.cos(nu)),
        y=focal * np.outer(np.sinh(mu), np.sin(nu)),
        volume=volume,
        boundary_length=boundary_length,
        edges=edges,
        coefficients=coefficients,
    )


def _rectangle_volumes(domain: PlanarDomain, h: float) -> _ControlVolumes:
    rows = math.ceil(domain.width / h) + 1
    cols = math.ceil(domain.height / h) + 1
    hx, hy = domain.width / (rows - 1), domain.height / (cols - 1)
    wx, wy = np.full(rows, hx), np.full(cols, hy)
    wx[[0, -1]] *= 0.5
    wy[[0, -1]] *= 0.5
    radial = np.outer(np.ones(rows - 1), wy / hx)
    angular = np.outer(wx / hy, np.ones(cols))
    edges, coefficients = _grid_edges((rows, cols), radial, angular, periodic=False)
    boundary_length = np.zeros((rows, cols))
    boundary_length[[0, -1], :] += wy
    boundary_length[:, [0, -1]] += wx[:, None]
    x = -0.5 * domain.width + hx * np.arange(rows)
    y = -0.5 * domain.height + hy * np.arange(cols)
    return _ControlVolumes(
        x=np.outer(x, np.ones(cols)),
        y=np.outer(np.ones(rows), y),
        volume=np.outer(wx, wy),
        boundary_length=boundary_length,
        edges=edges,
        coefficients=coefficients,
    )


def interior_nodes_per_axis(domain: PlanarDomain, h: float) -> int:
    """Return the number of interior nodes of step h across the shortest axis."""
    if domain.kind == "disk":
        extent = 2.0 * domain.radius
    elif domain.kind == "rectangle":
        extent = min(domain.width, domain.height)
    else:
        extent = 2.0 * domain.semi_minor
    return math.ceil(extent / h) - 1


def _laplacian(mesh: _ControlVolumes) -> sparse.csr_matrix:
    """Return L with (L u)_a = sum over faces of k (u_b - u_a)."""
    a, b = mesh.edges[:, 0], mesh.edges[:, 1]
    k = mesh.coefficients
    size = mesh.volume.size
    return sparse.csr_matrix(
        (
            np.concatenate([k, k, -k, -k]),
            (np.concatenate([a, b, a, b]), np.concatenate([b, a, a, b])),
        ),
        shape=(size, size),
    )


def solve_neumann_calibration(
    domain: PlanarDomain, h: float, *, logger: Logger | None = None
) -> NeumannSolution:
    """Solve Laplacian u = c with u_nu = 1 and zero mean.

    The additive constant is fixed by a Lagrange multiplier on the discrete mean, so
    the bordered system is regular whenever the Laplacian has the constants as its
    only kernel.

    Args:
        domain (PlanarDomain): Disk, rectangle or ellipse.
        h (float): Nominal mesh size.
        logger (Logger | None): Progress logger.

    Returns:
        NeumannSolution: Nodal values with their residuals.

    Raises:
        DomainError: If h leaves fewer than 30 interior nodes across an axis.
        SolverError: If the bordered system is singular.

    """
    if h <= 0 or interior_nodes_per_axis(domain, h) < MIN_INTERIOR_NODES:
        raise DomainError(
            f"Step h={h} does not resolve the {domain.kind}: at least "
            f"{MIN_INTERIOR_NODES} interior nodes per axis are needed"
        )
    if domain.kind == "disk":
        mesh = _disk_volumes(domain, h)
    elif domain.kind == "ellipse":
        mesh = _ellipse_volumes(domain, h)
    else:
        mesh = _rectangle_volumes(domain, h)

    volume = mesh.volume.ravel()
    flux = mesh.boundary_length.ravel()
    area, perimeter = float(volume.sum()), float(flux.sum())
    c = perimeter / area
    laplacian = _laplacian(mesh)
    column = sparse.csr_matrix(volume[:, None])
    bordered = sparse.bmat(
        [[laplacian, column], [column.T, None]], format="csc"
    )
    rhs = np.append(c * volume - flux, 0.0)
    try:
        solution = linalg.spsolve(bordered, rhs)
    except RuntimeError as e:
        raise SolverError(f"Singular Neumann system: {e}") from e
    if not np.all(np.isfinite(solution)):
        raise SolverError("Singular Neumann system")
    u = solution[:-1]

    residual = np.abs(laplacian @ u + flux - c * volume) / volume
    on_boundary = flux > 0
    sol = NeumannSolution(
        domain=domain,
        step=h,
        x=mesh.x,
        y=mesh.y,
        values=u.reshape(mesh.volume.shape),
        volumes=mesh.volume,
        boundary=on_boundary.reshape(mesh.volume.shape),
        edges=mesh.edges,
        constant=c,
        discrete_perimeter=perimeter,
        discrete_area=area,
        interior_residual=float(np.max(residual[~on_boundary])),
        boundary_residual=float(np.max(residual[on_boundary])),
    )
    if logger is not None:
        msg = (
            f"Neumann {domain.kind} h={h}: {u.size} nodes, c={c:.10g}, "
            f"residuals {sol.interior_residual:.2e} / {sol.boundary_residual:.2e}"
        )
        logger.info(msg)
    return sol


def sample_directions(
    count: int, *, seed: int = 0, magnitude: float | None = None
) -> np.ndarray:
    """Return count points p as rows.

    Without magnitude the points stratify the open unit disk in equal area rings,
    jittered by seed, on golden angle rays. With a magnitude they are spread on the
    circle |p| = magnitude.
    """
    k = np.arange(count)
    rng = np.random.default_rng(seed)
    if magnitude is None:
        radius = np.sqrt((k + rng.uniform(0.05, 0.95, count)) / count)
        angle = 2.0 * math.pi * ((k * GOLDEN) % 1.0)
    else:
        radius = np.full(count, magnitude)
        angle = 2.0 * math.pi * (k + rng.uniform(0.0, 1.0)) / count
    return np.stack([radius * np.cos(angle), radius * np.sin(angle)], axis=1)


def contact_set_coverage(
    sol: NeumannSolution,
    directions: np.ndarray,
    *,
    gradient_factor: float = 2.0,
) -> CoverageReport:
    """Count the directions p attained by grad u on the interior contact set.

    For every p the grid minimizer y of u(y) - p . y is a contact point, its tangent
    plane staying below u over the whole grid. p is covered when y is an interior node
    and grad u(y) = p within gradient_factor * h. Minimizers on boundary nodes never
    count as covered.
    """
    directions = np.atleast_2d(np.asarray(directions, dtype=float))
    x, y, u = sol.x.ravel(), sol.y.ravel(), sol.values.ravel()
    gx, gy = (g.ravel() for g in sol.gradient())
    boundary = sol.boundary.ravel()
    tolerance = gradient_factor * sol.step
    resolved = np.hypot(directions[:, 0], directions[:, 1]) <= 1.0 - tolerance
    hits = np.zeros(len(directions), dtype=bool)
    on_boundary, worst = 0, 0.0
    for n, (px, py) in enumerate(directions):
        k = int(np.argmin(u - px * x - py * y))
        gap = math.hypot(gx[k] - px, gy[k] - py)
        worst = max(worst, gap)
        on_boundary += bool(boundary[k])
        hits[n] = gap <= tolerance and not boundary[k]
    return CoverageReport(
        samples=len(directions),
        covered=int(hits.sum()),
        boundary_minimizers=on_boundary,
        resolved=int(resolved.sum()),
        resolved_covered=int(hits[resolved].sum()),
        max_gradient_gap=worst,
        tolerance=tolerance,
    )


def isoperimetric_ratio(domain: PlanarDomain) -> float:
    """Return |boundary| / |Omega|^(1/2)."""
    return domain.perimeter / math.sqrt(domain.area)


def write_neumann_checkpoint(sol: NeumannSolution, path: Path) -> Path:
    """Write the nodal values of u on the logical grid."""
    header = {
        "h": sol.step,
        "c": sol.constant,
        "area": sol.discrete_area,
        "perimeter": sol.discrete_perimeter,
    }
    return write_grid_checkpoint(path, header, sol.values)


def write_boundary_polyline(
    domain: PlanarDomain, output_dir: Path, name: str, fraction: float = 0.1
) -> str:
    """Write the closed boundary polyline as x, y rows."""
    x, y = domain.boundary_polyline(fraction)
    return write_csv(output_dir, name, ["x", "y"], zip(x, y, strict=True))
