"""Pydantic models for Hardy quotients and the inverse square potential."""

import math
from typing import Annotated

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from stablelab.numerics.quadrature import quadrature
from stablelab.numerics.schemas import Mesh1D

RAMP_NODES = 201


class RadialTestFunction(BaseModel):
    """Radial function r^-alpha - 1 on [rho, 1], a linear ramp on [rho/2, rho], 0 below.

    It vanishes at r = 1 and near the origin and is Lipschitz.
    """

    alpha: Annotated[float, Field(gt=0, description="Exponent")]
    rho: Annotated[float, Field(gt=0, lt=1, description="Inner cutoff radius")]

    def values(self, r: np.ndarray) -> np.ndarray:
        """Evaluate the function on an array of radii."""
        r = np.asarray(r, dtype=float)
        edge = self.rho ** (-self.alpha) - 1.0
        ramp = edge * (2.0 * r / self.rho - 1.0)
        inner = np.where(r >= 0.5 * self.rho, ramp, 0.0)
        with np.errstate(divide="ignore"):
            power = r ** (-self.alpha) - 1.0
        return np.where(r >= self.rho, np.where(r <= 1.0, power, 0.0), inner)

    def integrals(self, n: int, *, nodes_per_decade: int = 50) -> tuple[float, ...]:
        """Return int xi'^2 r^{n-1}, int xi^2 r^{n-3} and int xi^2 r^{n-1} over (0, 1).

        The ramp is integrated in the variable x = r / rho and the power piece on a
        geometric mesh with every integrand written as a sum of pure powers, so that
        cutoffs down to 1e-300 neither overflow nor underflow harmfully.
        """
        alpha, rho = self.alpha, self.rho
        half = 0.5 * (n - 2)
        # xi(rho)^2 rho^{n-2}, written without the overflowing factor rho^-alpha.
        scale = (rho ** (half - alpha) - rho**half) ** 2
        x = Mesh1D.uniform(0.5, 1.0, RAMP_NODES)
        ramp_gradient = 4.0 * scale * quadrature(lambda s: s ** (n - 1), x)
        ramp_hardy = scale * quadrature(lambda s: (2 * s - 1) ** 2 * s ** (n - 3), x)
        ramp_mass = scale * rho**2 * quadrature(
            lambda s: (2 * s - 1) ** 2 * s ** (n - 1), x
        )

        decades = -math.log10(rho)
        mesh = Mesh1D.geometric(rho, 1.0, max(3, math.ceil(decades * nodes_per_decade)))

        def pure(power: float) -> float:
            return quadrature(lambda r: r**power, mesh)

        gradient = alpha**2 * pure(n - 3 - 2 * alpha)
        hardy = pure(n - 3 - 2 * alpha) - 2 * pure(n - 3 - alpha) + pure(n - 3)
        mass = pure(n - 1 - 2 * alpha) - 2 * pure(n - 1 - alpha) + pure(n - 1)
        return gradient + ramp_gradient, hardy + ramp_hardy, mass + ramp_mass


class HardySharpness(BaseModel):
    """Witness of the sharpness of the Hardy constant."""

    n: int
    alpha: float
    rho: float
    ratio: Annotated[
        float, Field(description="int xi'^2 r^{n-1} / int xi^2 r^{n-3}")
    ]
    target: Annotated[float, Field(description="(n - 2)^2 / 4")]
    relative_error: float
    converged: Annotated[
        bool, Field(description="False when the search budget ran out")
    ]


class GroundStateStudy(BaseModel):
    """Smallest radial eigenvalue of -Laplacian - a / r^2 for several truncations."""

    n: int
    a: float
    rmin_values: list[float]
    eigenvalues: list[float]

    @property
    def spread(self) -> float:
        """Return (max - min) / |mean| of the eigenvalues."""
        values = np.asarray(self.eigenvalues)
        return float(np.ptp(values) / abs(np.mean(values)))

    @property
    def scaled(self) -> list[float]:
        """Return mu_1 r_min^2 for every truncation."""
        pairs = zip(self.eigenvalues, self.rmin_values, strict=True)
        return [mu * r**2 for mu, r in pairs]


class HardyParams(BaseModel):
    """Parameters of the hardy experiment."""

    model_config = ConfigDict(extra="forbid")

    sharpness_dimensions: Annotated[
        list[int],
        Field(default=[3, 10], description="Dimensions of the sharpness probe"),
    ]
    sharpness_tolerance: Annotated[
        float,
        Field(default=0.05, gt=0, description="Relative distance to (n - 2)^2 / 4"),
    ]
    deltas: Annotated[
        list[float],
        Field(
            default=[0.1, 0.05, 0.02, 0.01, 0.005, 0.002, 0.001, 5e-4],
            description="Searched values of alpha - (n - 2) / 2",
        ),
    ]
    rhos: Annotated[
        list[float],
        Field(
            default=[1e-4, 1e-8, 1e-16, 1e-32, 1e-64, 1e-128, 1e-256],
            description="Searched inner cutoff radii",
        ),
    ]
    nodes_per_decade: Annotated[
        int, Field(default=50, ge=5, description="Resolution of the probe quadrature")
    ]
    spectral_dimension: Annotated[
        int, Field(default=10, ge=3, description="Dimension of the spectral study")
    ]
    rmin_values: Annotated[
        list[float],
        Field(default=[1e-2, 1e-3, 1e-4], description="Truncation radii"),
    ]
    subcritical_offset: Annotated[
        float, Field(default=-1.0, lt=0, description="a - (n - 2)^2 / 4 below")
    ]
    supercritical_offset: Annotated[
        float, Field(default=1.0, gt=0, description="a - (n - 2)^2 / 4 above")
    ]
    stability_spread: Annotated[
        float,
        Field(default=0.1, gt=0, description="Largest relative spread when a is below"),
    ]
    divergence_threshold: Annotated[
        float,
        Field(default=-1e3, lt=0, description="mu_1 bound at the smallest r_min"),
    ]
    quotient_offset: Annotated[
        float,
        Field(default=-0.5, description="a - (n - 2)^2 / 4 of the quotient scan"),
    ]
    quotient_floor: Annotated[
        float, Field(default=-1e3, description="Lower bound of the quotient scan")
    ]
    mesh_nodes_per_decade: Annotated[
        int, Field(default=100, ge=10, description="Graded mesh near r_min")
    ]
    mesh_max_spacing: Annotated[
        float, Field(default=1e-3, gt=0, description="Graded mesh away from r_min")
    ]
