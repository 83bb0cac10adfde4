"""Pydantic models for Allen-Cahn layer and saddle-shaped solutions."""

import math
from typing import Annotated, Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from typing_extensions import Self

from stablelab.numerics.schemas import FloatArray, Grid2D, NumericModel

SaddleMethod = Literal["newton", "newton-gauss-seidel"]
LAYER_ENERGY = 2.0 * math.sqrt(2.0) / 3.0


class LayerProfile(BaseModel):
    """Monotone one-dimensional solution u*(y) = tanh(y / sqrt(2)) of -u'' = u - u^3."""

    def value(self, y: np.ndarray) -> np.ndarray:
        """Return u*(y)."""
        return np.tanh(np.asarray(y, dtype=float) / math.sqrt(2.0))

    def derivative(self, y: np.ndarray) -> np.ndarray:
        """Return u*'(y) = (1 - u*^2) / sqrt(2)."""
        u = self.value(y)
        return (1.0 - u**2) / math.sqrt(2.0)

    def second_derivative(self, y: np.ndarray) -> np.ndarray:
        """Return u*''(y) = -u* (1 - u*^2)."""
        u = self.value(y)
        return -u * (1.0 - u**2)


class LayerCheck(BaseModel):
    """Residual, energy and oddness of the layer solution."""

    max_residual: float
    energy: Annotated[float, Field(description="Energy per unit area")]
    oracle: Annotated[
        float, Field(description="Adaptive quadrature of (1 - u^2) / sqrt(2) du")
    ]
    odd_defect: Annotated[float, Field(description="max |u(-y) + u(y)|")]


class SaddleField(NumericModel):
    """Saddle-shaped solution on the triangle {0 <= t <= s <= L}.

    values holds the whole square [0, L]^2, with axis 0 the s index and axis 1 the
    t index, completed by the odd extension u(t, s) = -u(s, t).
    """

    m: Annotated[int, Field(ge=1, description="n = 2m")]
    length: Annotated[float, Field(gt=0, description="Side L of the triangle")]
    grid: Annotated[Grid2D, Field(description="Triangle grid, mask t <= s")]
    values: Annotated[FloatArray, Field(description="Nodal values on the square")]
    residual: Annotated[float, Field(description="Max residual at the unknowns")]
    iterations: Annotated[int, Field(ge=0)]
    residual_history: Annotated[list[float], Field(default_factory=list)]
    converged: Annotated[bool, Field(default=True)]

    @model_validator(mode="after")
    def verify_values(self) -> Self:
        """Validate the shape, the zero diagonal and the odd extension.

        Raises:
            ValueError: If the values do not cover the grid, are not zero on the
                diagonal or are not odd under the exchange of s and t.

        Returns:
            Self: Returns the current instance for method chaining.

        """
        if self.values.shape != tuple(self.grid.shape):
            raise ValueError(
                f"Values shape {self.values.shape} differs from {self.grid.shape}"
            )
        if np.any(np.diag(self.values) != 0):
            raise ValueError("A saddle solution vanishes on the diagonal s = t")
        if np.any(self.values != -self.values.T):
            raise ValueError("A saddle solution is odd under s <-> t")
        return self

    @property
    def step(self) -> float:
        """Return the grid step."""
        return self.grid.spacing[0]

    @property
    def axis(self) -> np.ndarray:
        """Return the node coordinates along s (and t)."""
        return self.grid.axes[0]

    def query(self, s: float, t: float) -> float:
        """Return the bilinear interpolation of u at (s, t) in [0, L]^2."""
        h, size = self.step, self.values.shape[0]
        x, y = s / h, t / h
        i = min(max(int(math.floor(x)), 0), size - 2)
        j = min(max(int(math.floor(y)), 0), size - 2)
        a, b = x - i, y - j
        v = self.values
        return float(
            (1 - a) * (1 - b) * v[i, j]
            + a * (1 - b) * v[i + 1, j]
            + (1 - a) * b * v[i, j + 1]
            + a * b * v[i + 1, j + 1]
        )


class EnergyGrowth(BaseModel):
    """Energies E(B_R) of a saddle field and the fitted growth exponent."""

    m: int
    radii: list[float]
    energies: list[float]
    exponent: Annotated[float, Field(description="Least squares slope of log E")]


class SupersolutionProbe(BaseModel):
    """phi = t^-b u_s - s^-b u_t and its linearized operator image at one b."""

    b: Annotated[float, Field(gt=0)]
    min_phi: Annotated[float, Field(description="Smallest phi on the sample set")]
    max_defect: Annotated[
        float, Field(description="Largest (Laplacian + f'(u)) phi, commuted form")
    ]
    max_defect_direct: Annotated[
        float, Field(description="Largest (Laplacian + f'(u)) phi, differenced phi")
    ]

    def is_witness(self, tol: float) -> bool:
        """Return True when phi is a positive supersolution up to tol."""
        return self.min_phi > 0 and self.max_defect <= tol


class RayleighQuotient(BaseModel):
    """Stability quotient of a radial bump supported in an annulus of (s, t)."""

    inner: float
    outer: float
    quotient: float


class SupersolutionReport(BaseModel):
    """Result of the b scan and of the stability probes."""

    m: int
    samples: Annotated[int, Field(description="Nodes of the interior sample set")]
    probes: Annotated[list[SupersolutionProbe], Field(default_factory=list)]
    witness: Annotated[
        SupersolutionProbe | None,
        Field(default=None, description="Witness with the most negative defect"),
    ]
    quotients: Annotated[list[RayleighQuotient], Field(default_factory=list)]


class MinimalityComparison(BaseModel):
    """Energies in B_R of the lifted layer u and of the competitor v_R."""

    n: int
    radius: float
    energy_u: float
    energy_v: float
    energy_v_inner: Annotated[
        float, Field(description="Energy of v_R in B_(R - 1), where v_R = 1")
    ]

    @property
    def scaled_energy(self) -> float:
        """Return E_{B_R}(u) / R^(n - 1)."""
        return self.energy_u / self.radius ** (self.n - 1)


class AllenCahnLayerParams(BaseModel):
    """Parameters of the allen-cahn-layer experiment."""

    model_config = ConfigDict(extra="forbid")

    half_width: Annotated[
        float, Field(default=20.0, gt=0, description="Layer mesh covers [-w, w]")
    ]
    nodes: Annotated[int, Field(default=4001, ge=3, description="Layer mesh nodes")]
    residual_tolerance: Annotated[float, Field(default=1e-10, gt=0)]
    minimality_dimension: Annotated[
        int, Field(default=3, ge=2, description="Dimension of the lifted layer")
    ]
    minimality_radii: Annotated[
        list[float], Field(default=[2.0, 5.0, 10.0, 20.0], description="Ball radii")
    ]
    minimality_step: Annotated[
        float, Field(default=0.025, gt=0, description="Quadrature step")
    ]
    growth_spread: Annotated[
        float,
        Field(default=3.0, gt=1, description="Largest ratio of E(B_R) / R^(n - 1)"),
    ]


class AllenCahnSaddleParams(BaseModel):
    """Parameters of the allen-cahn-saddle experiment."""

    model_config = ConfigDict(extra="forbid")

    m: Annotated[int, Field(default=2, ge=1, description="Saddle in R^(2m)")]
    length: Annotated[float, Field(default=40.0, gt=0, description="Side L")]
    step: Annotated[float, Field(default=0.05, gt=0, description="Grid step h")]
    tol: Annotated[float, Field(default=1e-8, gt=0, description="Max residual")]
    max_iter: Annotated[int, Field(default=50, ge=1, description="Solver budget")]
    method: Annotated[SaddleMethod, Field(default="newton")]
    energy_radii: Annotated[
        list[float],
        Field(default=[8.0, 12.0, 16.0, 20.0], description="Radii of the growth fit"),
    ]
    exponent_window: Annotated[
        float, Field(default=0.2, gt=0, description="Allowed |exponent - (2m - 1)|")
    ]
    stability_m: Annotated[
        int, Field(default=7, ge=1, description="m of the supersolution test")
    ]
    stability_length: Annotated[float, Field(default=30.0, gt=0)]
    stability_step: Annotated[float, Field(default=0.1, gt=0)]
    b_values: Annotated[
        list[float],
        Field(
            default=[0.5 * k for k in range(1, 13)],
            description="Exponents b of the supersolution scan",
        ),
    ]
    refine_steps: Annotated[
        int, Field(default=6, ge=0, description="Bisections around sign changes")
    ]
    axis_margin: Annotated[
        float, Field(default=0.5, gt=0, description="Sample set keeps t >= margin")
    ]
    far_fraction: Annotated[
        float,
        Field(default=0.5, gt=0, le=1, description="Sample set keeps r <= f L"),
    ]
    probes: Annotated[
        list[tuple[float, float]],
        Field(
            default=[(0.0, 3.0), (1.0, 5.0), (2.0, 8.0), (4.0, 12.0)],
            description="Annuli supporting the Rayleigh quotient bumps",
        ),
    ]
    defect_tolerance: Annotated[float, Field(default=1e-6, gt=0)]
    checkpoint: Annotated[
        bool, Field(default=True, description="Write the saddle grid checkpoints")
    ]
