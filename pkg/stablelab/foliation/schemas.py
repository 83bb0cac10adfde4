"""Pydantic models for minimal leaves in the (s, t) quarter plane."""

from typing import Annotated, Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from typing_extensions import Self

from stablelab.numerics.schemas import FloatArray, NumericModel

IntegrationMode = Literal["fixed", "adaptive"]


class LeafTrajectory(NumericModel):
    """Arc-length parametrized leaf launched from (s0, 0) with vertical tangent.

    The leaf generates a minimal hypersurface of R^{2m} invariant under
    O(m) x O(m), with s = |x'| and t = |x''|.
    """

    m: Annotated[int, Field(ge=2)]
    s0: Annotated[float, Field(gt=0, description="Initial s-intercept")]
    tau: Annotated[FloatArray, Field(description="Arc length")]
    s: FloatArray
    t: FloatArray
    ds: Annotated[FloatArray, Field(description="s'(tau)")]
    dt: Annotated[FloatArray, Field(description="t'(tau)")]
    crossings: Annotated[
        FloatArray,
        Field(
            default_factory=lambda: np.zeros(0),
            description="Arc lengths at which the leaf crosses the Simons cone s = t",
        ),
    ]
    reason: Annotated[str, Field(default="completed", description="Why it ended")]

    @model_validator(mode="after")
    def verify_samples(self) -> Self:
        """Validate sample lengths, the quarter plane and regularity.

        Raises:
            ValueError: If the sample arrays differ in length, a sample leaves the
                closed quarter plane or the tangent vanishes.

        Returns:
            Self: Returns the current instance for method chaining.

        """
        size = self.tau.size
        if any(a.size != size for a in (self.s, self.t, self.ds, self.dt)):
            raise ValueError("Leaf sample arrays must have the same length")
        if np.any(self.s < 0) or np.any(self.t < 0):
            raise ValueError("Leaf samples must satisfy s, t >= 0")
        if np.any(self.ds**2 + self.dt**2 <= 0):
            raise ValueError("Leaf tangent must not vanish")
        return self

    @property
    def radius(self) -> np.ndarray:
        """Return sqrt(s^2 + t^2) at every sample."""
        return np.hypot(self.s, self.t)

    @property
    def theta(self) -> np.ndarray:
        """Return the polar angle atan2(t, s) at every sample."""
        return np.arctan2(self.t, self.s)

    @property
    def crossing_count(self) -> int:
        """Return the number of cone crossings."""
        return int(self.crossings.size)


class AngularLeaf(NumericModel):
    """Leaf written as (s, t) = e^z (cos theta, sin theta)."""

    m: Annotated[int, Field(ge=2)]
    theta: Annotated[FloatArray, Field(description="Strictly increasing angles")]
    z: FloatArray
    dz: Annotated[FloatArray, Field(description="z'(theta)")]
    reason: Annotated[str, Field(default="completed", description="Why it ended")]

    @model_validator(mode="after")
    def verify_angles(self) -> Self:
        """Validate sample lengths and the ordering of the angles.

        Raises:
            ValueError: If the arrays differ in length or theta is not strictly
                increasing inside (0, pi/2).

        Returns:
            Self: Returns the current instance for method chaining.

        """
        if self.z.size != self.theta.size or self.dz.size != self.theta.size:
            raise ValueError("Angular leaf arrays must have the same length")
        if np.any(np.diff(self.theta) <= 0):
            raise ValueError("Angles must be strictly increasing")
        if self.theta.size and (self.theta[0] <= 0 or self.theta[-1] >= np.pi / 2):
            raise ValueError("Angles must lie in (0, pi/2)")
        return self

    def points(self) -> tuple[np.ndarray, np.ndarray]:
        """Return the (s, t) coordinates of the samples."""
        r = np.exp(self.z)
        return r * np.cos(self.theta), r * np.sin(self.theta)


class LeafSummary(BaseModel):
    """Crossing and occupancy data of one leaf."""

    s0: float
    crossings: Annotated[int, Field(ge=0)]
    crossing_radii: Annotated[list[float], Field(default_factory=list)]
    outside_fraction: Annotated[
        float, Field(description="Fraction of samples with s > t")
    ]
    reason: str


class LeafDistance(BaseModel):
    """Minimum distance of two leaves inside an annulus."""

    s0_first: float
    s0_second: float
    min_distance: Annotated[
        float | None,
        Field(description="None when a leaf has no sample inside the annulus"),
    ]


class FoliationReport(BaseModel):
    """Per-leaf crossing counts and pairwise leaf distances."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    m: int
    annulus: tuple[float, float]
    leaves: Annotated[list[LeafSummary], Field(default_factory=list)]
    pairs: Annotated[list[LeafDistance], Field(default_factory=list)]
    trajectories: Annotated[
        list[LeafTrajectory], Field(default_factory=list, exclude=True)
    ]


class LinearizedRate(BaseModel):
    """Exponents of the Jacobi equation of the Simons cone along rays."""

    n: int
    real_part: Annotated[float, Field(description="Common real part of the roots")]
    omega: Annotated[
        float | None, Field(description="Imaginary part, None for real roots")
    ]
    crossing_ratio: Annotated[
        float | None,
        Field(description="Ratio e^(pi / omega) of consecutive crossing radii"),
    ]


class FoliationParams(BaseModel):
    """Parameters of the foliation experiment."""

    model_config = ConfigDict(extra="forbid")

    dimensions_m: Annotated[
        list[int], Field(default=[2, 3, 4], description="Values of m, n = 2m")
    ]
    s0_values: Annotated[
        list[float],
        Field(default=[0.5, 1.0, 2.0], description="Strictly increasing intercepts"),
    ]
    tau_max: Annotated[float, Field(default=200.0, gt=0, description="Arc length")]
    bound: Annotated[
        float,
        Field(default=1e3, gt=0, description="Stop once s or t exceeds this value"),
    ]
    tol: Annotated[
        float, Field(default=1e-10, gt=0, description="Adaptive local tolerance")
    ]
    mode: Annotated[
        IntegrationMode, Field(default="adaptive", description="fixed or adaptive")
    ]
    annulus: Annotated[
        tuple[float, float],
        Field(default=(0.1, 10.0), description="Annulus of the distance check"),
    ]
    crossing_s0: Annotated[
        float,
        Field(default=1.0, gt=0, description="Leaf asserting crossings when n < 8"),
    ]
    min_crossings: Annotated[
        int, Field(default=2, ge=1, description="Crossings required when n < 8")
    ]
    refinement_tolerance: Annotated[
        float,
        Field(
            default=1e-6,
            gt=0,
            description="Largest change of the samples when the tolerance is halved",
        ),
    ]
    cross_check_m: Annotated[
        int, Field(default=4, ge=2, description="m of the angular cross-check")
    ]
    theta_range: Annotated[
        tuple[float, float],
        Field(default=(0.2, 0.6), description="Angles of the angular cross-check"),
    ]
    angular_tolerance: Annotated[
        float,
        Field(default=1e-5, gt=0, description="Angular / parametric agreement"),
    ]
    export_leaves: Annotated[
        bool, Field(default=True, description="Write one CSV per leaf")
    ]
