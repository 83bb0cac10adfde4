"""Numerical containers shared by every domain module."""

import math
from typing import Annotated, Any

import numpy as np
from pydantic import BaseModel, BeforeValidator, ConfigDict, Field, model_validator
from scipy import ndimage, sparse
from typing_extensions import Self


def as_float_array(value: Any) -> np.ndarray:
    """Convert sequences to a contiguous float64 numpy array, None is kept."""
    if value is None:
        return None
    return np.ascontiguousarray(value, dtype=float)


def as_bool_array(value: Any) -> np.ndarray:
    """Convert sequences to a boolean numpy array."""
    return np.asarray(value, dtype=bool)


FloatArray = Annotated[np.ndarray, BeforeValidator(as_float_array)]
BoolArray = Annotated[np.ndarray, BeforeValidator(as_bool_array)]


class NumericModel(BaseModel):
    """Base schema for models carrying numpy arrays."""

    model_config = ConfigDict(arbitrary_types_allowed=True)


class Mesh1D(NumericModel):
    """Strictly increasing, possibly graded, 1D mesh."""

    nodes: Annotated[FloatArray, Field(description="Strictly increasing mesh nodes")]

    @model_validator(mode="after")
    def verify_nodes(self) -> Self:
        """Validate the mesh nodes.

        Raises:
            ValueError: If there are less than 3 nodes, a node is not finite or the
                nodes are not strictly increasing.

        Returns:
            Self: Returns the current instance for method chaining.

        """
        if self.nodes.ndim != 1 or self.nodes.size < 3:
            raise ValueError("A mesh needs at least 3 nodes")
        if not np.all(np.isfinite(self.nodes)):
            raise ValueError("Mesh nodes must be finite")
        if np.any(np.diff(self.nodes) <= 0):
            raise ValueError("Mesh nodes must be strictly increasing")
        return self

    @property
    def spacing(self) -> np.ndarray:
        """Return the cell lengths."""
        return np.diff(self.nodes)

    @property
    def size(self) -> int:
        """Return the number of nodes."""
        return int(self.nodes.size)

    @classmethod
    def uniform(cls, start: float, stop: float, num: int) -> "Mesh1D":
        """Build a uniform mesh with num nodes on [start, stop]."""
        return cls(nodes=np.linspace(start, stop, num))

    @classmethod
    def geometric(cls, start: float, stop: float, num: int) -> "Mesh1D":
        """Build a geometric mesh with num nodes on [start, stop], start > 0."""
        return cls(nodes=np.geomspace(start, stop, num))

    @classmethod
    def graded(
        cls,
        start: float,
        stop: float,
        *,
        nodes_per_decade: int = 40,
        max_spacing: float = 0.01,
    ) -> "Mesh1D":
        """Build a mesh geometric near start and uniform once cells reach max_spacing.

        Args:
            start (float): Left end point, strictly positive.
            stop (float): Right end point.
            nodes_per_decade (int): Resolution of the geometric part.
            max_spacing (float): Largest cell length.

        Returns:
            Mesh1D: The graded mesh. Both end points are nodes.

        """
        ratio = 10.0 ** (1.0 / nodes_per_decade)
        switch = min(stop, max_spacing / (ratio - 1.0))
        if switch <= start:
            geometric = np.array([start])
        else:
            count = max(2, math.ceil(math.log(switch / start) / math.log(ratio)) + 1)
            geometric = np.geomspace(start, switch, count)
        nodes = geometric
        if stop > geometric[-1]:
            tail = max(1, math.ceil((stop - geometric[-1]) / max_spacing))
            uniform = np.linspace(geometric[-1], stop, tail + 1)[1:]
            nodes = np.concatenate([geometric, uniform])
        if nodes.size < 3:
            nodes = np.linspace(start, stop, 3)
        return cls(nodes=nodes)


class Grid2D(NumericModel):
    """Uniform tensor grid with a mask of active nodes.

    Axis 0 is the first coordinate (s or x), axis 1 the second one (t or y).
    """

    origin: Annotated[
        tuple[float, float], Field(default=(0.0, 0.0), description="Node (0, 0)")
    ]
    spacing: Annotated[
        tuple[float, float], Field(description="Grid step along each axis")
    ]
    shape: Annotated[tuple[int, int], Field(description="Number of nodes per axis")]
    mask: Annotated[BoolArray, Field(description="Active nodes")]

    @model_validator(mode="after")
    def verify_grid(self) -> Self:
        """Validate steps, mask shape, non-emptiness and 4-connectivity.

        Raises:
            ValueError: If a step is not positive, the mask has the wrong shape, is
                empty or its active nodes split in more than one 4-connected component.

        Returns:
            Self: Returns the current instance for method chaining.

        """
        if min(self.spacing) <= 0:
            raise ValueError("Grid spacing must be positive")
        if self.mask.shape != tuple(self.shape):
            raise ValueError(f"Mask shape {self.mask.shape} differs from {self.shape}")
        if not self.mask.any():
            raise ValueError("Grid mask selects no node")
        _, components = ndimage.label(self.mask)
        if components != 1:
            raise ValueError(
                f"Active nodes must be 4-connected, found {components} components"
            )
        return self

    @property
    def axes(self) -> tuple[np.ndarray, np.ndarray]:
        """Return the node coordinates along each axis."""
        return (
            self.origin[0] + self.spacing[0] * np.arange(self.shape[0]),
            self.origin[1] + self.spacing[1] * np.arange(self.shape[1]),
        )

    def coordinates(self) -> tuple[np.ndarray, np.ndarray]:
        """Return the node coordinates as two arrays of the grid shape."""
        first, second = self.axes
        return np.meshgrid(first, second, indexing="ij")

    @classmethod
    def rectangle(
        cls,
        lower: tuple[float, float],
        upper: tuple[float, float],
        shape: tuple[int, int],
    ) -> "Grid2D":
        """Build a fully active grid covering the rectangle [lower, upper]."""
        spacing = (
            (upper[0] - lower[0]) / (shape[0] - 1),
            (upper[1] - lower[1]) / (shape[1] - 1),
        )
        return cls(
            origin=lower, spacing=spacing, shape=shape, mask=np.ones(shape, bool)
        )

    @classmethod
    def lower_triangle(cls, length: float, step: float) -> "Grid2D":
        """Build the grid of the triangle {0 <= t <= s <= length}.

        The number of cells per side is round(length / step); the step is adjusted so
        that the last node lies exactly on s = length.
        """
        cells = round(length / step)
        h = length / cells
        i, j = np.indices((cells + 1, cells + 1))
        return cls(origin=(0.0, 0.0), spacing=(h, h), shape=i.shape, mask=j <= i)


class SymmetricTridiagonal(NumericModel):
    """Symmetric tridiagonal matrix stored by diagonals."""

    diagonal: Annotated[FloatArray, Field(description="Main diagonal")]
    off_diagonal: Annotated[FloatArray, Field(description="First off-diagonal")]

    @model_validator(mode="after")
    def verify_lengths(self) -> Self:
        """Validate that the off-diagonal is one entry shorter and entries are finite.

        Raises:
            ValueError: On inconsistent lengths or non-finite entries.

        Returns:
            Self: Returns the current instance for method chaining.

        """
        if self.off_diagonal.size != self.diagonal.size - 1:
            raise ValueError(
                "Off-diagonal length must be the diagonal length minus one"
            )
        entries = np.concatenate([self.diagonal, self.off_diagonal])
        if not np.all(np.isfinite(entries)):
            raise ValueError("Tridiagonal entries must be finite")
        return self

    @property
    def size(self) -> int:
        """Return the matrix order."""
        return int(self.diagonal.size)

    def matvec(self, vector: np.ndarray) -> np.ndarray:
        """Return the matrix-vector product."""
        out = self.diagonal * vector
        out[:-1] += self.off_diagonal * vector[1:]
        out[1:] += self.off_diagonal * vector[:-1]
        return out

    def to_sparse(self) -> sparse.csr_matrix:
        """Return the matrix in CSR format."""
        return sparse.diags(
            [self.off_diagonal, self.diagonal, self.off_diagonal],
            offsets=[-1, 0, 1],
            format="csr",
        )

    def gershgorin_bounds(self) -> tuple[float, float]:
        """Return the Gershgorin enclosure of the spectrum."""
        radius = np.zeros_like(self.diagonal)
        radius[:-1] += np.abs(self.off_diagonal)
        radius[1:] += np.abs(self.off_diagonal)
        return float(np.min(self.diagonal - radius)), float(
            np.max(self.diagonal + radius)
        )


class Trajectory(NumericModel):
    """Accepted steps of an ODE integration."""

    times: Annotated[FloatArray, Field(description="Independent variable samples")]
    states: Annotated[
        FloatArray, Field(description="State samples, one row per accepted step")
    ]
    reason: Annotated[
        str,
        Field(
            default="completed",
            description="Why the integration ended: 'completed', a stop reason "
            "returned by the caller, or a failure description",
        ),
    ]

    @property
    def final_state(self) -> np.ndarray:
        """Return the last accepted state."""
        return self.states[-1]
