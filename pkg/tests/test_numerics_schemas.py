"""Unit tests for stablelab.numerics.schemas.

These tests cover:
- Mesh1D validation and builders
- Grid2D validation (spacing, mask, connectivity) and builders
- SymmetricTridiagonal validation and helpers
"""

import numpy as np
import pytest
from pydantic import ValidationError

from stablelab.numerics.schemas import Grid2D, Mesh1D, SymmetricTridiagonal


@pytest.mark.parametrize(
    "nodes",
    [[0.0, 1.0], [0.0, 1.0, 1.0], [0.0, 2.0, 1.0], [0.0, np.nan, 1.0]],
)
def test_mesh_rejects_invalid_nodes(nodes):
    """Meshes need 3 finite strictly increasing nodes."""
    with pytest.raises(ValidationError):
        Mesh1D(nodes=nodes)


def test_graded_mesh_covers_interval():
    """The graded mesh starts geometric and ends uniform."""
    mesh = Mesh1D.graded(1e-4, 1.0, nodes_per_decade=20, max_spacing=0.02)
    assert mesh.nodes[0] == 1e-4
    assert mesh.nodes[-1] == pytest.approx(1.0)
    assert mesh.spacing.max() <= 0.02 + 1e-12
    assert mesh.spacing[0] < 1e-4


def test_graded_mesh_short_interval():
    """When the geometric part reaches the end no uniform tail is added."""
    mesh = Mesh1D.graded(1e-3, 1e-2, nodes_per_decade=10, max_spacing=1.0)
    assert np.all(np.diff(mesh.nodes) > 0)
    assert mesh.nodes[-1] == pytest.approx(1e-2)


def test_grid_rejects_disconnected_mask():
    """Two separate active blocks are rejected."""
    mask = np.zeros((4, 4), bool)
    mask[0, 0] = mask[3, 3] = True
    with pytest.raises(ValidationError):
        Grid2D(spacing=(1.0, 1.0), shape=(4, 4), mask=mask)


@pytest.mark.parametrize(
    "spacing,mask",
    [((0.0, 1.0), np.ones((2, 2), bool)), ((1.0, 1.0), np.zeros((2, 2), bool))],
)
def test_grid_rejects_bad_spacing_or_empty_mask(spacing, mask):
    """Spacing must be positive and the mask nonempty."""
    with pytest.raises(ValidationError):
        Grid2D(spacing=spacing, shape=(2, 2), mask=mask)


def test_lower_triangle_grid():
    """The triangle grid lands on s = L and keeps t <= s."""
    grid = Grid2D.lower_triangle(2.0, 0.3)
    s, t = grid.coordinates()
    assert s[-1, 0] == pytest.approx(2.0)
    assert np.all(t[grid.mask] <= s[grid.mask] + 1e-12)


def test_tridiagonal_lengths():
    """The off-diagonal must be one entry shorter than the diagonal."""
    with pytest.raises(ValidationError):
        SymmetricTridiagonal(diagonal=[1.0, 2.0], off_diagonal=[1.0, 1.0])


def test_tridiagonal_helpers():
    """Matrix-vector product, sparse export and Gershgorin bounds agree."""
    op = SymmetricTridiagonal(diagonal=[2.0, 3.0, 4.0], off_diagonal=[-1.0, 0.5])
    vector = np.array([1.0, -2.0, 0.5])
    assert np.allclose(op.matvec(vector), op.to_sparse() @ vector)
    assert op.gershgorin_bounds() == (1.0, 4.5)
