"""Structured grids, node classification and MACH control volumes.

Nodes are addressed as ``(i, j)`` with ``0 <= i <= nx`` along x and
``0 <= j <= ny`` along y.  Node fields are stored as arrays of shape
``(nx + 1, ny + 1)`` indexed ``[i, j]``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

__all__ = [
    "MeshError",
    "EvenGridError",
    "Grid",
    "NodeClass",
    "ControlVolume",
    "build_grid",
    "build_simplified_grid",
    "classify_node",
    "node_classes",
    "control_volume",
    "control_volume_from_points",
]


class MeshError(ValueError):
    """Invalid grid construction or query."""


class EvenGridError(MeshError):
    """The two-material model needs an odd number of cells per axis."""


@dataclass(frozen=True)
class Grid:
    """Uniform node lattice on the rectangle ``(a, b) x (c, d)``."""

    domain: tuple[float, float, float, float]
    nx: int
    ny: int
    simplified: bool = False

    @property
    def hx(self) -> float:
        a, b, _, _ = self.domain
        return (b - a) / self.nx

    @property
    def hy(self) -> float:
        _, _, c, d = self.domain
        return (d - c) / self.ny

    @property
    def h(self) -> float:
        if self.hx != self.hy:
            raise MeshError("grid spacing is not isotropic")
        return self.hx

    @property
    def N(self) -> int:
        if not self.simplified:
            raise MeshError("N is only defined for the two-material model grid")
        return self.nx

    @property
    def M(self) -> int:
        return (self.N - 1) // 2

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nx + 1, self.ny + 1)

    def node(self, i: int, j: int) -> tuple[float, float]:
        self._check_index(i, j)
        a, _, c, _ = self.domain
        return (a + i * self.hx, c + j * self.hy)

    def x(self) -> np.ndarray:
        return self.domain[0] + np.arange(self.nx + 1) * self.hx

    def y(self) -> np.ndarray:
        return self.domain[2] + np.arange(self.ny + 1) * self.hy

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        """Node coordinates as two ``(nx + 1, ny + 1)`` arrays."""
        return np.meshgrid(self.x(), self.y(), indexing="ij")

    def nodes(self) -> np.ndarray:
        """Node coordinates stacked as ``(nx + 1, ny + 1, 2)``."""
        return np.stack(self.mesh(), axis=-1)

    def is_interior(self, i: int, j: int) -> bool:
        return 0 < i < self.nx and 0 < j < self.ny

    def _check_index(self, i: int, j: int) -> None:
        if not (0 <= i <= self.nx and 0 <= j <= self.ny):
            raise MeshError(f"node index ({i}, {j}) outside 0..{self.nx} x 0..{self.ny}")


def build_grid(
    domain: tuple[float, float, float, float],
    nx: int,
    ny: int,
    simplified: bool = False,
) -> Grid:
    """Build a uniform grid with ``nx * ny`` cells.

    With ``simplified=True`` the grid must be the odd ``N x N`` square mesh of
    the unit square used by the two-material model.
    """
    nx, ny = int(nx), int(ny)
    if nx <= 0 or ny <= 0:
        raise MeshError(f"cell counts must be positive, got nx={nx}, ny={ny}")
    if nx < 2 or ny < 2:
        raise MeshError(f"need at least two cells per axis, got nx={nx}, ny={ny}")
    a, b, c, d = (float(v) for v in domain)
    if not (b > a and d > c):
        raise MeshError(f"degenerate domain {domain}")
    if simplified:
        if (a, b, c, d) != (0.0, 1.0, 0.0, 1.0):
            raise MeshError("the two-material model lives on the unit square")
        if nx != ny:
            raise MeshError("the two-material model needs nx == ny")
        if nx % 2 == 0:
            raise EvenGridError(f"N must be odd, got N={nx}")
    return Grid((a, b, c, d), nx, ny, simplified)


def build_simplified_grid(N: int) -> Grid:
    return build_grid((0.0, 1.0, 0.0, 1.0), N, N, simplified=True)


class NodeClass(enum.Enum):
    BOUNDARY = "boundary"
    INTERIOR1 = "interior1"
    INTERIOR2 = "interior2"
    INTERFACE_LEFT = "interface_left"
    INTERFACE_RIGHT = "interface_right"


def classify_node(grid: Grid, i: int, j: int) -> NodeClass:
    """Position of node ``(i, j)`` relative to the interface ``x = 1/2``."""
    if not grid.simplified:
        raise MeshError("node classification needs the two-material model grid")
    grid._check_index(i, j)
    N, M = grid.N, grid.M
    if i in (0, N) or j in (0, N):
        return NodeClass.BOUNDARY
    if i < M:
        return NodeClass.INTERIOR1
    if i == M:
        return NodeClass.INTERFACE_LEFT
    if i == M + 1:
        return NodeClass.INTERFACE_RIGHT
    return NodeClass.INTERIOR2


def node_classes(grid: Grid) -> np.ndarray:
    """Object array of :class:`NodeClass` for every node."""
    out = np.empty(grid.shape, dtype=object)
    for i in range(grid.nx + 1):
        for j in range(grid.ny + 1):
            out[i, j] = classify_node(grid, i, j)
    return out


@dataclass(frozen=True)
class ControlVolume:
    """Octagonal control volume around one node.

    ``midpoints[l]`` and ``corners[l]`` hold O_{l+1} and A_{l+1}; chord ``l``
    joins O_l (O_0 = O_4) to O_{l+1}.
    """

    center: np.ndarray
    midpoints: np.ndarray  # (4, 2)
    corners: np.ndarray  # (4, 2)
    chord_lengths: np.ndarray  # (4,)
    normals: np.ndarray  # (4, 2), unit, pointing away from center
    area: float

    @property
    def octagon(self) -> np.ndarray:
        """Vertices A1, O1, A2, O2, A3, O3, A4, O4 in counterclockwise order."""
        return np.stack([self.corners, self.midpoints], axis=1).reshape(8, 2)

    def scaled_normals(self) -> np.ndarray:
        return self.normals * self.chord_lengths[:, None]


def _shoelace(poly: np.ndarray) -> float:
    x, y = poly[:, 0], poly[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def control_volume_from_points(center, neighbors) -> ControlVolume:
    """Control volume from the node and its four edge neighbors.

    ``neighbors`` are the nodes (i, j-1), (i+1, j), (i, j+1), (i-1, j) in that
    order, i.e. counterclockwise starting below the center.
    """
    X = np.asarray(center, dtype=float)
    P = np.asarray(neighbors, dtype=float).reshape(4, 2)
    O = 0.5 * (X + P)
    O_prev = np.roll(O, 1, axis=0)
    A = O_prev + O - X
    chord = O - O_prev
    lengths = np.hypot(chord[:, 0], chord[:, 1])
    normals = np.column_stack([chord[:, 1], -chord[:, 0]]) / lengths[:, None]
    area = _shoelace(np.stack([A, O], axis=1).reshape(8, 2))
    if area <= 0.0:
        raise MeshError("control volume is inverted or degenerate")
    return ControlVolume(X, O, A, lengths, normals, area)


def control_volume(grid: Grid, i: int, j: int) -> ControlVolume:
    grid._check_index(i, j)
    if not grid.is_interior(i, j):
        raise MeshError(f"node ({i}, {j}) is on the boundary and has no control volume")
    nbrs = [grid.node(i, j - 1), grid.node(i + 1, j), grid.node(i, j + 1), grid.node(i - 1, j)]
    return control_volume_from_points(grid.node(i, j), nbrs)
