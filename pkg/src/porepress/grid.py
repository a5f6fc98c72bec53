"""Uniform rectangular grids and grid functions with zero Dirichlet boundary."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels as kern
from .errors import GridMismatchError


@dataclass(frozen=True)
class Grid2D:
    """Uniform grid on ``[0, l1] x [0, l2]`` with ``N1 x N2`` cells.

    Only the ``(N1 - 1) * (N2 - 1)`` interior nodes carry unknowns. Node
    ``(i1, i2)`` with ``1 <= i_b <= N_b - 1`` is stored at flat position
    ``(i2 - 1) * (N1 - 1) + (i1 - 1)`` (i1 fastest); 2D views are shaped
    ``(N2 - 1, N1 - 1)``.
    """

    N1: int
    N2: int
    l1: float = 1.0
    l2: float = 1.0

    def __post_init__(self):
        if int(self.N1) != self.N1 or int(self.N2) != self.N2:
            raise ValueError("cell counts must be integers")
        if self.N1 < 2 or self.N2 < 2:
            raise ValueError(f"need at least 2 cells per axis, got {self.N1}x{self.N2}")
        if not (self.l1 > 0 and self.l2 > 0):
            raise ValueError("domain lengths must be positive")

    @classmethod
    def square(cls, n: int, length: float = 1.0) -> "Grid2D":
        return cls(n, n, length, length)

    @property
    def h1(self) -> float:
        return self.l1 / self.N1

    @property
    def h2(self) -> float:
        return self.l2 / self.N2

    @property
    def n1(self) -> int:
        """Interior nodes along x1."""
        return self.N1 - 1

    @property
    def n2(self) -> int:
        return self.N2 - 1

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n2, self.n1)

    @property
    def size(self) -> int:
        return self.n1 * self.n2

    def interior_coordinates(self) -> tuple[np.ndarray, np.ndarray]:
        """Coordinates ``(x1, x2)`` of interior nodes as ``shape`` arrays."""
        x1 = np.arange(1, self.N1) * self.h1
        x2 = np.arange(1, self.N2) * self.h2
        X1, X2 = np.meshgrid(x1, x2)
        return X1, X2

    def node_coordinates(self) -> tuple[np.ndarray, np.ndarray]:
        """Coordinates of all nodes, boundary included, shaped ``(N2+1, N1+1)``."""
        x1 = np.arange(self.N1 + 1) * self.h1
        x2 = np.arange(self.N2 + 1) * self.h2
        return np.meshgrid(x1, x2)

    def coarsen(self) -> "Grid2D":
        if self.N1 % 2 or self.N2 % 2:
            raise ValueError(f"grid {self.N1}x{self.N2} cannot be halved")
        return Grid2D(self.N1 // 2, self.N2 // 2, self.l1, self.l2)


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Values on the interior nodes of ``grid``; zero on the boundary.

    ``values`` is a read-only flat array in canonical order.
    """

    grid: Grid2D
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        vals = np.array(self.values, dtype=float).reshape(-1)
        if vals.size != self.grid.size:
            raise ValueError(
                f"expected {self.grid.size} interior values, got {vals.size}")
        vals.flags.writeable = False
        object.__setattr__(self, 'values', vals)

    @classmethod
    def zeros(cls, grid: Grid2D) -> "GridFunction":
        return cls(grid, np.zeros(grid.size))

    @classmethod
    def constant(cls, grid: Grid2D, value: float) -> "GridFunction":
        return cls(grid, np.full(grid.size, float(value)))

    @classmethod
    def from_function(cls, grid: Grid2D, func) -> "GridFunction":
        """Sample ``func(x1, x2)`` (vectorised) at the interior nodes."""
        X1, X2 = grid.interior_coordinates()
        return cls(grid, np.broadcast_to(func(X1, X2), grid.shape))

    def as_2d(self) -> np.ndarray:
        return self.values.reshape(self.grid.shape)

    def __getitem__(self, node: tuple[int, int]) -> float:
        """Value at grid node ``(i1, i2)``; boundary nodes read as 0."""
        i1, i2 = node
        if not (0 <= i1 <= self.grid.N1 and 0 <= i2 <= self.grid.N2):
            raise IndexError(f"node {node} outside the grid")
        if i1 in (0, self.grid.N1) or i2 in (0, self.grid.N2):
            return 0.0
        return float(self.values[(i2 - 1) * self.grid.n1 + i1 - 1])

    def _check(self, other: "GridFunction"):
        if other.grid != self.grid:
            raise GridMismatchError(f"{self.grid} vs {other.grid}")

    def __add__(self, other: "GridFunction") -> "GridFunction":
        self._check(other)
        return GridFunction(self.grid, self.values + other.values)

    def __sub__(self, other: "GridFunction") -> "GridFunction":
        self._check(other)
        return GridFunction(self.grid, self.values - other.values)

    def __mul__(self, scalar: float) -> "GridFunction":
        return GridFunction(self.grid, self.values * float(scalar))

    __rmul__ = __mul__

    def __neg__(self) -> "GridFunction":
        return GridFunction(self.grid, -self.values)


def _dot(x: np.ndarray, y: np.ndarray, shape) -> float:
    x2 = np.ascontiguousarray(x).reshape(shape)
    y2 = np.ascontiguousarray(y).reshape(shape)
    partial = np.empty(shape[0])
    kern.row_dots(x2, y2, partial, 0, shape[0])
    return kern.ordered_sum(partial)


def inner_product(y: GridFunction, w: GridFunction) -> float:
    """``(y, w) = sum over interior nodes of y * w * h1 * h2``.

    Summed row by row, then over rows in order, so the result does not depend
    on how many workers produced the partial sums.
    """
    if y.grid != w.grid:
        raise GridMismatchError(f"{y.grid} vs {w.grid}")
    g = y.grid
    return _dot(y.values, w.values, g.shape) * g.h1 * g.h2


def l2_norm(y: GridFunction) -> float:
    return float(np.sqrt(inner_product(y, y)))


def max_norm(y: GridFunction) -> float:
    """The C(omega) norm, max |y| over interior nodes."""
    return float(np.max(np.abs(y.values)))
