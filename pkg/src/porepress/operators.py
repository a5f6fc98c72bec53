"""
Five-point grid operators for the multiphase pressure problem.

Every operator is stored as five coefficient arrays over the interior nodes
and applied as::

    z(x) = center(x) y(x) - west(x) y(x1-h1, x2) - east(x) y(x1+h1, x2)
                          - south(x) y(x1, x2-h2) - north(x) y(x1, x2+h2)

with y = 0 outside the interior. The pressure operator ``A = sum a_k Lambda_k``
is split per phase into a self-adjoint diffusion part ``D`` and a convective
part ``C = Cbar - div_h(w)/2`` with skew-symmetric ``Cbar``.

Coefficients ``k`` are sampled exactly at the half-integer midpoints and ``a``
at the nodes (boundary nodes included where the difference formulas reach
them); no averaging of ``k`` is performed.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
import scipy.sparse as sp

from . import _kernels as kern
from .errors import DomainError, GridMismatchError
from .grid import Grid2D, GridFunction, max_norm

KINDS = ('lambda', 'composite_A', 'diffusion_D', 'convection_C', 'skew_Cbar',
         'shifted_system', 'generic')


@dataclass(frozen=True)
class CoefficientField:
    """Phase coefficients: weight ``a(x1, x2)`` and permeability ``k(x1, x2)``.

    Both callables must accept broadcastable arrays.
    """

    a: Callable
    k: Callable
    label: int | str = 1

    @classmethod
    def constant(cls, a: float = 1.0, k: float = 1.0, label=1) -> "CoefficientField":
        return cls(lambda x1, x2: np.full(np.shape(x1), float(a)),
                   lambda x1, x2: np.full(np.shape(x1), float(k)), label)

    def sample_a(self, X1, X2) -> np.ndarray:
        vals = np.broadcast_to(np.asarray(self.a(X1, X2), dtype=float), np.shape(X1))
        if not np.all(vals > 0):
            raise DomainError(f"phase {self.label}: a must be positive "
                              f"(min sample {np.min(vals)!r})")
        return np.array(vals)

    def sample_k(self, X1, X2) -> np.ndarray:
        vals = np.broadcast_to(np.asarray(self.k(X1, X2), dtype=float), np.shape(X1))
        if not np.all(vals > 0):
            raise DomainError(f"phase {self.label}: k must be positive "
                              f"(min sample {np.min(vals)!r})")
        return np.array(vals)


def _frozen(arr) -> np.ndarray:
    out = np.ascontiguousarray(arr, dtype=float)
    out.flags.writeable = False
    return out


@dataclass(frozen=True, eq=False)
class StencilOperator:
    """A five-point operator on the interior nodes of ``grid``.

    Coefficient arrays are shaped ``grid.shape`` and frozen after assembly.
    Neighbour coefficients are subtracted (see the module docstring); entries
    that point at boundary nodes are kept but only ever meet zero values.
    """

    grid: Grid2D
    center: np.ndarray = field(repr=False)
    west: np.ndarray = field(repr=False)
    east: np.ndarray = field(repr=False)
    south: np.ndarray = field(repr=False)
    north: np.ndarray = field(repr=False)
    kind: str = 'generic'

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown operator kind {self.kind!r}")
        for name in ('center', 'west', 'east', 'south', 'north'):
            arr = np.broadcast_to(np.asarray(getattr(self, name), dtype=float),
                                  self.grid.shape)
            object.__setattr__(self, name, _frozen(arr))

    @property
    def coefficients(self):
        return self.center, self.west, self.east, self.south, self.north

    def apply_into(self, y2d: np.ndarray, z2d: np.ndarray, team=None):
        """Matrix-free product on 2D arrays; ``team`` splits rows over workers."""
        args = (*self.coefficients, y2d, z2d)
        if team is None:
            kern.stencil_apply(*args, 0, self.grid.n2)
        else:
            team.run(kern.stencil_apply, *args)

    def apply(self, y: GridFunction) -> GridFunction:
        return apply(self, y)

    def scaled(self, alpha: float, kind: str | None = None) -> "StencilOperator":
        return StencilOperator(self.grid, *(alpha * c for c in self.coefficients),
                               kind=kind or self.kind)

    def __add__(self, other: "StencilOperator") -> "StencilOperator":
        if other.grid != self.grid:
            raise GridMismatchError(f"{self.grid} vs {other.grid}")
        return StencilOperator(self.grid, *(a + b for a, b in
                                            zip(self.coefficients, other.coefficients)))

    def to_sparse(self) -> sp.csr_matrix:
        return assemble_sparse(self)


@dataclass(frozen=True, eq=False)
class GridVelocity:
    """Grid velocity on half-edges.

    ``w1[q, m]`` lives at ``((m + 0.5) h1, (q + 1) h2)``, shape ``(N2-1, N1)``;
    ``w2[m, p]`` lives at ``((p + 1) h1, (m + 0.5) h2)``, shape ``(N2, N1-1)``.
    """

    grid: Grid2D
    w1: np.ndarray = field(repr=False)
    w2: np.ndarray = field(repr=False)

    def __post_init__(self):
        g = self.grid
        w1 = np.broadcast_to(np.asarray(self.w1, dtype=float), (g.n2, g.N1))
        w2 = np.broadcast_to(np.asarray(self.w2, dtype=float), (g.N2, g.n1))
        object.__setattr__(self, 'w1', _frozen(w1))
        object.__setattr__(self, 'w2', _frozen(w2))

    @classmethod
    def from_function(cls, grid: Grid2D, func1, func2) -> "GridVelocity":
        """Sample two analytic components at their half-edge positions."""
        X1, X2 = _x_midpoints(grid)
        Y1, Y2 = _y_midpoints(grid)
        return cls(grid, np.broadcast_to(func1(X1, X2), X1.shape),
                   np.broadcast_to(func2(Y1, Y2), Y1.shape))


# --- sampling lattices -------------------------------------------------------

def _x_midpoints(grid: Grid2D):
    """Points (x1 + 0.5 h1, x2) on interior rows, shape (n2, N1)."""
    x1 = (np.arange(grid.N1) + 0.5) * grid.h1
    x2 = np.arange(1, grid.N2) * grid.h2
    return np.meshgrid(x1, x2)


def _y_midpoints(grid: Grid2D):
    """Points (x1, x2 + 0.5 h2) on interior columns, shape (N2, n1)."""
    x1 = np.arange(1, grid.N1) * grid.h1
    x2 = (np.arange(grid.N2) + 0.5) * grid.h2
    return np.meshgrid(x1, x2)


def midpoint_k(grid: Grid2D, fld: CoefficientField) -> tuple[np.ndarray, np.ndarray]:
    """``k`` on x1-half-edges ``(n2, N1)`` and on x2-half-edges ``(N2, n1)``."""
    return fld.sample_k(*_x_midpoints(grid)), fld.sample_k(*_y_midpoints(grid))


def _check_grid(grid: Grid2D, other: Grid2D):
    if grid != other:
        raise GridMismatchError(f"{grid} vs {other}")


# --- assembly ----------------------------------------------------------------

def _lambda_neighbours(grid: Grid2D, fld: CoefficientField):
    kx = fld.sample_k(*_x_midpoints(grid)) / grid.h1 ** 2
    ky = fld.sample_k(*_y_midpoints(grid)) / grid.h2 ** 2
    return kx[:, :-1], kx[:, 1:], ky[:-1, :], ky[1:, :]


def _from_neighbours(grid, west, east, south, north, kind):
    center = west + east + south + north
    return StencilOperator(grid, center, west, east, south, north, kind=kind)


def assemble_lambda(grid: Grid2D, fld: CoefficientField) -> StencilOperator:
    """Self-adjoint diffusion stencil ``Lambda`` with ``k`` at midpoints."""
    return _from_neighbours(grid, *_lambda_neighbours(grid, fld), kind='lambda')


def assemble_A(grid: Grid2D, fields: Sequence[CoefficientField]) -> StencilOperator:
    """Pressure operator ``sum_k a_k(x) Lambda_k``: each phase row scaled by ``a_k``."""
    if len(fields) == 0:
        raise ValueError("assemble_A needs at least one coefficient field")
    X1, X2 = grid.interior_coordinates()
    nb = [np.zeros(grid.shape) for _ in range(4)]
    for fld in fields:
        a = fld.sample_a(X1, X2)
        for acc, coef in zip(nb, _lambda_neighbours(grid, fld)):
            acc += a * coef
    return _from_neighbours(grid, *nb, kind='composite_A')


def assemble_shifted(op: StencilOperator, tau: float) -> StencilOperator:
    """``E / tau + op``: only the center coefficient changes."""
    if not tau > 0:
        raise ValueError(f"time step must be positive, got {tau}")
    return StencilOperator(op.grid, op.center + 1.0 / tau, op.west, op.east,
                           op.south, op.north, kind='shifted_system')


def _a_on_nodes(grid: Grid2D, fld: CoefficientField) -> np.ndarray:
    return fld.sample_a(*grid.node_coordinates())


def assemble_diffusion(grid: Grid2D, fld: CoefficientField) -> StencilOperator:
    """Diffusion part ``D``: neighbour-averaged ``a`` times midpoint ``k``."""
    a = _a_on_nodes(grid, fld)
    kx = fld.sample_k(*_x_midpoints(grid))
    ky = fld.sample_k(*_y_midpoints(grid))
    # average of a across each half-edge
    ax = 0.5 * (a[1:-1, 1:] + a[1:-1, :-1])   # (n2, N1)
    ay = 0.5 * (a[1:, 1:-1] + a[:-1, 1:-1])   # (N2, n1)
    dx = ax * kx / grid.h1 ** 2
    dy = ay * ky / grid.h2 ** 2
    return _from_neighbours(grid, dx[:, :-1], dx[:, 1:], dy[:-1, :], dy[1:, :],
                            kind='diffusion_D')


def grid_velocity(grid: Grid2D, fld: CoefficientField) -> GridVelocity:
    """Half-edge velocity ``w = k grad a`` from node differences of ``a``."""
    a = _a_on_nodes(grid, fld)
    kx = fld.sample_k(*_x_midpoints(grid))
    ky = fld.sample_k(*_y_midpoints(grid))
    w1 = (a[1:-1, 1:] - a[1:-1, :-1]) / grid.h1 * kx
    w2 = (a[1:, 1:-1] - a[:-1, 1:-1]) / grid.h2 * ky
    return GridVelocity(grid, w1, w2)


def _convective_neighbours(grid: Grid2D, w: GridVelocity):
    _check_grid(grid, w.grid)
    east = -w.w1[:, 1:] / (2 * grid.h1)
    west = w.w1[:, :-1] / (2 * grid.h1)
    north = -w.w2[1:, :] / (2 * grid.h2)
    south = w.w2[:-1, :] / (2 * grid.h2)
    return west, east, south, north


def assemble_convection(grid: Grid2D, w: GridVelocity) -> StencilOperator:
    """Convective part ``C`` (central, half-weighted one-sided differences).

    The center coefficient equals ``-div_h(w) / 2`` and can be negative.
    """
    west, east, south, north = _convective_neighbours(grid, w)
    center = -0.5 * div_h(grid, w).as_2d()
    return StencilOperator(grid, center, west, east, south, north,
                           kind='convection_C')


def assemble_skew(grid: Grid2D, w: GridVelocity) -> StencilOperator:
    """Skew-symmetric convection ``Cbar`` (zero center coefficient)."""
    west, east, south, north = _convective_neighbours(grid, w)
    return StencilOperator(grid, 0.0, west, east, south, north, kind='skew_Cbar')


def div_h(grid: Grid2D, w: GridVelocity) -> GridFunction:
    """Grid divergence of a half-edge velocity at interior nodes."""
    # second term uses w2 at (x1, x2 +- 0.5 h2)
    _check_grid(grid, w.grid)
    d = ((w.w1[:, 1:] - w.w1[:, :-1]) / grid.h1
         + (w.w2[1:, :] - w.w2[:-1, :]) / grid.h2)
    return GridFunction(grid, d)


def energy_constant(grid: Grid2D, w: GridVelocity) -> float:
    """``M = max |div_h w| / 2``, so that ``|(C y, y)| <= M ||y||^2``."""
    return 0.5 * max_norm(div_h(grid, w))


def subordination_constant(grid: Grid2D, w: GridVelocity) -> float:
    """Largest squared half-edge velocity component."""
    _check_grid(grid, w.grid)
    m1 = float(np.max(w.w1 ** 2)) if w.w1.size else 0.0
    m2 = float(np.max(w.w2 ** 2)) if w.w2.size else 0.0
    return max(m1, m2)


def grid_spectral_bounds(grid: Grid2D) -> tuple[float, float]:
    """Bounds ``(delta, Delta)`` of the unit-coefficient Laplacian spectrum."""
    delta = Delta = 0.0
    for h, l in ((grid.h1, grid.l1), (grid.h2, grid.l2)):
        arg = np.pi * h / (2 * l)
        delta += 4 / h ** 2 * np.sin(arg) ** 2
        Delta += 4 / h ** 2 * np.cos(arg) ** 2
    return float(delta), float(Delta)


# --- maximum principle -------------------------------------------------------

@dataclass
class DominanceReport:
    signs_ok: bool
    min_slack: float
    slack: np.ndarray = field(repr=False)
    offending_nodes: list = field(default_factory=list)

    @property
    def holds(self) -> bool:
        """Sufficient conditions for the grid maximum principle."""
        return self.signs_ok and self.min_slack >= 0


def check_max_principle(op: StencilOperator) -> DominanceReport:
    """Sign check of all five coefficients and diagonal-dominance slack.

    Offending nodes are reported as grid indices ``(i1, i2)``.
    """
    c, w, e, s, n = op.coefficients
    slack = c - (w + e + s + n)
    positive = (c > 0) & (w > 0) & (e > 0) & (s > 0) & (n > 0)
    bad = np.argwhere(~positive | (slack < 0))
    nodes = [(int(p) + 1, int(q) + 1) for q, p in bad]
    return DominanceReport(signs_ok=bool(positive.all()),
                           min_slack=float(slack.min()), slack=slack,
                           offending_nodes=nodes)


# --- application and explicit matrices ---------------------------------------

def apply(op: StencilOperator, y: GridFunction, team=None) -> GridFunction:
    _check_grid(op.grid, y.grid)
    z = np.empty(op.grid.shape)
    op.apply_into(np.ascontiguousarray(y.as_2d()), z, team)
    return GridFunction(op.grid, z)


def assemble_sparse(op: StencilOperator) -> sp.csr_matrix:
    """CSR matrix in canonical row order with sorted columns.

    Every row stores its full in-domain five-point pattern (explicit zeros
    included), which is the sparsity ILU(0) works on.
    """
    g = op.grid
    n1, n2 = g.n1, g.n2
    idx = np.arange(g.size).reshape(g.shape)
    rows, cols, vals = [idx.ravel()], [idx.ravel()], [op.center.ravel()]
    links = ((op.west, (slice(None), slice(1, None)), -1),
             (op.east, (slice(None), slice(None, n1 - 1)), +1),
             (op.south, (slice(1, None), slice(None)), -n1),
             (op.north, (slice(None, n2 - 1), slice(None)), +n1))
    for coef, sl, offset in links:
        r = idx[sl].ravel()
        rows.append(r)
        cols.append(r + offset)
        vals.append(-coef[sl].ravel())
    coo = sp.coo_matrix((np.concatenate(vals),
                         (np.concatenate(rows), np.concatenate(cols))),
                        shape=(g.size, g.size))
    mat = coo.tocsr()
    mat.sort_indices()
    return mat


def identity(grid: Grid2D) -> StencilOperator:
    return StencilOperator(grid, 1.0, 0.0, 0.0, 0.0, 0.0)
