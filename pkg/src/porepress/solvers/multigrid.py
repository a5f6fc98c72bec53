"""Geometric multigrid V-cycle used as a GMRES preconditioner.

Coarse operators are re-discretised from the analytic coefficients on each
halved grid. Transfers are full weighting and bilinear interpolation; the
smoother is lexicographic Gauss-Seidel and the coarsest level is solved with a
dense LU factorisation.
"""
from __future__ import annotations

from typing import Sequence

import numpy as np
import scipy.linalg as sla

from .. import _kernels as kern
from ..grid import Grid2D
from ..operators import (CoefficientField, StencilOperator, assemble_A,
                         assemble_shifted)
from .config import SolverConfig
from .preconditioners import Preconditioner, _csr_parts


def level_operator(grid: Grid2D, fields, tau=None, sigma: float = 1.0) -> StencilOperator:
    op = assemble_A(grid, fields)
    if sigma != 1.0:
        op = op.scaled(sigma)
    if tau is not None:
        op = assemble_shifted(op, tau)
    return op


class _Level:
    def __init__(self, op: StencilOperator):
        self.grid = op.grid
        self.op = op
        self.indptr, self.indices, self.data, self.diag = _csr_parts(op.to_sparse())
        self.resid = np.empty(op.grid.shape)
        self.rhs = np.empty(op.grid.shape)
        self.corr = np.empty(op.grid.shape)

    def smooth(self, b, x, sweeps):
        bf, xf = b.reshape(-1), x.reshape(-1)
        for _ in range(sweeps):
            kern.sor_sweep(self.indptr, self.indices, self.data, self.diag,
                           bf, xf, 1.0, True)


class Multigrid(Preconditioner):
    name = 'mg'

    def __init__(self, grid: Grid2D, fields: Sequence[CoefficientField], tau=None,
                 config: SolverConfig | None = None, sigma: float = 1.0):
        config = config or SolverConfig(preconditioner='mg')
        self.presmooth = config.mg_presmooth
        self.postsmooth = config.mg_postsmooth
        grids = [grid]
        while max(grids[-1].n1, grids[-1].n2) > config.mg_coarsest:
            g = grids[-1]
            if g.N1 % 2 or g.N2 % 2:
                raise ValueError(
                    f"grid {g.N1}x{g.N2} cannot be coarsened to at most "
                    f"{config.mg_coarsest} interior nodes per axis")
            grids.append(g.coarsen())
        self.levels = [_Level(level_operator(g, fields, tau, sigma)) for g in grids]
        coarse = self.levels[-1].op.to_sparse().toarray()
        self._coarse_lu = sla.lu_factor(coarse)

    @property
    def depth(self) -> int:
        return len(self.levels)

    def _cycle(self, lvl: int, b: np.ndarray, x: np.ndarray):
        level = self.levels[lvl]
        if lvl == len(self.levels) - 1:
            x.reshape(-1)[:] = sla.lu_solve(self._coarse_lu, b.reshape(-1))
            return
        x[...] = 0.0
        level.smooth(b, x, self.presmooth)
        level.op.apply_into(x, level.resid)
        np.subtract(b, level.resid, out=level.resid)
        nxt = self.levels[lvl + 1]
        kern.restrict_full_weighting(level.resid, nxt.rhs)
        self._cycle(lvl + 1, nxt.rhs, nxt.corr)
        kern.prolong_bilinear_add(nxt.corr, x)
        level.smooth(b, x, self.postsmooth)

    def apply(self, r, out, team=None):
        self._cycle(0, np.ascontiguousarray(r.reshape(self.levels[0].grid.shape)),
                    out.reshape(self.levels[0].grid.shape))


def make_mg(grid: Grid2D, fields: Sequence[CoefficientField], tau=None,
            config: SolverConfig | None = None, sigma: float = 1.0) -> Multigrid:
    return Multigrid(grid, fields, tau, config, sigma)
