"""Restarted GMRES with left preconditioning.

Arnoldi uses modified Gram-Schmidt; the small least-squares problem is
updated with Givens rotations so the preconditioned residual norm is known
after every step without forming the iterate. Convergence is declared when

    ||M^{-1}(b - A x_k)|| <= max(rtol * ||M^{-1}(b - A x_0)||, atol).

A happy breakdown (Arnoldi vector vanishes) ends the solve as converged.
"""
from __future__ import annotations

import math
import time

import numpy as np
import scipy.linalg as sla

from ..errors import GridMismatchError, NumericalFailureError
from ..grid import GridFunction
from ..operators import StencilOperator
from ..parallel import WorkerTeam
from .config import SolverConfig, SolveReport
from .preconditioners import (BlockJacobi, Identity, Preconditioner, make_jacobi,
                              make_ilu0, make_sor)
from .multigrid import make_mg

_BREAKDOWN = 1e-14


def make_preconditioner(op: StencilOperator, config: SolverConfig, fields=None,
                        tau=None, sigma: float = 1.0) -> Preconditioner:
    """Build the preconditioner named in ``config`` for ``op``.

    Multigrid re-discretises on coarse grids, so it needs the coefficient
    ``fields`` (and ``tau``/``sigma`` when ``op`` is a shifted system).
    """
    name = config.preconditioner
    if name == 'none':
        return Identity()
    if name == 'jacobi':
        return make_jacobi(op)
    if name == 'sor':
        return make_sor(op, config.sor_omega)
    if name == 'ilu0':
        return make_ilu0(op.to_sparse())
    if name == 'bjacobi':
        return BlockJacobi(op.to_sparse(), config.blocks)
    if name == 'mg':
        if fields is None:
            raise ValueError("multigrid preconditioner needs the coefficient fields")
        return make_mg(op.grid, fields, tau, config, sigma)
    raise ValueError(f"unknown preconditioner {name!r}")


def _givens(a: float, b: float) -> tuple[float, float]:
    if b == 0.0:
        return 1.0, 0.0
    r = math.hypot(a, b)
    return a / r, b / r


def gmres_solve(op: StencilOperator, rhs: GridFunction,
                config: SolverConfig | None = None,
                x0: GridFunction | None = None, *,
                preconditioner: Preconditioner | None = None,
                fields=None, tau=None, sigma: float = 1.0):
    """Solve ``op x = rhs``; returns ``(x, SolveReport)``.

    The preconditioner is built from ``config`` unless one is passed in;
    its setup time is counted in the reported wall time.
    """
    config = config or SolverConfig()
    g = op.grid
    if rhs.grid != g or (x0 is not None and x0.grid != g):
        raise GridMismatchError("operator, right-hand side and initial guess "
                                "must share one grid")
    start = time.perf_counter()
    team = WorkerTeam(config.workers, g.n2)
    try:
        if preconditioner is None:
            preconditioner = make_preconditioner(op, config, fields, tau, sigma)
        x, report = _gmres(op, rhs, config, x0, preconditioner, team)
    finally:
        team.close()
    report.wall_time = time.perf_counter() - start
    return x, report


def _gmres(op, rhs, config, x0, pc, team):
    g = op.grid
    shape = g.shape
    m = config.restart
    b = np.ascontiguousarray(rhs.as_2d())
    x = np.zeros(shape) if x0 is None else np.array(x0.as_2d())
    V = np.empty((m + 1,) + shape)
    H = np.zeros((m + 1, m))
    cs = np.zeros(m)
    sn = np.zeros(m)
    gvec = np.zeros(m + 1)
    work = np.empty(shape)

    def residual(dest):
        # dest = M^{-1} (b - A x)
        op.apply_into(x, work, team)
        np.subtract(b, work, out=work)
        pc.apply(work, dest, team)
        return team.norm(dest)

    beta = residual(V[0])
    if not np.isfinite(beta):
        raise NumericalFailureError("initial residual is not finite")
    history = [beta]
    target = max(config.rtol * beta, config.atol)
    its = 0
    converged = beta <= target
    breakdown = False

    while not converged and its < config.max_iterations:
        team.scale(1.0 / beta, V[0], V[0])
        gvec[:] = 0.0
        gvec[0] = beta
        H[:] = 0.0
        k = 0
        for j in range(m):
            w = V[j + 1]
            op.apply_into(V[j], work, team)
            pc.apply(work, w, team)
            for i in range(j + 1):
                hij = team.dot(w, V[i])
                H[i, j] = hij
                team.axpy(-hij, V[i], w)
            hnext = team.norm(w)
            H[j + 1, j] = hnext
            colmax = np.max(np.abs(H[:j + 2, j]))
            for i in range(j):
                hi, hi1 = H[i, j], H[i + 1, j]
                H[i, j] = cs[i] * hi + sn[i] * hi1
                H[i + 1, j] = -sn[i] * hi + cs[i] * hi1
            cs[j], sn[j] = _givens(H[j, j], H[j + 1, j])
            H[j, j] = cs[j] * H[j, j] + sn[j] * H[j + 1, j]
            H[j + 1, j] = 0.0
            gvec[j + 1] = -sn[j] * gvec[j]
            gvec[j] = cs[j] * gvec[j]
            its += 1
            k = j + 1
            res = abs(gvec[j + 1])
            if not np.isfinite(res) or not np.isfinite(colmax):
                raise NumericalFailureError(f"non-finite residual at iteration {its}")
            history.append(res)
            if res <= target:
                converged = True
                break
            if hnext <= _BREAKDOWN * colmax:
                converged = breakdown = True
                break
            if its >= config.max_iterations:
                break
            team.scale(1.0 / hnext, w, w)
        y = sla.solve_triangular(H[:k, :k], gvec[:k], check_finite=False)
        for i in range(k):
            team.axpy(y[i], V[i], x)
        if converged or its >= config.max_iterations:
            break
        beta = residual(V[0])
        if not np.isfinite(beta):
            raise NumericalFailureError(f"non-finite residual at restart, iteration {its}")
        if beta <= target:
            converged = True

    op.apply_into(x, work, team)
    np.subtract(b, work, out=work)
    true_res = float(np.sqrt(team.dot(work, work)))
    report = SolveReport(iterations=its, converged=bool(converged),
                         residual_history=np.array(history),
                         final_true_residual=true_res, wall_time=0.0,
                         breakdown=breakdown)
    return GridFunction(g, x), report
