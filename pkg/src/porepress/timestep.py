"""Two-level weighted time scheme for ``dy/dt + A y = f``.

One step solves

    (E / tau + sigma A) y^{n+1} = (E / tau - (1 - sigma) A) y^n + phi^n,
    phi^n = f(sigma t^{n+1} + (1 - sigma) t^n),

with GMRES, warm-started from ``y^n``. ``sigma = 0`` is the explicit update
and needs no solve; ``sigma = 1`` is the fully implicit step.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .grid import GridFunction
from .operators import StencilOperator, apply, assemble_shifted
from .solvers import SolverConfig, SolveReport, gmres_solve


@dataclass(frozen=True)
class TimeSchemeConfig:
    sigma: float
    tau: float
    T: float
    source: Callable  # f(x1, x2, t), vectorised in x1, x2

    def __post_init__(self):
        if not 0 <= self.sigma <= 1:
            raise ValueError(f"sigma must lie in [0, 1], got {self.sigma}")
        if not self.tau > 0 or not self.T > 0:
            raise ValueError("tau and T must be positive")
        if self.n_steps < 1:
            raise ValueError("T / tau must round to at least one step")

    @property
    def n_steps(self) -> int:
        return int(round(self.T / self.tau))


def _sample_source(cfg: TimeSchemeConfig, y: GridFunction, t: float) -> np.ndarray:
    X1, X2 = y.grid.interior_coordinates()
    return np.broadcast_to(np.asarray(cfg.source(X1, X2, t), dtype=float),
                           y.grid.shape).reshape(-1)


def step_operator(opA: StencilOperator, cfg: TimeSchemeConfig) -> StencilOperator:
    """Left-hand operator ``E / tau + sigma A`` of one step."""
    return assemble_shifted(opA if cfg.sigma == 1.0 else opA.scaled(cfg.sigma), cfg.tau)


def step_weighted(opA: StencilOperator, y_n: GridFunction, cfg: TimeSchemeConfig,
                  t_n: float, solver: SolverConfig | None = None, *,
                  fields=None) -> tuple[GridFunction, SolveReport]:
    """Advance one step from ``t_n``; ``fields`` are only needed for multigrid."""
    solver = solver or SolverConfig()
    sigma, tau = cfg.sigma, cfg.tau
    t_eval = sigma * (t_n + tau) + (1 - sigma) * t_n
    phi = _sample_source(cfg, y_n, t_eval)
    Ay = apply(opA, y_n).values
    if sigma == 0.0:
        y_next = y_n.values + tau * (phi - Ay)
        report = SolveReport(0, True, np.zeros(1), 0.0, 0.0)
        return GridFunction(y_n.grid, y_next), report
    rhs = GridFunction(y_n.grid, y_n.values / tau - (1 - sigma) * Ay + phi)
    lhs = step_operator(opA, cfg)
    return gmres_solve(lhs, rhs, solver, y_n, fields=fields, tau=tau, sigma=sigma)


def evolve(opA: StencilOperator, y0: GridFunction, cfg: TimeSchemeConfig,
           solver: SolverConfig | None = None, *,
           fields=None) -> tuple[GridFunction, list[SolveReport]]:
    """Run the scheme from ``y0`` at ``t = 0`` for ``cfg.n_steps`` steps."""
    y = y0
    reports = []
    for n in range(cfg.n_steps):
        y, rep = step_weighted(opA, y, cfg, n * cfg.tau, solver, fields=fields)
        reports.append(rep)
    return y, reports
