"""Two-phase test problem on the unit square.

Phase 1 is incompressible (``a1 = k1 = 1``). Phase 2 has
``a2 = exp(-xi r^2)`` and ``k2 = eta exp(xi r^2)`` with
``r^2 = (x1 - 0.5)^2 + (x2 - 0.5)^2``, so ``a2 k2 = eta`` everywhere and the
phase-2 velocity is ``w2 = -2 eta xi (x - 0.5)`` with ``div w2 = -4 eta xi``.
The system is one implicit step ``(E / tau + A) y = 1``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..grid import Grid2D, GridFunction
from ..operators import (CoefficientField, StencilOperator, assemble_A,
                         assemble_shifted)


def _r2(x1, x2):
    return (x1 - 0.5) ** 2 + (x2 - 0.5) ** 2


@dataclass(frozen=True)
class TestProblem:
    __test__ = False  # not a pytest class

    xi: float = 0.0
    eta: float = 1.0
    n: int = 64
    tau: float | None = 1.0

    def __post_init__(self):
        if not self.eta > 0:
            raise ValueError(f"eta must be positive, got {self.eta}")
        if self.tau is not None and not self.tau > 0:
            raise ValueError(f"tau must be positive, got {self.tau}")

    @property
    def grid(self) -> Grid2D:
        return Grid2D.square(self.n)

    @property
    def fields(self) -> tuple[CoefficientField, CoefficientField]:
        xi, eta = self.xi, self.eta
        phase1 = CoefficientField.constant(1.0, 1.0, label=1)
        phase2 = CoefficientField(lambda x1, x2: np.exp(-xi * _r2(x1, x2)),
                                  lambda x1, x2: eta * np.exp(xi * _r2(x1, x2)),
                                  label=2)
        return phase1, phase2

    # analytic reference values
    def velocity2(self, x1, x2):
        c = -2 * self.eta * self.xi
        return c * (x1 - 0.5), c * (x2 - 0.5)

    @property
    def divergence2(self) -> float:
        return -4 * self.eta * self.xi

    @property
    def energy_constant2(self) -> float:
        return 2 * self.eta * abs(self.xi)

    @property
    def subordination_constant2(self) -> float:
        return 2 * self.eta * self.xi ** 2


def build_test_system(problem: TestProblem) -> tuple[StencilOperator, GridFunction]:
    """Shifted operator ``E / tau + A`` (or ``A`` if ``tau`` is None) and rhs 1."""
    grid = problem.grid
    op = assemble_A(grid, problem.fields)
    if problem.tau is not None:
        op = assemble_shifted(op, problem.tau)
    return op, GridFunction.constant(grid, 1.0)
