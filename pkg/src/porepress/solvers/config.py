from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

PRECONDITIONERS = ('none', 'jacobi', 'sor', 'ilu0', 'mg', 'bjacobi')
_ALIASES = {'ilu': 'ilu0', 'multigrid': 'mg', 'block_jacobi': 'bjacobi'}


def canonical_pc(name: str) -> str:
    name = _ALIASES.get(name.lower(), name.lower())
    if name not in PRECONDITIONERS:
        raise ValueError(f"unknown preconditioner {name!r}; "
                         f"choose from {', '.join(PRECONDITIONERS)}")
    return name


@dataclass(frozen=True)
class SolverConfig:
    """GMRES and preconditioner settings.

    Defaults follow the usual library defaults for restarted GMRES: relative
    tolerance 1e-5 on the preconditioned residual and restart length 30.
    ``bjacobi_blocks=None`` means one block per worker.
    """

    rtol: float = 1e-5
    atol: float = 1e-50
    max_iterations: int = 10000
    restart: int = 30
    preconditioner: str = 'none'
    sor_omega: float = 1.0
    mg_presmooth: int = 2
    mg_postsmooth: int = 2
    mg_coarsest: int = 3
    bjacobi_blocks: int | None = None
    workers: int = 1

    def __post_init__(self):
        object.__setattr__(self, 'preconditioner', canonical_pc(self.preconditioner))
        if not self.rtol > 0:
            raise ValueError("rtol must be positive")
        if self.atol < 0:
            raise ValueError("atol must be non-negative")
        if self.restart < 1 or self.max_iterations < 1:
            raise ValueError("restart and max_iterations must be >= 1")
        if not 0 < self.sor_omega < 2:
            raise ValueError("sor_omega must lie in (0, 2)")
        if self.mg_presmooth < 0 or self.mg_postsmooth < 0 or self.mg_coarsest < 1:
            raise ValueError("invalid multigrid settings")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        if self.bjacobi_blocks is not None and self.bjacobi_blocks < 1:
            raise ValueError("bjacobi_blocks must be >= 1")

    @property
    def blocks(self) -> int:
        return self.bjacobi_blocks or self.workers

    def with_(self, **changes) -> "SolverConfig":
        return replace(self, **changes)


@dataclass
class SolveReport:
    """Outcome of one solve.

    ``residual_history`` holds the preconditioned residual norm before the
    first iteration and after each one; ``final_true_residual`` is the
    Euclidean norm of ``b - A x`` for the returned iterate.
    """

    iterations: int
    converged: bool
    residual_history: np.ndarray = field(repr=False)
    final_true_residual: float
    wall_time: float
    breakdown: bool = False
