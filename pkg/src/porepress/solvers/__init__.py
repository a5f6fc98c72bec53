from .config import PRECONDITIONERS, SolverConfig, SolveReport, canonical_pc
from .direct import dense_solve
from .gmres import gmres_solve, make_preconditioner
from .multigrid import Multigrid, make_mg
from .preconditioners import (SOR, BlockJacobi, ILU0, Identity, Jacobi,
                              Preconditioner, make_bjacobi, make_ilu0,
                              make_jacobi, make_sor)

__all__ = [
    'PRECONDITIONERS', 'SolverConfig', 'SolveReport', 'canonical_pc',
    'dense_solve', 'gmres_solve', 'make_preconditioner', 'Multigrid', 'make_mg',
    'SOR', 'BlockJacobi', 'ILU0', 'Identity', 'Jacobi', 'Preconditioner',
    'make_bjacobi', 'make_ilu0', 'make_jacobi', 'make_sor',
]
