"""Dense direct solver, used as an oracle on small grids."""
from __future__ import annotations

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp

from ..errors import SingularMatrixError
from ..grid import GridFunction

MAX_INTERIOR = 32


def dense_solve(matrix, rhs: GridFunction) -> GridFunction:
    """Gaussian elimination with partial pivoting (LAPACK ``gesv``)."""
    g = rhs.grid
    if g.n1 > MAX_INTERIOR or g.n2 > MAX_INTERIOR:
        raise ValueError(f"dense oracle limited to {MAX_INTERIOR}x{MAX_INTERIOR} "
                         f"interior nodes, got {g.n1}x{g.n2}")
    dense = matrix.toarray() if sp.issparse(matrix) else np.asarray(matrix, dtype=float)
    if dense.shape != (g.size, g.size):
        raise ValueError(f"matrix shape {dense.shape} does not match grid size {g.size}")
    # call gesv directly: scipy's solve has structure shortcuts that skip the
    # singularity check for diagonal input
    _, _, sol, info = sla.lapack.dgesv(dense, np.array(rhs.values))
    if info > 0:
        raise SingularMatrixError(f"matrix is singular: zero pivot at row {info - 1}")
    if info < 0:
        raise ValueError(f"invalid argument {-info} to gesv")
    return GridFunction(g, sol)
