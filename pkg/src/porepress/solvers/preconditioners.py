"""
Preconditioners for GMRES.

Each one is a fixed linear map ``r -> M^{-1} r``. Relaxation-type methods
(SOR, multigrid smoothing) always start from a zero guess, so they stay
linear in ``r``.
"""
from __future__ import annotations

import numpy as np
import scipy.sparse as sp

from .. import _kernels as kern
from ..errors import FactorizationError, SingularPreconditionerError
from ..grid import GridFunction
from ..operators import StencilOperator
from ..parallel import split_rows


class Preconditioner:
    """Base class. Subclasses implement :meth:`apply` on contiguous arrays."""

    name = 'none'

    def apply(self, r: np.ndarray, out: np.ndarray, team=None):
        out[...] = r

    def __call__(self, r: GridFunction) -> GridFunction:
        src = np.ascontiguousarray(r.as_2d())
        out = np.empty_like(src)
        self.apply(src, out)
        return GridFunction(r.grid, out)


class Identity(Preconditioner):
    pass


class Jacobi(Preconditioner):
    name = 'jacobi'

    def __init__(self, diagonal: np.ndarray):
        diagonal = np.ascontiguousarray(diagonal, dtype=float)
        if np.any(diagonal == 0):
            raise SingularPreconditionerError("zero diagonal entry, Jacobi undefined")
        self.diagonal = diagonal

    def apply(self, r, out, team=None):
        if team is not None and r.ndim == 2:
            team.run(kern.divide_rows, r, self.diagonal.reshape(r.shape), out)
        else:
            np.divide(r, self.diagonal.reshape(r.shape), out=out)


def make_jacobi(op: StencilOperator) -> Jacobi:
    return Jacobi(op.center)


def _csr_parts(matrix):
    mat = sp.csr_matrix(matrix, dtype=float, copy=True)
    mat.sum_duplicates()
    mat.sort_indices()
    if mat.shape[0] != mat.shape[1]:
        raise ValueError(f"matrix must be square, got {mat.shape}")
    indptr = mat.indptr.astype(np.int64)
    indices = mat.indices.astype(np.int64)
    diag = kern.csr_diagonal_positions(indptr, indices)
    return indptr, indices, np.array(mat.data), diag


class SOR(Preconditioner):
    """One forward then one backward SOR sweep from zero."""

    name = 'sor'

    def __init__(self, matrix, omega: float = 1.0):
        if not 0 < omega < 2:
            raise ValueError(f"SOR relaxation factor must lie in (0, 2), got {omega}")
        self.indptr, self.indices, self.data, self.diag = _csr_parts(matrix)
        missing = np.flatnonzero(self.diag < 0)
        zero = np.flatnonzero(self.data[self.diag[self.diag >= 0]] == 0)
        if missing.size or zero.size:
            raise SingularPreconditionerError("SOR needs a nonzero diagonal")
        self.omega = float(omega)

    def apply(self, r, out, team=None):
        b = r.reshape(-1)
        x = out.reshape(-1)
        x[:] = 0.0
        kern.sor_sweep(self.indptr, self.indices, self.data, self.diag, b, x,
                       self.omega, True)
        kern.sor_sweep(self.indptr, self.indices, self.data, self.diag, b, x,
                       self.omega, False)


def make_sor(op: StencilOperator, omega: float = 1.0) -> SOR:
    return SOR(op.to_sparse(), omega)


class ILU0(Preconditioner):
    """Zero fill-in incomplete LU on the matrix pattern, canonical order."""

    name = 'ilu0'

    def __init__(self, matrix, block=None):
        self.indptr, self.indices, self.lu, self.diag = _csr_parts(matrix)
        missing = np.flatnonzero(self.diag < 0)
        if missing.size:
            raise FactorizationError(int(missing[0]), block)
        bad = kern.ilu0_factor(self.indptr, self.indices, self.lu, self.diag)
        if bad >= 0:
            raise FactorizationError(int(bad), block)

    def solve(self, b: np.ndarray, x: np.ndarray):
        kern.ilu_solve(self.indptr, self.indices, self.lu, self.diag, b, x)

    def apply(self, r, out, team=None):
        self.solve(r.reshape(-1), out.reshape(-1))


def make_ilu0(matrix) -> ILU0:
    return ILU0(matrix)


class BlockJacobi(Preconditioner):
    """ILU(0) on diagonal blocks of contiguous row strips; couplings dropped."""

    name = 'bjacobi'

    def __init__(self, matrix, blocks: int):
        if blocks < 1:
            raise ValueError("block count must be >= 1")
        mat = sp.csr_matrix(matrix)
        self.ranges = split_rows(mat.shape[0], blocks)
        self.factors = []
        for b, (lo, hi) in enumerate(self.ranges):
            self.factors.append(ILU0(mat[lo:hi, lo:hi], block=b))

    def apply(self, r, out, team=None):
        rf = r.reshape(-1)
        xf = out.reshape(-1)

        def work(b):
            lo, hi = self.ranges[b]
            self.factors[b].solve(rf[lo:hi], xf[lo:hi])

        if team is None:
            for b in range(len(self.ranges)):
                work(b)
        else:
            team.map(work, range(len(self.ranges)))


def make_bjacobi(matrix, blocks: int) -> BlockJacobi:
    return BlockJacobi(matrix, blocks)
