"""
Compiled inner loops.

Everything here works on plain arrays so the same kernel can be called on a
full grid or on a strip ``[row_start, row_stop)`` of grid rows by one worker.
All kernels release the GIL so strips can run on a thread pool.
"""
import numba as nb
import numpy as np

_opts = {'nogil': True, 'cache': True}


@nb.njit(**_opts)
def stencil_apply(center, west, east, south, north, y, z, row_start, row_stop):
    """z = center*y - west*y_W - east*y_E - south*y_S - north*y_N on rows.

    All arrays are shaped ``(n2, n1)``; values outside the interior are zero.
    """
    n2, n1 = y.shape
    for j in range(row_start, row_stop):
        for i in range(n1):
            acc = center[j, i] * y[j, i]
            if i > 0:
                acc -= west[j, i] * y[j, i - 1]
            if i < n1 - 1:
                acc -= east[j, i] * y[j, i + 1]
            if j > 0:
                acc -= south[j, i] * y[j - 1, i]
            if j < n2 - 1:
                acc -= north[j, i] * y[j + 1, i]
            z[j, i] = acc


@nb.njit(fastmath=True, **_opts)
def _row_dot(x, y):
    acc = 0.0
    for i in range(x.shape[0]):
        acc += x[i] * y[i]
    return acc


@nb.njit(**_opts)
def row_dots(x, y, partial, row_start, row_stop):
    # One partial sum per grid row: the reduction tree does not depend on how
    # rows are split between workers.
    for j in range(row_start, row_stop):
        partial[j] = _row_dot(x[j], y[j])


@nb.njit(**_opts)
def ordered_sum(partial):
    acc = 0.0
    for j in range(partial.shape[0]):
        acc += partial[j]
    return acc


@nb.njit(**_opts)
def axpy_rows(alpha, x, y, row_start, row_stop):
    """y += alpha * x on a row range (in place)."""
    n1 = x.shape[1]
    for j in range(row_start, row_stop):
        for i in range(n1):
            y[j, i] += alpha * x[j, i]


@nb.njit(**_opts)
def scale_rows(alpha, x, out, row_start, row_stop):
    n1 = x.shape[1]
    for j in range(row_start, row_stop):
        for i in range(n1):
            out[j, i] = alpha * x[j, i]


@nb.njit(**_opts)
def divide_rows(x, d, out, row_start, row_stop):
    n1 = x.shape[1]
    for j in range(row_start, row_stop):
        for i in range(n1):
            out[j, i] = x[j, i] / d[j, i]


# --- sparse (CSR, sorted column indices) --------------------------------------

@nb.njit(**_opts)
def csr_diagonal_positions(indptr, indices):
    """Index into ``data`` of each row's diagonal entry, -1 when absent."""
    n = indptr.shape[0] - 1
    pos = np.full(n, -1, dtype=np.int64)
    for r in range(n):
        for p in range(indptr[r], indptr[r + 1]):
            if indices[p] == r:
                pos[r] = p
                break
    return pos


@nb.njit(**_opts)
def ilu0_factor(indptr, indices, data, diag):
    """In-place ILU(0), IKJ ordering, no pivoting.

    ``data`` holds the strict lower part of L (unit diagonal implied) and U on
    return. Returns -1 on success or the first row with a zero pivot.
    """
    n = indptr.shape[0] - 1
    # column -> position lookup for the current row, -1 outside the pattern
    where = np.full(n, -1, dtype=np.int64)
    for i in range(n):
        start = indptr[i]
        stop = indptr[i + 1]
        for p in range(start, stop):
            where[indices[p]] = p
        for p in range(start, stop):
            k = indices[p]
            if k >= i:
                break
            pivot = data[diag[k]]
            if pivot == 0.0:
                return k
            data[p] /= pivot
            lik = data[p]
            for q in range(diag[k] + 1, indptr[k + 1]):
                target = where[indices[q]]
                if target >= 0:
                    data[target] -= lik * data[q]
        for p in range(start, stop):
            where[indices[p]] = -1
        if diag[i] < 0 or data[diag[i]] == 0.0:
            return i
    return -1


@nb.njit(**_opts)
def ilu_solve(indptr, indices, lu, diag, b, x):
    """Solve (L U) x = b with the factors produced by :func:`ilu0_factor`."""
    n = indptr.shape[0] - 1
    for i in range(n):
        acc = b[i]
        for p in range(indptr[i], diag[i]):
            acc -= lu[p] * x[indices[p]]
        x[i] = acc
    for i in range(n - 1, -1, -1):
        acc = x[i]
        for p in range(diag[i] + 1, indptr[i + 1]):
            acc -= lu[p] * x[indices[p]]
        x[i] = acc / lu[diag[i]]


@nb.njit(**_opts)
def sor_sweep(indptr, indices, data, diag, b, x, omega, forward):
    """One SOR sweep on A x = b in place; omega = 1 is Gauss-Seidel."""
    n = indptr.shape[0] - 1
    if forward:
        start, stop, step = 0, n, 1
    else:
        start, stop, step = n - 1, -1, -1
    for i in range(start, stop, step):
        acc = b[i]
        for p in range(indptr[i], indptr[i + 1]):
            if p != diag[i]:
                acc -= data[p] * x[indices[p]]
        x[i] = (1.0 - omega) * x[i] + omega * acc / data[diag[i]]


@nb.njit(**_opts)
def csr_matvec(indptr, indices, data, x, out):
    n = indptr.shape[0] - 1
    for i in range(n):
        acc = 0.0
        for p in range(indptr[i], indptr[i + 1]):
            acc += data[p] * x[indices[p]]
        out[i] = acc


# --- multigrid transfers (interior-node arrays, zero boundary) ----------------

@nb.njit(**_opts)
def restrict_full_weighting(fine, coarse):
    """Nine-point full weighting; coarse node (q, p) sits on fine (2q+1, 2p+1)."""
    m2, m1 = coarse.shape
    n2, n1 = fine.shape
    for q in range(m2):
        jc = 2 * q + 1
        for p in range(m1):
            ic = 2 * p + 1
            acc = 4.0 * fine[jc, ic]
            acc += 2.0 * (fine[jc, ic - 1] + fine[jc, ic + 1]
                          + fine[jc - 1, ic] + fine[jc + 1, ic])
            acc += (fine[jc - 1, ic - 1] + fine[jc - 1, ic + 1]
                    + fine[jc + 1, ic - 1] + fine[jc + 1, ic + 1])
            coarse[q, p] = acc / 16.0


@nb.njit(**_opts)
def prolong_bilinear_add(coarse, fine):
    """fine += bilinear interpolation of coarse (zero on the boundary)."""
    m2, m1 = coarse.shape
    n2, n1 = fine.shape
    for j in range(n2):
        # fine row j <-> coarse position (j - 1) / 2
        for i in range(n1):
            if j % 2 == 1:
                qs = ((j - 1) // 2, (j - 1) // 2)
                wq = (1.0, 0.0)
            else:
                qs = (j // 2 - 1, j // 2)
                wq = (0.5, 0.5)
            if i % 2 == 1:
                ps = ((i - 1) // 2, (i - 1) // 2)
                wp = (1.0, 0.0)
            else:
                ps = (i // 2 - 1, i // 2)
                wp = (0.5, 0.5)
            acc = 0.0
            for a in range(2):
                q = qs[a]
                if wq[a] == 0.0 or q < 0 or q >= m2:
                    continue
                for b in range(2):
                    p = ps[b]
                    if wp[b] == 0.0 or p < 0 or p >= m1:
                        continue
                    acc += wq[a] * wp[b] * coarse[q, p]
            fine[j, i] += acc
