"""In-process worker team for row-strip parallelism.

Each worker owns a contiguous strip of grid rows. Work is dispatched to a
thread pool; the compiled kernels release the GIL. Reductions are always
formed from one partial per grid row, summed in row order, so results are
bit-identical for every worker count.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import _kernels as kern


def split_rows(n_rows: int, parts: int) -> list[tuple[int, int]]:
    """Near-equal contiguous ranges covering ``range(n_rows)``."""
    parts = max(1, min(parts, n_rows))
    edges = np.linspace(0, n_rows, parts + 1).round().astype(int)
    return [(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:])]


class WorkerTeam:
    """Runs strip kernels over ``n_rows`` grid rows with ``workers`` threads."""

    def __init__(self, workers: int, n_rows: int):
        if workers < 1:
            raise ValueError("worker count must be >= 1")
        self.workers = workers
        self.n_rows = n_rows
        self.strips = split_rows(n_rows, workers)
        self._pool = ThreadPoolExecutor(len(self.strips)) if len(self.strips) > 1 else None
        self._partial = np.empty(n_rows)

    def run(self, kernel, *args):
        """Call ``kernel(*args, row_start, row_stop)`` once per strip."""
        if self._pool is None:
            kernel(*args, 0, self.n_rows)
            return
        futures = [self._pool.submit(kernel, *args, a, b) for a, b in self.strips]
        for f in futures:
            f.result()

    def map(self, func, items):
        """Apply ``func`` to independent items (e.g. preconditioner blocks)."""
        if self._pool is None:
            return [func(item) for item in items]
        return list(self._pool.map(func, items))

    def dot(self, x: np.ndarray, y: np.ndarray) -> float:
        self.run(kern.row_dots, x, y, self._partial)
        return kern.ordered_sum(self._partial)

    def norm(self, x: np.ndarray) -> float:
        return float(np.sqrt(self.dot(x, x)))

    def axpy(self, alpha: float, x: np.ndarray, y: np.ndarray):
        self.run(kern.axpy_rows, alpha, x, y)

    def scale(self, alpha: float, x: np.ndarray, out: np.ndarray):
        self.run(kern.scale_rows, alpha, x, out)

    def close(self):
        if self._pool is not None:
            self._pool.shutdown()
            self._pool = None

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()
