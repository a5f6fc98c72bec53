import numpy as np
import pytest

from porepress.grid import Grid2D, GridFunction
from porepress.operators import CoefficientField


def smooth_field(rng, label=1, amp=0.5):
    """Random positive, smooth a and k (trigonometric bumps)."""
    pa = rng.uniform(-3, 3, 4)
    pk = rng.uniform(-3, 3, 4)

    def a(x1, x2):
        return 1.0 + amp * np.sin(pa[0] * x1 + pa[1] * x2 + pa[2]) * np.cos(pa[3] * x1)

    def k(x1, x2):
        return 1.5 + amp * np.cos(pk[0] * x1 - pk[1] * x2 + pk[2]) * np.sin(pk[3] * x2 + 1)

    return CoefficientField(a, k, label)


def random_gf(grid, rng):
    return GridFunction(grid, rng.standard_normal(grid.size))


# --- dense oracles built straight from the difference formulas -------------

def _idx(grid, i1, i2):
    """Flat index of interior node (i1, i2), None on the boundary."""
    if 1 <= i1 <= grid.N1 - 1 and 1 <= i2 <= grid.N2 - 1:
        return (i2 - 1) * (grid.N1 - 1) + (i1 - 1)
    return None


def dense_from_terms(grid, terms):
    """terms(x1, x2, h1, h2) -> list of (di1, di2, coefficient in (Ly)(x))."""
    n = grid.size
    M = np.zeros((n, n))
    for i2 in range(1, grid.N2):
        for i1 in range(1, grid.N1):
            row = _idx(grid, i1, i2)
            x1, x2 = i1 * grid.h1, i2 * grid.h2
            for d1, d2, c in terms(x1, x2, grid.h1, grid.h2):
                col = _idx(grid, i1 + d1, i2 + d2)
                if col is not None:
                    M[row, col] += c
    return M


def dense_lambda(grid, k):
    def terms(x1, x2, h1, h2):
        ke, kw = k(x1 + h1 / 2, x2), k(x1 - h1 / 2, x2)
        kn, ks = k(x1, x2 + h2 / 2), k(x1, x2 - h2 / 2)
        return [(1, 0, -ke / h1**2), (0, 0, ke / h1**2),
                (0, 0, kw / h1**2), (-1, 0, -kw / h1**2),
                (0, 1, -kn / h2**2), (0, 0, kn / h2**2),
                (0, 0, ks / h2**2), (0, -1, -ks / h2**2)]
    return dense_from_terms(grid, terms)


def dense_A(grid, fields):
    M = 0
    X1, X2 = grid.interior_coordinates()
    for f in fields:
        a = np.asarray(f.a(X1, X2), dtype=float) * np.ones(grid.shape)
        M = M + a.reshape(-1, 1) * dense_lambda(grid, f.k)
    return M


def dense_convection(grid, a, k):
    def terms(x1, x2, h1, h2):
        w1p = (a(x1 + h1, x2) - a(x1, x2)) / h1 * k(x1 + h1 / 2, x2)
        w1m = (a(x1, x2) - a(x1 - h1, x2)) / h1 * k(x1 - h1 / 2, x2)
        w2p = (a(x1, x2 + h2) - a(x1, x2)) / h2 * k(x1, x2 + h2 / 2)
        w2m = (a(x1, x2) - a(x1, x2 - h2)) / h2 * k(x1, x2 - h2 / 2)
        return [(1, 0, w1p / (2 * h1)), (0, 0, -w1p / (2 * h1)),
                (0, 0, w1m / (2 * h1)), (-1, 0, -w1m / (2 * h1)),
                (0, 1, w2p / (2 * h2)), (0, 0, -w2p / (2 * h2)),
                (0, 0, w2m / (2 * h2)), (0, -1, -w2m / (2 * h2))]
    return dense_from_terms(grid, terms)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def unit4():
    return Grid2D.square(4)


# --- acceptance summary ----------------------------------------------------------

ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section('acceptance criteria')
    for num in sorted(ACCEPTANCE):
        ok, title, detail = ACCEPTANCE[num]
        terminalreporter.write_line(
            f"criterion {num:2d} {'PASS' if ok else 'FAIL'}  {title}: {detail}")
