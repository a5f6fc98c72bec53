import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import dense_A, dense_convection, dense_lambda, random_gf, smooth_field
from porepress.errors import DomainError, GridMismatchError
from porepress.grid import Grid2D, GridFunction, inner_product, l2_norm, max_norm
from porepress.operators import (CoefficientField, GridVelocity, StencilOperator,
                                 apply, assemble_A, assemble_convection,
                                 assemble_diffusion, assemble_lambda, assemble_shifted,
                                 assemble_skew, assemble_sparse, check_max_principle,
                                 div_h, energy_constant, grid_spectral_bounds,
                                 grid_velocity, identity, subordination_constant)
from porepress.testbench.problem import TestProblem

UNIT = CoefficientField.constant(1.0, 1.0)


def same_coefficients(op1, op2):
    return all(np.array_equal(c1, c2) for c1, c2 in zip(op1.coefficients, op2.coefficients))


# --- Lambda ----------------------------------------------------------------

def test_lambda_center_spike(unit4):
    lam = assemble_lambda(unit4, UNIT)
    vals = np.zeros(unit4.size)
    vals[4] = 1.0  # node (2, 2), the center of the 3x3 interior
    z = apply(lam, GridFunction(unit4, vals))
    assert z[2, 2] == pytest.approx(64.0, rel=1e-15)
    assert z[1, 2] == pytest.approx(-16.0, rel=1e-15)
    assert z[1, 1] == 0.0


def test_lambda_single_node():
    lam = assemble_lambda(Grid2D.square(2), UNIT)
    assert lam.center.shape == (1, 1)
    assert lam.center[0, 0] == pytest.approx(16.0, rel=1e-15)


def test_lambda_matches_dense_oracle_and_is_adjoint(rng):
    g = Grid2D(8, 8)
    fld = smooth_field(rng)
    lam = assemble_lambda(g, fld)
    M = dense_lambda(g, fld.k)
    assert np.allclose(assemble_sparse(lam).toarray(), M, rtol=1e-14, atol=1e-12)
    for _ in range(20):
        y, z = random_gf(g, rng), random_gf(g, rng)
        lhs, rhs = inner_product(apply(lam, y), z), inner_product(y, apply(lam, z))
        assert abs(lhs - rhs) <= 1e-12 * abs(lhs) + 1e-12 * l2_norm(y) * l2_norm(z)


def test_nonpositive_k_rejected(unit4):
    bad = CoefficientField(lambda x1, x2: np.ones_like(x1), lambda x1, x2: x1 - 0.5)
    with pytest.raises(DomainError):
        assemble_lambda(unit4, bad)
    bad_a = CoefficientField(lambda x1, x2: 0 * x1, lambda x1, x2: 1 + 0 * x1)
    with pytest.raises(DomainError):
        assemble_A(unit4, [bad_a])


# --- A and the shifted system ------------------------------------------------

def test_assemble_A_single_unit_phase_equals_lambda(rng):
    g = Grid2D(8, 6)
    fld = smooth_field(rng)
    one_a = CoefficientField(lambda x1, x2: np.ones_like(x1), fld.k)
    assert same_coefficients(assemble_A(g, [one_a]), assemble_lambda(g, fld))


def test_assemble_A_empty():
    with pytest.raises(ValueError):
        assemble_A(Grid2D.square(4), [])


def test_assemble_A_xi0_is_symmetric_sum():
    p = TestProblem(xi=0.0, eta=3.0, n=8, tau=None)
    A = assemble_sparse(assemble_A(p.grid, p.fields)).toarray()
    lap = dense_lambda(p.grid, lambda x1, x2: np.ones_like(np.asarray(x1, float)))
    assert np.allclose(A, 4.0 * lap, rtol=1e-14)
    assert np.array_equal(A, A.T)


def test_assemble_A_nonsymmetric_and_matches_oracle():
    p = TestProblem(xi=1.0, eta=1.0, n=8, tau=None)
    A = assemble_sparse(assemble_A(p.grid, p.fields)).toarray()
    assert np.allclose(A, dense_A(p.grid, p.fields), rtol=1e-13, atol=1e-11)
    assert np.max(np.abs(A - A.T)) > 1e-3


def test_shifted_center_and_limits():
    g = Grid2D.square(2)
    lam = assemble_lambda(g, UNIT)
    assert assemble_shifted(lam, 1.0).center[0, 0] == 17.0
    p = TestProblem(1.0, 1.0, 8, None)
    A = assemble_A(p.grid, p.fields)
    S = assemble_shifted(A, 1e12)
    assert np.allclose(S.center, A.center, rtol=1e-10)
    assert S.kind == 'shifted_system'
    for bad in (0.0, -1.0):
        with pytest.raises(ValueError):
            assemble_shifted(A, bad)


@pytest.mark.parametrize('tau', [0.01, 1.0, 100.0])
def test_shifted_slack_is_inverse_tau(tau):
    p = TestProblem(-10.0, 1.0, 16, None)
    op = assemble_shifted(assemble_A(p.grid, p.fields), tau)
    rep = check_max_principle(op)
    assert rep.holds and rep.signs_ok
    # slack is center minus neighbours, so rounding scales with the center
    assert np.allclose(rep.slack, 1.0 / tau, rtol=0, atol=1e-14 * op.center.max())


# --- D, w, C, Cbar -----------------------------------------------------------

def test_diffusion_constant_a_equals_lambda(rng):
    g = Grid2D(8, 8)
    fld = smooth_field(rng)
    const = CoefficientField(lambda x1, x2: np.ones_like(x1), fld.k)
    assert same_coefficients(assemble_diffusion(g, const), assemble_lambda(g, const))


def test_diffusion_phase2_xi0_is_scaled_laplacian():
    p = TestProblem(0.0, 2.5, 8, None)
    D = assemble_diffusion(p.grid, p.fields[1])
    lap = assemble_lambda(p.grid, UNIT)
    for c1, c2 in zip(D.coefficients, lap.coefficients):
        assert np.allclose(c1, 2.5 * c2, rtol=1e-15)


def test_diffusion_lower_bound(rng):
    g = Grid2D.square(16)
    fld = smooth_field(rng)
    D = assemble_diffusion(g, fld)
    X1, X2 = g.node_coordinates()
    rho = fld.sample_a(X1, X2).min()
    from porepress.operators import midpoint_k
    kx, ky = midpoint_k(g, fld)
    kappa = min(kx.min(), ky.min())
    delta, _ = grid_spectral_bounds(g)
    for _ in range(100):
        y = random_gf(g, rng)
        assert inner_product(apply(D, y), y) / inner_product(y, y) >= rho * kappa * delta


def test_velocity_constant_and_linear_a():
    g = Grid2D(8, 6)
    w = grid_velocity(g, CoefficientField.constant(3.0, 2.0))
    assert not w.w1.any() and not w.w2.any()
    lin = CoefficientField(lambda x1, x2: 2.0 + 0.7 * x1, lambda x1, x2: np.ones_like(x1))
    w = grid_velocity(g, lin)
    assert np.allclose(w.w1, 0.7, rtol=1e-12)
    assert np.allclose(w.w2, 0.0, atol=1e-14)
    assert w.w1.shape == (5, 8) and w.w2.shape == (6, 7)


@pytest.mark.parametrize('xi,eta', [(1.0, 1.0), (-10.0, 0.5), (10.0, 2.0)])
def test_velocity_second_order_to_analytic(xi, eta):
    p = TestProblem(xi, eta, 16, None)
    errs = []
    for n in (32, 64, 128):
        g = Grid2D.square(n)
        w = grid_velocity(g, p.fields[1])
        exact = GridVelocity.from_function(g, lambda x1, x2: p.velocity2(x1, x2)[0],
                                           lambda x1, x2: p.velocity2(x1, x2)[1])
        errs.append(max(np.abs(w.w1 - exact.w1).max(), np.abs(w.w2 - exact.w2).max()))
    for coarse, fine in zip(errs, errs[1:]):
        assert 3.0 <= coarse / fine <= 5.0


def test_convection_zero_velocity():
    g = Grid2D.square(6)
    C = assemble_convection(g, GridVelocity(g, 0.0, 0.0))
    assert all(not c.any() for c in C.coefficients)
    Cb = assemble_skew(g, GridVelocity(g, 0.0, 0.0))
    assert all(not c.any() for c in Cb.coefficients)


def test_convection_matches_dense_oracle(rng):
    g = Grid2D(8, 7)
    fld = smooth_field(rng)
    C = assemble_convection(g, grid_velocity(g, fld))
    assert np.allclose(assemble_sparse(C).toarray(), dense_convection(g, fld.a, fld.k),
                       rtol=1e-12, atol=1e-12)


def test_convection_of_linear_function():
    g = Grid2D.square(8)
    c = 2.5
    C = assemble_convection(g, GridVelocity(g, c, 0.0))
    z = apply(C, GridFunction.from_function(g, lambda x1, x2: x1)).as_2d()
    assert np.allclose(z[:, 1:-1], c, rtol=1e-12)


@pytest.mark.parametrize('xi', [-10.0, 1.0, 10.0])
def test_splitting_identity_phase2(xi, rng):
    p = TestProblem(xi, 1.0, 32, None)
    f2 = p.fields[1]
    g = p.grid
    lhs_op = assemble_A(g, [f2])
    rhs_op = assemble_diffusion(g, f2) + assemble_convection(g, grid_velocity(g, f2))
    for _ in range(10):
        y = random_gf(g, rng)
        a = apply(lhs_op, y)
        assert max_norm(a - apply(rhs_op, y)) <= 1e-12 * max_norm(a)


def test_skew_symmetry_and_identity(rng):
    g = Grid2D.square(8)
    w = GridVelocity(g, rng.standard_normal((g.n2, g.N1)), rng.standard_normal((g.N2, g.n1)))
    Cb = assemble_skew(g, w)
    C = assemble_convection(g, w)
    div = div_h(g, w)
    for _ in range(100):
        y, z = random_gf(g, rng), random_gf(g, rng)
        assert abs(inner_product(apply(Cb, y), z) + inner_product(y, apply(Cb, z))) \
            <= 1e-12 * l2_norm(y) * l2_norm(z)
        expected = apply(Cb, y).values - 0.5 * div.values * y.values
        assert np.allclose(apply(C, y).values, expected, rtol=1e-12, atol=1e-12)


def test_div_h_simple_fields():
    g = Grid2D(8, 6)
    assert not div_h(g, GridVelocity(g, 1.5, -2.0)).values.any()
    w = GridVelocity.from_function(g, lambda x1, x2: x1, lambda x1, x2: 0 * x1)
    assert np.allclose(div_h(g, w).values, 1.0, rtol=1e-12)
    with pytest.raises(GridMismatchError):
        div_h(Grid2D(8, 8), w)


@pytest.mark.parametrize('xi,eta', [(1.0, 1.0), (-1.0, 3.0), (10.0, 1.0)])
def test_div_h_second_order(xi, eta):
    p = TestProblem(xi, eta, 32, None)
    errs = []
    for n in (32, 64, 128):
        g = Grid2D.square(n)
        d = div_h(g, grid_velocity(g, p.fields[1]))
        errs.append(np.abs(d.values - p.divergence2).max())
    for coarse, fine in zip(errs, errs[1:]):
        assert 3.0 <= coarse / fine <= 5.0


def test_energy_constant(rng):
    g = Grid2D.square(8)
    assert energy_constant(g, GridVelocity(g, 0.0, 0.0)) == 0.0
    w = GridVelocity(g, rng.standard_normal((g.n2, g.N1)), rng.standard_normal((g.N2, g.n1)))
    d = div_h(g, w).values
    scan = 0.0
    for v in d:
        scan = max(scan, abs(v))
    assert energy_constant(g, w) == 0.5 * scan
    p = TestProblem(10.0, 1.0, 256, None)
    M = energy_constant(p.grid, grid_velocity(p.grid, p.fields[1]))
    assert M == pytest.approx(20.0, rel=0.05)


def test_subordination_constant():
    g = Grid2D.square(8)
    assert subordination_constant(g, GridVelocity(g, 0.0, 0.0)) == 0.0
    assert subordination_constant(g, GridVelocity(g, 3.0, -4.0)) == 16.0
    p = TestProblem(1.0, 1.0, 256, None)
    Mbar = subordination_constant(p.grid, grid_velocity(p.grid, p.fields[1]))
    # supremum of (2 eta xi (x - 0.5))^2 on the unit square is 1
    assert Mbar == pytest.approx(1.0, rel=0.01)
    assert Mbar <= 1.0 + 1e-3


def test_spectral_bounds():
    d, D = grid_spectral_bounds(Grid2D.square(2))
    assert d == pytest.approx(16.0, rel=1e-14) and D == pytest.approx(16.0, rel=1e-14)
    for n in (3, 4, 17, 64):
        d, D = grid_spectral_bounds(Grid2D(n, n + 1, 1.0, 2.0))
        assert d < D
    d, _ = grid_spectral_bounds(Grid2D.square(256))
    assert d == pytest.approx(2 * np.pi ** 2, rel=1e-3)


def test_spectral_bounds_are_extreme_eigenvalues():
    g = Grid2D(6, 5, 1.0, 1.3)
    eig = np.linalg.eigvalsh(assemble_sparse(assemble_lambda(g, UNIT)).toarray())
    d, D = grid_spectral_bounds(g)
    assert eig.min() == pytest.approx(d, rel=1e-12)
    assert eig.max() == pytest.approx(D, rel=1e-12)


# --- maximum principle -------------------------------------------------------

def test_max_principle_on_A_is_weak():
    p = TestProblem(1.0, 1.0, 16, None)
    rep = check_max_principle(assemble_A(p.grid, p.fields))
    assert rep.signs_ok and rep.holds
    assert np.all(rep.slack == 0.0)


def test_max_principle_counterexample():
    p = TestProblem(1.0, 1.0, 8, 1.0)
    op = assemble_shifted(assemble_A(p.grid, p.fields), 1.0)
    east = np.array(op.east)
    east[2, 3] = -east[2, 3]
    bad = StencilOperator(op.grid, op.center, op.west, east, op.south, op.north)
    rep = check_max_principle(bad)
    assert not rep.signs_ok and not rep.holds
    assert rep.offending_nodes == [(4, 3)]


def test_positivity_of_shifted_solution():
    from porepress.solvers import dense_solve
    for xi in (-10.0, 0.0, 10.0):
        p = TestProblem(xi, 1.0, 16, 1.0)
        op = assemble_shifted(assemble_A(p.grid, p.fields), 1.0)
        rhs = GridFunction.from_function(p.grid, lambda x1, x2: x1 * x2)
        y = dense_solve(assemble_sparse(op), rhs)
        assert y.values.min() >= 0.0


# --- application and sparse form ---------------------------------------------

def test_identity_apply(rng):
    g = Grid2D(5, 7)
    y = random_gf(g, rng)
    assert np.array_equal(apply(identity(g), y).values, y.values)
    with pytest.raises(GridMismatchError):
        apply(identity(Grid2D.square(4)), y)


def test_laplacian_on_eigenfunction():
    errs = []
    for n in (16, 32, 64):
        g = Grid2D.square(n)
        lam = assemble_lambda(g, UNIT)
        y = GridFunction.from_function(g, lambda x1, x2: np.sin(np.pi * x1) * np.sin(np.pi * x2))
        errs.append(max_norm(apply(lam, y) - 2 * np.pi ** 2 * y))
    assert errs[-1] < 2 * np.pi ** 2 * 1e-3
    for coarse, fine in zip(errs, errs[1:]):
        assert 3.0 <= coarse / fine <= 5.0


def _random_operator(g, rng):
    return StencilOperator(g, *(rng.standard_normal(g.shape) for _ in range(5)))


def test_apply_matches_dense(rng):
    g = Grid2D.square(8)
    op = _random_operator(g, rng)
    M = assemble_sparse(op).toarray()
    y = random_gf(g, rng)
    assert np.allclose(apply(op, y).values, M @ y.values, rtol=1e-14, atol=1e-14)


def test_sparse_small_by_hand():
    g = Grid2D.square(3)  # 2x2 interior, h = 1/3
    M = assemble_sparse(assemble_lambda(g, UNIT)).toarray()
    c = 9.0
    expected = np.array([[4 * c, -c, -c, 0],
                         [-c, 4 * c, 0, -c],
                         [-c, 0, 4 * c, -c],
                         [0, -c, -c, 4 * c]])
    assert np.allclose(M, expected, rtol=1e-14)


def test_sparse_vs_stencil_and_symmetry(rng):
    g = Grid2D.square(16)
    op = _random_operator(g, rng)
    S = assemble_sparse(op)
    assert S.shape == (g.size, g.size)
    assert np.diff(S.indptr).max() <= 5
    y = random_gf(g, rng)
    assert np.allclose(S @ y.values, apply(op, y).values, rtol=1e-14, atol=1e-14)
    lam = assemble_sparse(assemble_lambda(g, smooth_field(rng))).toarray()
    assert np.array_equal(lam, lam.T)


# --- properties ----------------------------------------------------------------

@settings(max_examples=10, deadline=None)
@given(st.integers(0, 2 ** 31), st.sampled_from([8, 16, 32, 64]))
def test_property_splitting_random_coefficients(seed, n):
    rng = np.random.default_rng(seed)
    g = Grid2D.square(n)
    fields = [smooth_field(rng, 1), smooth_field(rng, 2)]
    A = assemble_A(g, fields)
    parts = [assemble_diffusion(g, f) + assemble_convection(g, grid_velocity(g, f))
             for f in fields]
    y = random_gf(g, rng)
    Ay = apply(A, y)
    split = apply(parts[0], y) + apply(parts[1], y)
    assert max_norm(Ay - split) <= 1e-12 * max_norm(Ay)


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 2 ** 31))
def test_property_energy_and_spectral_bracket(seed):
    rng = np.random.default_rng(seed)
    g = Grid2D(16, 12)
    fld = smooth_field(rng)
    w = grid_velocity(g, fld)
    C = assemble_convection(g, w)
    M = energy_constant(g, w)
    lam = assemble_lambda(g, fld)
    from porepress.operators import midpoint_k
    kx, ky = midpoint_k(g, fld)
    d, D = grid_spectral_bounds(g)
    y = random_gf(g, rng)
    yy = inner_product(y, y)
    assert abs(inner_product(apply(C, y), y)) <= M * yy * (1 + 1e-12)
    r = inner_product(apply(lam, y), y) / yy
    assert min(kx.min(), ky.min()) * d <= r <= max(kx.max(), ky.max()) * D


def test_subordination_scaled_bound(rng):
    p = TestProblem(10.0, 1.0, 32, None)
    g, f2 = p.grid, p.fields[1]
    D = assemble_diffusion(g, f2)
    w = grid_velocity(g, f2)
    C = assemble_convection(g, w)
    X1, X2 = g.node_coordinates()
    from porepress.operators import midpoint_k
    kx, ky = midpoint_k(g, f2)
    bound = 2 / (f2.sample_a(X1, X2).min() * min(kx.min(), ky.min())) * \
        subordination_constant(g, w)
    for _ in range(1000):
        y = random_gf(g, rng)
        Cy = apply(C, y)
        assert inner_product(Cy, Cy) <= bound * inner_product(apply(D, y), y)


def test_lambda_consistency_second_order():
    def u(x1, x2):
        return np.sin(np.pi * x1) * np.sin(2 * np.pi * x2) * np.exp(x1)

    def minus_lap_u(x1, x2):
        # u = e^x sin(pi x) sin(2 pi y)
        s1, c1, s2 = np.sin(np.pi * x1), np.cos(np.pi * x1), np.sin(2 * np.pi * x2)
        uxx = np.exp(x1) * s2 * ((1 - np.pi ** 2) * s1 + 2 * np.pi * c1)
        uyy = -4 * np.pi ** 2 * u(x1, x2)
        return -(uxx + uyy)

    errs = []
    for n in (16, 32, 64, 128):
        g = Grid2D.square(n)
        lam = assemble_lambda(g, UNIT)
        z = apply(lam, GridFunction.from_function(g, u))
        errs.append(max_norm(z - GridFunction.from_function(g, minus_lap_u)))
    for coarse, fine in zip(errs, errs[1:]):
        assert 3.0 <= coarse / fine <= 5.0
