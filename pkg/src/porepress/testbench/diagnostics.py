"""Algebraic diagnostics of the grid operators on the test problem.

Everything is a report field; nothing here raises on a failed check.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from ..grid import Grid2D, GridFunction, inner_product, l2_norm, max_norm
from ..operators import (apply, assemble_A, assemble_convection, assemble_diffusion,
                         assemble_lambda, assemble_shifted, assemble_skew,
                         check_max_principle, div_h, energy_constant,
                         grid_spectral_bounds, grid_velocity, midpoint_k,
                         subordination_constant)
from .problem import TestProblem


def _random(grid: Grid2D, rng) -> GridFunction:
    return GridFunction(grid, rng.standard_normal(grid.size))


def splitting_defect(grid, fields, samples, rng) -> float:
    """max over samples of |A y - sum (D + C) y|_C / |A y|_C."""
    A = assemble_A(grid, fields)
    parts = [assemble_diffusion(grid, f) + assemble_convection(grid, grid_velocity(grid, f))
             for f in fields]
    worst = 0.0
    for _ in range(samples):
        y = _random(grid, rng)
        Ay = apply(A, y)
        split = apply(parts[0], y)
        for p in parts[1:]:
            split = split + apply(p, y)
        worst = max(worst, max_norm(Ay - split) / max_norm(Ay))
    return worst


def symmetry_defect(op, samples, rng, skew=False) -> float:
    """Largest |(L y, z) -+ (y, L z)| relative to max(|Ly||z|, |y||Lz|)."""
    sign = 1.0 if skew else -1.0
    worst = 0.0
    for _ in range(samples):
        y, z = _random(op.grid, rng), _random(op.grid, rng)
        Ly, Lz = apply(op, y), apply(op, z)
        scale = max(l2_norm(Ly) * l2_norm(z), l2_norm(y) * l2_norm(Lz))
        if scale == 0.0:
            continue
        defect = abs(inner_product(Ly, z) + sign * inner_product(y, Lz))
        worst = max(worst, defect / scale)
    return worst


def divergence_errors(problem: TestProblem, levels: int) -> list[float]:
    """C-norm error of div_h(w2) against -4 eta xi on n, 2n, 4n, ... grids."""
    errs = []
    for lvl in range(levels):
        grid = Grid2D.square(problem.n * 2 ** lvl)
        w = grid_velocity(grid, problem.fields[1])
        errs.append(max_norm(div_h(grid, w) - GridFunction.constant(grid, problem.divergence2)))
    return errs


def _ratios(errs):
    return [a / b if b > 0 else float('nan') for a, b in zip(errs[:-1], errs[1:])]


@dataclass
class DiagnosticsReport:
    grid: int
    xi: float
    eta: float
    tau: float | None
    samples: int
    splitting_defect: float
    lambda_symmetry_defect: float
    diffusion_symmetry_defect: float
    skew_symmetry_defect: float
    energy_constant: float
    energy_constant_analytic: float
    energy_ratio_max: float
    energy_bound_holds: bool
    subordination_constant: float
    subordination_constant_analytic: float
    subordination_ratio_max: float
    subordination_scaled_bound: float
    subordination_printed_bound_holds: bool
    subordination_scaled_bound_holds: bool
    rayleigh_min: float
    rayleigh_max: float
    spectral_lower: float
    spectral_upper: float
    spectral_bracket_holds: bool
    max_principle_holds: bool
    max_principle_signs_ok: bool
    dominance_slack_min: float
    dominance_slack_max: float
    divergence_errors: list = field(default_factory=list)
    divergence_ratios: list = field(default_factory=list)

    def as_dict(self) -> dict:
        return asdict(self)


def run_diagnostics(problem: TestProblem, samples: int = 100, refine: int = 3,
                    seed: int = 0) -> DiagnosticsReport:
    """Check the splitting, symmetry, energy, subordination, spectral and
    maximum-principle properties for phase 2 of ``problem``.
    """
    rng = np.random.default_rng(seed)
    grid = problem.grid
    fields = problem.fields
    phase2 = fields[1]
    lam = assemble_lambda(grid, phase2)
    D = assemble_diffusion(grid, phase2)
    w = grid_velocity(grid, phase2)
    C = assemble_convection(grid, w)
    Cbar = assemble_skew(grid, w)

    M = energy_constant(grid, w)
    Mbar = subordination_constant(grid, w)
    X1, X2 = grid.node_coordinates()
    rho = float(np.min(phase2.sample_a(X1, X2)))
    kx, ky = midpoint_k(grid, phase2)
    kappa = min(float(kx.min()), float(ky.min()))
    kappa_bar = max(float(kx.max()), float(ky.max()))
    delta, Delta = grid_spectral_bounds(grid)
    scaled_bound = 2.0 / (rho * kappa) * Mbar

    e_ratio = s_ratio = 0.0
    r_min, r_max = np.inf, -np.inf
    for _ in range(samples):
        y = _random(grid, rng)
        yy = inner_product(y, y)
        Cy = apply(C, y)
        e_ratio = max(e_ratio, abs(inner_product(Cy, y)) / yy)
        dyy = inner_product(apply(D, y), y)
        if dyy > 0:
            s_ratio = max(s_ratio, inner_product(Cy, Cy) / dyy)
        r = inner_product(apply(lam, y), y) / yy
        r_min, r_max = min(r_min, r), max(r_max, r)

    system = assemble_A(grid, fields)
    if problem.tau is not None:
        system = assemble_shifted(system, problem.tau)
    mp = check_max_principle(system)
    errs = divergence_errors(problem, refine) if refine > 0 else []

    return DiagnosticsReport(
        grid=problem.n, xi=problem.xi, eta=problem.eta, tau=problem.tau,
        samples=samples,
        splitting_defect=splitting_defect(grid, fields, min(samples, 10), rng),
        lambda_symmetry_defect=symmetry_defect(lam, min(samples, 10), rng),
        diffusion_symmetry_defect=symmetry_defect(D, min(samples, 10), rng),
        skew_symmetry_defect=symmetry_defect(Cbar, min(samples, 10), rng, skew=True),
        energy_constant=M, energy_constant_analytic=problem.energy_constant2,
        energy_ratio_max=e_ratio, energy_bound_holds=e_ratio <= M * (1 + 1e-12),
        subordination_constant=Mbar,
        subordination_constant_analytic=problem.subordination_constant2,
        subordination_ratio_max=s_ratio, subordination_scaled_bound=scaled_bound,
        subordination_printed_bound_holds=s_ratio <= Mbar,
        subordination_scaled_bound_holds=s_ratio <= scaled_bound,
        rayleigh_min=r_min, rayleigh_max=r_max,
        spectral_lower=kappa * delta, spectral_upper=kappa_bar * Delta,
        spectral_bracket_holds=bool(kappa * delta <= r_min and r_max <= kappa_bar * Delta),
        max_principle_holds=mp.holds, max_principle_signs_ok=mp.signs_ok,
        dominance_slack_min=mp.min_slack, dominance_slack_max=float(mp.slack.max()),
        divergence_errors=errs, divergence_ratios=_ratios(errs))
