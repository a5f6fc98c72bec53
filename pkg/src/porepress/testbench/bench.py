"""Parameter sweeps and worker-scaling runs on the test problem."""
from __future__ import annotations

import itertools
import logging
import statistics
from dataclasses import dataclass, field
from pathlib import Path

from ..solvers import SolverConfig, canonical_pc, gmres_solve
from .problem import TestProblem, build_test_system
from .records import BenchmarkRecord

log = logging.getLogger(__name__)

XI_VALUES = (-10.0, -1.0, 0.0, 1.0, 10.0)


@dataclass
class SweepAxes:
    """Value lists; runs cover their Cartesian product.

    Order of iteration (slowest first): grid, eta, tau, pc, workers, xi.
    """

    grid: list = field(default_factory=lambda: [64])
    xi: list = field(default_factory=lambda: [0.0])
    eta: list = field(default_factory=lambda: [1.0])
    tau: list = field(default_factory=lambda: [1.0])
    pc: list = field(default_factory=lambda: ['none'])
    workers: list = field(default_factory=lambda: [1])

    def __post_init__(self):
        for name in ('grid', 'xi', 'eta', 'tau', 'pc', 'workers'):
            if len(getattr(self, name)) == 0:
                raise ValueError(f"sweep axis {name!r} is empty")
        self.pc = [canonical_pc(p) for p in self.pc]

    def points(self):
        for n, eta, tau, pc, w, xi in itertools.product(
                self.grid, self.eta, self.tau, self.pc, self.workers, self.xi):
            yield int(n), float(xi), float(eta), float(tau), pc, int(w)

    def __len__(self):
        return (len(self.grid) * len(self.xi) * len(self.eta) * len(self.tau)
                * len(self.pc) * len(self.workers))


# Preset axes of the reference iteration tables. tau = 1 for tables 1 and 2.
TABLES = {
    1: SweepAxes(grid=[256], xi=list(XI_VALUES), eta=[0.01, 0.1, 1.0, 10.0, 100.0]),
    2: SweepAxes(grid=[128, 256, 512], xi=list(XI_VALUES),
                 pc=['none', 'jacobi', 'sor', 'ilu0', 'mg']),
    3: SweepAxes(grid=[256], xi=list(XI_VALUES), eta=[0.01, 0.1, 1.0],
                 tau=[0.01, 0.1, 1.0, 10.0, 100.0]),
    4: SweepAxes(grid=[512], xi=list(XI_VALUES), pc=['none', 'bjacobi', 'mg'],
                 workers=[1, 2, 4, 8, 16]),
}


def run_point(problem: TestProblem, solver: SolverConfig, repetitions: int = 1,
              workers: int | None = None) -> BenchmarkRecord:
    """Solve one test system ``repetitions`` times from x0 = 0.

    With block Jacobi and no explicit block count, there is one block per
    worker. The wall time is the median over repetitions.
    """
    if repetitions < 1:
        raise ValueError("repetitions must be >= 1")
    cfg = solver if workers is None else solver.with_(workers=workers)
    base = dict(grid=problem.n, xi=problem.xi, eta=problem.eta, tau=problem.tau,
                pc=cfg.preconditioner, workers=cfg.workers)
    try:
        op, rhs = build_test_system(problem)
        times, first = [], None
        for _ in range(repetitions):
            _, rep = gmres_solve(op, rhs, cfg, fields=problem.fields, tau=problem.tau)
            times.append(rep.wall_time)
            first = first or rep
    except (ArithmeticError, ValueError) as exc:
        log.warning("run %s failed: %s", base, exc)
        return BenchmarkRecord(**base, iterations=-1, converged=False,
                               wall_time_seconds=float('nan'),
                               residual=float('nan'), error=str(exc))
    return BenchmarkRecord(**base, iterations=first.iterations,
                           converged=first.converged,
                           wall_time_seconds=statistics.median(times),
                           residual=first.final_true_residual)


def run_sweep(axes: SweepAxes, solver: SolverConfig | None = None,
              repetitions: int = 1) -> list[BenchmarkRecord]:
    solver = solver or SolverConfig()
    records = []
    for i, (n, xi, eta, tau, pc, w) in enumerate(axes.points(), 1):
        rec = run_point(TestProblem(xi, eta, n, tau), solver.with_(preconditioner=pc),
                        repetitions, workers=w)
        log.info("[%d/%d] grid=%d xi=%g eta=%g tau=%g pc=%s workers=%d -> %d its, %.3f s",
                 i, len(axes), n, xi, eta, tau, pc, w, rec.iterations,
                 rec.wall_time_seconds)
        records.append(rec)
    return records


def run_scaling(problem: TestProblem, solver: SolverConfig, worker_counts,
                repetitions: int = 1) -> list[BenchmarkRecord]:
    """Same system at each worker count (block Jacobi: blocks = workers)."""
    counts = list(worker_counts)
    if not counts or any(int(w) < 1 for w in counts):
        raise ValueError("worker counts must be >= 1")
    return [run_point(problem, solver, repetitions, workers=int(w)) for w in counts]


# --- flat key = value config files -----------------------------------------

_LIST_KEYS = {'grid': int, 'xi': float, 'eta': float, 'tau': float, 'pc': str,
              'workers': int}
_SOLVER_KEYS = {'rtol': float, 'atol': float, 'restart': int, 'max_iterations': int,
                'sor_omega': float, 'mg_presmooth': int, 'mg_postsmooth': int,
                'mg_coarsest': int, 'bjacobi_blocks': int}
_OTHER_KEYS = {'reps': int, 'out': str, 'format': str}


def parse_config(text: str) -> dict:
    """Parse ``key = value`` lines; list-valued keys take comma-separated values.

    Keys mirror the CLI flags (dashes or underscores). ``#`` starts a comment.
    """
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split('#', 1)[0].strip()
        if not line:
            continue
        if '=' not in line:
            raise ValueError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (s.strip() for s in line.split('=', 1))
        key = key.replace('-', '_')
        if key in _LIST_KEYS:
            conv = _LIST_KEYS[key]
            out[key] = [conv(v.strip()) for v in value.split(',') if v.strip()]
        elif key in _SOLVER_KEYS:
            out[key] = _SOLVER_KEYS[key](value)
        elif key in _OTHER_KEYS:
            out[key] = _OTHER_KEYS[key](value)
        else:
            raise ValueError(f"line {lineno}: unknown key {key!r}")
    return out


def load_axes(path) -> tuple[SweepAxes, dict, dict]:
    """Read a config file into sweep axes, solver overrides and other options."""
    cfg = parse_config(Path(path).read_text())
    axes = SweepAxes(**{k: v for k, v in cfg.items() if k in _LIST_KEYS})
    solver = {k: v for k, v in cfg.items() if k in _SOLVER_KEYS}
    other = {k: v for k, v in cfg.items() if k in _OTHER_KEYS}
    return axes, solver, other
