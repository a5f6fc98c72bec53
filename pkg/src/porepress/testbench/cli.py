"""Command line entry point: ``porepress {solve,sweep,check,scale}``.

Exit codes: 0 success, 1 solver failure, 2 argument error.
"""
from __future__ import annotations

import argparse
import logging
import sys

import numpy as np

from ..grid import GridFunction, max_norm
from ..solvers import SolverConfig
from ..timestep import TimeSchemeConfig, evolve
from ..solvers import gmres_solve
from ..operators import assemble_A
from .bench import TABLES, load_axes, run_scaling, run_sweep
from .diagnostics import run_diagnostics
from .problem import TestProblem, build_test_system
from .records import export_records, records_to_csv, records_to_json

EXIT_SOLVER = 1
EXIT_ARGS = 2


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(',') if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _add_problem_args(p, tau_default=1.0):
    p.add_argument('--grid', type=int, default=64, help='cells per axis N')
    p.add_argument('--xi', type=float, default=0.0)
    p.add_argument('--eta', type=float, default=1.0)
    p.add_argument('--tau', type=float, default=tau_default)


def _add_solver_args(p):
    p.add_argument('--rtol', type=float, default=1e-5)
    p.add_argument('--restart', type=int, default=30)
    p.add_argument('--max-iterations', type=int, default=10000)
    p.add_argument('--sor-omega', type=float, default=1.0)


def _solver_from(args, **extra) -> SolverConfig:
    return SolverConfig(rtol=args.rtol, restart=args.restart,
                        max_iterations=args.max_iterations,
                        sor_omega=args.sor_omega, **extra)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='porepress',
        description='Pressure-problem operators and preconditioned GMRES benchmarks.')
    parser.add_argument('-v', '--verbose', action='store_true')
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('solve', help='solve one test system')
    _add_problem_args(p)
    p.add_argument('--pc', default='none',
                   choices=['none', 'jacobi', 'sor', 'ilu', 'ilu0', 'mg', 'bjacobi'])
    _add_solver_args(p)
    p.add_argument('--workers', type=int, default=1)
    p.add_argument('--sigma', type=float, default=None,
                   help='run the weighted time scheme with this weight')
    p.add_argument('--steps', type=int, default=1, help='time steps with --sigma')

    p = sub.add_parser('sweep', help='run a parameter sweep')
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument('--table', type=int, choices=sorted(TABLES))
    src.add_argument('--axes', metavar='CONFIG', help='key = value axes file')
    p.add_argument('--out', default=None, help='output path (default: stdout)')
    p.add_argument('--format', choices=['csv', 'json'], default=None)
    p.add_argument('--reps', type=int, default=None)
    _add_solver_args(p)

    p = sub.add_parser('check', help='operator diagnostics')
    _add_problem_args(p)
    p.add_argument('--refine', type=int, default=3,
                   help='grids in the divergence refinement study')
    p.add_argument('--samples', type=int, default=100)

    p = sub.add_parser('scale', help='timing across worker counts')
    _add_problem_args(p)
    p.add_argument('--pc', default='none',
                   choices=['none', 'jacobi', 'sor', 'ilu', 'ilu0', 'mg', 'bjacobi'])
    p.add_argument('--workers', type=_int_list, default=[1, 2, 4, 8])
    p.add_argument('--out', default=None)
    p.add_argument('--format', choices=['csv', 'json'], default='csv')
    p.add_argument('--reps', type=int, default=3)
    _add_solver_args(p)
    return parser


def _emit(records, out, fmt):
    fmt = fmt or ('json' if out and out.endswith('.json') else 'csv')
    if out:
        export_records(records, fmt, out)
    else:
        (records_to_csv if fmt == 'csv' else records_to_json)(records, sys.stdout)


def _cmd_solve(args) -> int:
    problem = TestProblem(args.xi, args.eta, args.grid, args.tau)
    solver = _solver_from(args, preconditioner=args.pc, workers=args.workers)
    if args.sigma is None:
        op, rhs = build_test_system(problem)
        y, rep = gmres_solve(op, rhs, solver, fields=problem.fields, tau=problem.tau)
        reports = [rep]
    else:
        opA = assemble_A(problem.grid, problem.fields)
        cfg = TimeSchemeConfig(args.sigma, args.tau, args.steps * args.tau,
                               lambda x1, x2, t: np.ones_like(x1))
        y, reports = evolve(opA, GridFunction.zeros(problem.grid), cfg, solver,
                            fields=problem.fields)
    for n, rep in enumerate(reports):
        prefix = f"step {n + 1}: " if len(reports) > 1 else ''
        print(f"{prefix}iterations={rep.iterations} converged={rep.converged} "
              f"residual={rep.final_true_residual:.6e} time={rep.wall_time:.4f}s")
    print(f"max|y|={max_norm(y):.10g} min(y)={float(y.values.min()):.10g}")
    return 0 if all(r.converged for r in reports) else EXIT_SOLVER


def _cmd_sweep(args) -> int:
    overrides, other = {}, {}
    if args.table is not None:
        axes = TABLES[args.table]
    else:
        axes, overrides, other = load_axes(args.axes)
    base = dict(rtol=args.rtol, restart=args.restart,
                max_iterations=args.max_iterations, sor_omega=args.sor_omega)
    base.update(overrides)
    reps = args.reps or other.get('reps', 3)
    records = run_sweep(axes, SolverConfig(**base), reps)
    _emit(records, args.out or other.get('out'), args.format or other.get('format'))
    return 0 if all(r.error is None for r in records) else EXIT_SOLVER


def _cmd_check(args) -> int:
    problem = TestProblem(args.xi, args.eta, args.grid, args.tau)
    report = run_diagnostics(problem, samples=args.samples, refine=args.refine)
    for key, value in report.as_dict().items():
        if isinstance(value, float):
            value = f"{value:.10g}"
        elif isinstance(value, list):
            value = ', '.join(f"{v:.6g}" for v in value)
        print(f"{key}: {value}")
    return 0


def _cmd_scale(args) -> int:
    problem = TestProblem(args.xi, args.eta, args.grid, args.tau)
    records = run_scaling(problem, _solver_from(args, preconditioner=args.pc),
                          args.workers, args.reps)
    _emit(records, args.out, args.format)
    return 0 if all(r.error is None for r in records) else EXIT_SOLVER


COMMANDS = {'solve': _cmd_solve, 'sweep': _cmd_sweep, 'check': _cmd_check,
            'scale': _cmd_scale}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format='%(levelname)s %(name)s: %(message)s')
    try:
        return COMMANDS[args.command](args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ARGS
    except ArithmeticError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == '__main__':
    sys.exit(main())
