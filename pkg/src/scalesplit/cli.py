"""`bench` command line interface.

Subcommands:
  run       one (problem, method, parameters) experiment
  sweep     grid search for the experimentally optimal parameters
  tables    regenerate a reference result table (m <= 128 by default)
  spectrum  spectral summary, convergence regions and optimal parameters
  fmu       CSV data of |f_mu(alpha)| curves for plotting
  backends  timing comparison of the compiled and pure-Python kernel cores

Exit codes: 0 success, 2 non-convergence (dagger/size-cap rows present),
3 numerical breakdown.  The environment variable BENCH_MAX_N caps the problem
size n = m^2.
"""

import argparse
import sys
import time

import numpy as np

from . import _kernels, bench, spectral
from .factor import (NonpositivePivotError, NotPositiveDefiniteError,
                     ZeroPivotError)
from .krylov import CgBreakdownError
from .stationary import StoppingRule

EXIT_OK = 0
EXIT_NOCONV = 2
EXIT_BREAKDOWN = 3


def _add_problem_args(p):
    p.add_argument("--problem", required=True, choices=("ex1", "ex2", "ex3"))
    p.add_argument("--m", type=int, required=True, help="grid parameter (n = m^2)")
    p.add_argument("--tau", default="h",
                   help="ex1 time step: 'h', '500h' or a number")


def _add_method_args(p):
    p.add_argument("--method", required=True,
                   choices=sorted(bench.STATIONARY | bench.KRYLOV))
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--inexact", action="store_true",
                   help="PCG inner solves instead of exact Cholesky")
    p.add_argument("--inner-tol", type=float, default=1e-2)
    p.add_argument("--droptol", type=float, default=1e-2,
                   help="IC droptol (inexact) or ILU droptol (bicgstab-ilu)")


def _add_stop_args(p):
    p.add_argument("--rel-tol", type=float, default=1e-6)
    p.add_argument("--max-iter", type=int, default=500)
    p.add_argument("--repeats", type=int, default=1,
                   help="timing repeats; wall time reported as the median")


def _emit(rows, fmt, out):
    text = bench.emit(rows, fmt)
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _rows_exit_code(rows):
    if any(r.marker for r in rows):
        return EXIT_NOCONV
    return EXIT_OK


def cmd_run(args):
    spec = bench.ExperimentSpec(
        args.problem, args.m, args.method, args.alpha, args.beta,
        tau=args.tau, inexact=args.inexact, inner_tol=args.inner_tol,
        droptol=args.droptol,
        stop=StoppingRule(args.rel_tol, args.max_iter), repeats=args.repeats)
    rows = bench.run(spec)
    _emit(rows, args.format, args.out)
    return _rows_exit_code(rows)


def cmd_sweep(args):
    res = bench.sweep(
        args.problem, args.m, args.method,
        alpha_range=(args.alpha_min, args.alpha_max, args.alpha_step),
        beta_range=(args.beta_min, args.beta_max, args.beta_step)
        if args.method == "ttscsp" else None,
        tau=args.tau, stop=StoppingRule(args.rel_tol, args.max_iter),
        inexact=args.inexact, inner_tol=args.inner_tol, droptol=args.droptol)
    if not res.converged_any:
        print("no convergent grid point", file=sys.stderr)
        return EXIT_NOCONV
    print(f"alpha_opt={res.alpha_opt:g} beta_opt={res.beta_opt:g} "
          f"iterations={res.iterations:g}")
    if args.full:
        _emit(res.rows, args.format, args.out)
    return EXIT_OK


def cmd_tables(args):
    sizes = tuple(int(s) for s in args.sizes.split(","))
    rows = bench.reproduce_table(args.reproduce, sizes=sizes,
                                 repeats=args.repeats)
    _emit(rows, args.format, args.out)
    return _rows_exit_code(rows)


def cmd_spectrum(args):
    problem = bench.make_problem(args.problem, args.m, args.tau)
    mode = "dense" if problem.n <= spectral.DENSE_CAP else "extremal"
    spec = spectral.spectrum_of_S(problem.W, problem.T, mode=mode)
    print(f"problem={args.problem} m={args.m} n={problem.n} mode={mode}")
    print(f"mu_min={spec.mu_min:.10g} mu_max={spec.mu_max:.10g} "
          f"mu_s={spec.mu_s:.10g}")
    a_star, b_star = spectral.optimal_params(spec)
    print(f"alpha_star={a_star:.10g} beta_star={b_star:.10g}")
    r1 = spectral.theorem1_region(spec)
    print(f"two-sided region: alpha in ({r1.alpha_lo:.6g}, {r1.alpha_hi:.6g}), "
          f"beta in ({r1.beta_lo:.6g}, {r1.beta_hi:.6g})"
          + (" [empty]" if r1.empty else ""))
    if spec.mu_s > 0:
        r3 = spectral.theorem3_region(spec)
        print(f"one-sided region: alpha > {r3.alpha_min:.6g}, "
              f"beta > {r3.beta_min:.6g}, beta < alpha")
    if spec.mu is not None:
        rho = spectral.spectral_radius_G(problem, a_star, b_star, spec=spec)
        sig = spectral.sigma_bound(a_star, b_star, spec)
        print(f"rho(G) at (alpha*, beta*) = {rho:.6g}  sigma bound = {sig:.6g}")
    return EXIT_OK


def cmd_fmu(args):
    mus = [float(x) for x in args.mu.split(",")]
    alphas = np.arange(args.alpha_min, args.alpha_max + args.alpha_step / 2,
                       args.alpha_step)
    text = bench.plot_data_fmu(mus, alphas)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_backends(args):
    names = _kernels.available()
    if len(names) < 2:
        print(f"only {names[0]} backend available; build the extension to compare")
    rows = []
    for name in names:
        _kernels.use(name)
        t0 = time.perf_counter()
        spec = bench.ExperimentSpec(args.problem, args.m, "ttscsp",
                                    args.alpha, args.beta, tau=args.tau)
        row = bench.run(spec)[0]
        total = time.perf_counter() - t0
        rows.append((name, row.iterations, row.wall_seconds, total))
    _kernels.use(_kernels._initial_backend())
    print(f"{'backend':<10} {'iters':>6} {'solve_s':>9} {'total_s':>9}")
    for name, iters, wall, total in rows:
        print(f"{name:<10} {iters:>6g} {wall:>9.3f} {total:>9.3f}")
    if len(rows) == 2:
        speed = rows[0][3] / rows[1][3]
        faster = rows[1][0] if speed > 1 else rows[0][0]
        print(f"speedup: {max(speed, 1/speed):.1f}x in favor of {faster}")
    return EXIT_OK


def build_parser():
    ap = argparse.ArgumentParser(prog="bench", description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("run", help="run one experiment")
    _add_problem_args(p)
    _add_method_args(p)
    _add_stop_args(p)
    p.add_argument("--format", default="md", choices=("csv", "md", "json"))
    p.add_argument("--out")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", help="parameter sweep")
    _add_problem_args(p)
    p.add_argument("--method", required=True,
                   choices=sorted(bench.STATIONARY))
    p.add_argument("--alpha-min", type=float, default=0.01)
    p.add_argument("--alpha-max", type=float, default=3.0)
    p.add_argument("--alpha-step", type=float, default=0.01)
    p.add_argument("--beta-min", type=float, default=0.1)
    p.add_argument("--beta-max", type=float, default=2.0)
    p.add_argument("--beta-step", type=float, default=0.1)
    p.add_argument("--inexact", action="store_true")
    p.add_argument("--inner-tol", type=float, default=1e-2)
    p.add_argument("--droptol", type=float, default=1e-2)
    _add_stop_args(p)
    p.add_argument("--full", action="store_true", help="emit every grid point")
    p.add_argument("--format", default="csv", choices=("csv", "md", "json"))
    p.add_argument("--out")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("tables", help="regenerate a reference table")
    p.add_argument("--reproduce", required=True, choices=sorted(bench.TABLES))
    p.add_argument("--sizes", default="32,64,128")
    p.add_argument("--repeats", type=int, default=1)
    p.add_argument("--format", default="md", choices=("csv", "md", "json"))
    p.add_argument("--out")
    p.set_defaults(func=cmd_tables)

    p = sub.add_parser("spectrum", help="spectral summary and regions")
    _add_problem_args(p)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("fmu", help="|f_mu(alpha)| curve data as CSV")
    p.add_argument("--mu", required=True, help="comma-separated mu values")
    p.add_argument("--alpha-min", type=float, default=0.01)
    p.add_argument("--alpha-max", type=float, default=3.0)
    p.add_argument("--alpha-step", type=float, default=0.01)
    p.add_argument("--out")
    p.set_defaults(func=cmd_fmu)

    p = sub.add_parser("backends", help="compare kernel backends")
    p.add_argument("--problem", default="ex1", choices=("ex1", "ex2", "ex3"))
    p.add_argument("--m", type=int, default=32)
    p.add_argument("--tau", default="h")
    p.add_argument("--alpha", type=float, default=0.33)
    p.add_argument("--beta", type=float, default=1.1)
    p.set_defaults(func=cmd_backends)

    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (bench.BreakdownError, NotPositiveDefiniteError,
            NonpositivePivotError, ZeroPivotError, CgBreakdownError) as exc:
        print(f"breakdown: {exc}", file=sys.stderr)
        return EXIT_BREAKDOWN


if __name__ == "__main__":
    sys.exit(main())
