"""Command-line front end.

Two subcommands share the problem flags:

* ``solve`` runs a single configured solver;
* ``compare`` runs several (repeated ``--run method,m,k``) side by side.

Both write the per-cycle history as CSV (``--out``), optionally a
gnuplot-ready data file (``--plot-data``) and a rendered convergence figure
(``--plot``).  Exit codes: 0 when every run converged, 2 when some run hit
its cycle cap, 1 on usage or parse errors.
"""

from __future__ import annotations

import argparse
import sys
import warnings

from . import oracle
from .problems import EXAMPLE_IDS, MatrixMarketError, ProblemSpec
from .report import RunSpec, export_history, export_plot_data, run_solvers

__all__ = ["main"]


class _Parser(argparse.ArgumentParser):
    """argparse parser that exits with status 1 on usage errors."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _index_arg(value):
    if value == "auto":
        return "auto"
    try:
        return int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"index must be an integer or 'auto', got {value!r}") from None


def _run_arg(value):
    parts = value.split(",")
    if len(parts) not in (2, 3):
        raise argparse.ArgumentTypeError(
            f"expected method,m[,k], got {value!r}")
    method = parts[0].strip()
    try:
        m = int(parts[1])
        k = int(parts[2]) if len(parts) == 3 else 0
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected integer m and k in {value!r}") from None
    try:
        return RunSpec(method=method, m=m, k=k)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _add_problem_args(parser):
    src = parser.add_mutually_exclusive_group(required=True)
    src.add_argument("--matrix", metavar="MM_FILE",
                     help="system matrix in Matrix Market format")
    src.add_argument("--example", choices=EXAMPLE_IDS,
                     help="built-in singular test system")
    rhs = parser.add_mutually_exclusive_group()
    rhs.add_argument("--rhs", metavar="FILE",
                     help="right-hand side vector file (Matrix Market array or plain text)")
    rhs.add_argument("--ones", action="store_true",
                     help="use the all-ones right-hand side (default for --matrix)")
    parser.add_argument("--x0", metavar="FILE", default=None,
                        help="start vector file (default: zero)")
    parser.add_argument("--index", type=_index_arg, default="auto",
                        help="index of the matrix, or 'auto' to resolve it by "
                             "rank stabilization (default: auto)")
    parser.add_argument("--eps", type=float, default=1e-12,
                        help="relative seminorm stopping tolerance (default 1e-12)")
    parser.add_argument("--max-cycles", type=int, default=10000,
                        help="restart-cycle cap per solver (default 10000)")
    parser.add_argument("--out", metavar="CSV", default=None,
                        help="write the per-cycle history as CSV")
    parser.add_argument("--oracle-check", action="store_true",
                        help="cross-check solutions and index against the dense "
                             "Drazin oracle")
    parser.add_argument("--plot-data", metavar="FILE", default=None,
                        help="write gnuplot-ready two-column convergence data")
    parser.add_argument("--plot", metavar="IMAGE", default=None,
                        help="render the convergence curves to an image file")
    parser.add_argument("--similarity-seed", type=int, default=None,
                        help="apply a reproducible orthogonal similarity to the "
                             "matrix (robustness experiments)")


def _build_parser():
    parser = _Parser(prog="drazin",
                     description="Drazin-inverse solutions of singular linear "
                                 "systems via restarted and eigenvector-augmented "
                                 "DGMRES.")
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="run a single solver")
    _add_problem_args(solve)
    solve.add_argument("--method", choices=("dgmres", "adgmres"), required=True)
    solve.add_argument("-m", type=int, required=True, metavar="M",
                       help="restart subspace depth")
    solve.add_argument("-k", type=int, default=0, metavar="K",
                       help="number of augmented Ritz vectors (adgmres)")

    compare = sub.add_parser("compare", help="run several solvers side by side")
    _add_problem_args(compare)
    compare.add_argument("--run", dest="runs", action="append", type=_run_arg,
                         required=True, metavar="METHOD,M[,K]",
                         help="solver configuration; repeatable")
    return parser


def _problem_from_args(args):
    return ProblemSpec(example=args.example, matrix_path=args.matrix,
                       rhs_path=args.rhs, index_a=args.index,
                       x0_path=args.x0, similarity_seed=args.similarity_seed)


def _print_summary(report, resolved, args):
    if resolved.index_auto:
        print(f"index: {report.index_a} (auto, by rank stabilization)")
    else:
        print(f"index: {report.index_a} (given)")
        if args.oracle_check:
            detected = oracle.index_of(resolved.A)
            if detected != report.index_a:
                print(f"warning: oracle computes index {detected}, "
                      f"solver was configured with {report.index_a}", file=sys.stderr)
    print(f"problem size: {report.size}, eps: {report.eps:g}")
    for out in report.outcomes:
        rec = out.history.records[-1]
        status = "converged" if out.history.converged else "not converged"
        line = (f"{out.label}: {status} after {rec.cycle} cycles, "
                f"relative seminorm {rec.relative_seminorm:.6e}")
        if out.stagnated:
            line += ", stagnated"
        if args.oracle_check and out.oracle_error is not None:
            line += f", oracle error {out.oracle_error:.6e}"
        print(line)


def _execute(args, runs):
    problem = _problem_from_args(args)
    resolved = problem.resolve()
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        report = run_solvers(resolved.A, resolved.b, resolved.index_a, runs,
                             eps=args.eps, max_cycles=args.max_cycles,
                             x0=resolved.x0)
    for w in caught:
        print(f"drazin: warning: {w.message}", file=sys.stderr)
    # RunReport does not carry index_auto; report it from the resolution
    _print_summary(report, resolved, args)
    if args.out:
        export_history(report, args.out)
        print(f"history written to {args.out}")
    if args.plot_data:
        export_plot_data(report, args.plot_data)
        print(f"plot data written to {args.plot_data}")
    if args.plot:
        from .plots import render_convergence
        render_convergence(report, args.plot)
        print(f"figure written to {args.plot}")
    return 0 if all(out.history.converged for out in report.outcomes) else 2


def main(argv=None):
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command == "solve":
            runs = [RunSpec(method=args.method, m=args.m, k=args.k)]
        else:
            runs = list(args.runs)
        return _execute(args, runs)
    except (MatrixMarketError, OSError, ValueError) as exc:
        print(f"drazin: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
