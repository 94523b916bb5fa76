"""``willmore`` command line: ``run``, ``eoc`` and ``compare`` subcommands.

Exit status is 0 on success, 1 on a numerical failure and 2 on a usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import harness
from .linsolve import SolverError
from .shapes import SHAPE_IDS

EXIT_OK, EXIT_NUMERICAL, EXIT_USAGE = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_run_flags(p: argparse.ArgumentParser, *, method_required: bool) -> None:
    p.add_argument("--method", choices=harness.METHODS, required=method_required)
    p.add_argument("--preset", default="circle", help=f"one of: {', '.join(SHAPE_IDS)}")
    p.add_argument("--h", type=float, help="level-set grid spacing")
    p.add_argument("--tau", type=float, help="time step")
    p.add_argument("--T", type=float, help="final time")
    p.add_argument("--omega", type=float, help="tangential redistribution parameter")
    p.add_argument("--epsilon", type=float, help="gradient regularization")
    p.add_argument("--redist", type=float, help="redistancing period")
    p.add_argument("--scheme", choices=("semi-implicit", "explicit"))
    p.add_argument("--solver", choices=("gauss-seidel", "direct", "lu", "gmres-ilut"))
    p.add_argument("--out", type=Path, help="output directory")
    p.add_argument("--save-every", type=int, default=None, help="save stride in steps")
    p.add_argument("--plot-data", action="store_true", help="also write two-column gnuplot files")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="willmore", description="Willmore flow of closed planar curves.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = sub.add_parser("run", help="run one experiment")
    _add_run_flags(run, method_required=True)
    run.add_argument("--n", type=int, help="nodes (lagrangian) or volumes per direction (level set)")

    eoc = sub.add_parser("eoc", help="convergence study on the circle benchmark")
    eoc.add_argument("--method", choices=harness.METHODS, required=True)
    eoc.add_argument("--n", type=int, nargs="+", default=[10, 20, 40, 80], help="grid levels")
    eoc.add_argument("--T", type=float)
    eoc.add_argument("--norm", choices=harness.LAGRANGIAN_NORMS + ("normalized",))
    eoc.add_argument("--rule", choices=("grid", "nominal"), default="grid",
                     help="spacing used in the level-set parameter rules")
    eoc.add_argument("--solver", choices=("lu", "gmres-ilut"))
    eoc.add_argument("--out", type=Path)
    eoc.add_argument("--plot-data", action="store_true")

    cmp_ = sub.add_parser("compare", help="Lagrangian versus level-set zero set")
    _add_run_flags(cmp_, method_required=False)
    cmp_.add_argument("--n", type=int, help="Lagrangian node count")
    cmp_.add_argument("--runs", nargs=2, type=Path, metavar=("LAGRANGIAN_DIR", "LEVELSET_DIR"),
                      help="compare two saved runs instead of computing them")
    cmp_.add_argument("--times", type=float, nargs="+", help="times to compare (default: all common)")
    return parser


def _spec_overrides(args, method: str) -> dict:
    keys = ("tau", "T", "omega", "epsilon", "redist", "scheme", "solver")
    out = {k: getattr(args, k) for k in keys}
    out["save_every"] = args.save_every
    if method == "levelset":
        out["n"], out["h"] = args.n, args.h
        out.pop("omega")
    else:
        out["n"] = args.n
        for k in ("epsilon", "redist", "scheme"):
            out.pop(k)
    return out


def _cmd_run(args) -> int:
    spec = harness.ExperimentSpec.from_preset(args.method, args.preset, out=args.out,
                                              **_spec_overrides(args, args.method))
    result = harness.run_experiment(spec, plot_data=args.plot_data)
    s = result.summary
    print(f"{spec.method} {spec.preset}: t={s['final_time']:g} energy={s['final_energy']:.6g} "
          f"length={s['final_length']:.6g} wall={s['wall_time']:.2f}s")
    if args.out is not None:
        print(f"wrote {args.out}")
    return EXIT_OK


def _cmd_eoc(args) -> int:
    kwargs = {}
    if args.method == "levelset":
        kwargs["rule"] = args.rule
        if args.solver:
            kwargs["solver"] = args.solver
    elif args.solver:
        raise harness.HarnessError("--solver applies to level-set studies only")
    report = harness.run_eoc(args.method, args.n, T=args.T, norm=args.norm, **kwargs)
    print(report.format_table())
    if args.out is not None:
        args.out.mkdir(parents=True, exist_ok=True)
        (args.out / "eoc.json").write_text(json.dumps(report.to_dict(), indent=2), encoding="utf-8")
        if args.plot_data:
            with open(args.out / "eoc.dat", "w", encoding="utf-8") as fh:
                for h, l2, li in report.rows:
                    fh.write(f"{h:.10g} {l2:.10g} {li:.10g}\n")
    if report.failure:
        print(f"aborted: {report.failure}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


def _cmd_compare(args) -> int:
    if args.runs:
        lag_dir, ls_dir = args.runs
    else:
        if args.tau is not None:
            raise harness.HarnessError("--tau is per method; use 'run' twice and 'compare --runs'")
        base = args.out or Path("willmore-compare") / args.preset
        lag_dir, ls_dir = base / "lagrangian", base / "levelset"
        lag_solver = args.solver if args.solver in ("gauss-seidel", "direct") else None
        ls_solver = args.solver if args.solver in ("lu", "gmres-ilut") else None
        specs = [
            harness.ExperimentSpec.from_preset(
                "lagrangian", args.preset, out=lag_dir, n=args.n, omega=args.omega, T=args.T,
                save_every=args.save_every, solver=lag_solver),
            harness.ExperimentSpec.from_preset(
                "levelset", args.preset, out=ls_dir, h=args.h, epsilon=args.epsilon, redist=args.redist,
                scheme=args.scheme, T=args.T, save_every=args.save_every, solver=ls_solver),
        ]
        for spec in specs:
            harness.run_experiment(spec, plot_data=args.plot_data)
    report = harness.compare_methods(lag_dir, ls_dir, args.times, out=args.out, plot_data=args.plot_data)
    print(f"{'t':>10} {'hausdorff':>12} {'mean':>12} {'H/h':>7}")
    for row in report["times"]:
        print(f"{row['t']:>10.5g} {row['hausdorff']:>12.5g} {row['mean_distance']:>12.5g} "
              f"{row['hausdorff_over_h']:>7.3f}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handler = {"run": _cmd_run, "eoc": _cmd_eoc, "compare": _cmd_compare}[args.command]
    try:
        return handler(args)
    except harness.HarnessError as exc:
        print(f"willmore: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (harness.NumericalFailure, SolverError) as exc:
        print(f"willmore: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
