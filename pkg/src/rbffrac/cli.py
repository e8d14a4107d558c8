"""Command line front end for the benchmark experiments.

Every subcommand writes CSV (header row, one row per parameter combination,
rows sorted by case, alpha, epsilon, nbar) to ``--out`` or standard output.

Exit codes: 0 on success, 1 on argument errors or unknown cases, 2 when at
least one system was too ill-conditioned to solve (the row is still written
with ``cond`` filled and ``rms`` empty).
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
import time
from typing import Optional, Sequence

from . import experiments as ex
from . import timestepper as ts
from .errors import ConditioningError
from .geometry import tensor_2d
from .kernel import RbfKernel
from .quadrature import QuadratureSpec
from .reference import CASES, DiffusionCase, get_case

COLUMNS = ["case", "d", "alpha", "epsilon", "nbar", "rms", "cond", "seconds"]

EXIT_OK, EXIT_ARGS, EXIT_COND = 0, 1, 2


class ArgumentError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad input; 2 is reserved for conditioning
    def error(self, message):
        raise ArgumentError(message)


# --------------------------------------------------------------------------- #
# Parsing
# --------------------------------------------------------------------------- #

def _common(p: argparse.ArgumentParser, case_default: Optional[str] = None) -> None:
    p.add_argument("--case", default=case_default, help="registered case name (see list-cases)")
    p.add_argument("--alpha", type=float, nargs="+", help="fractional exponent(s) in (0, 2]")
    p.add_argument("--epsilon", type=float, nargs="+", help="shape parameter(s)")
    p.add_argument("--nbar", type=int, nargs="+", help="1D point count(s)")
    p.add_argument("--n", type=int, nargs="+", help="2D refinement level(s)")
    p.add_argument("--s", type=int, help="bench1d smoothness index")
    p.add_argument("--p", type=float, help="compact case exponent")
    p.add_argument("--points", choices=["uniform", "chebyshev"], default="uniform")
    p.add_argument("--m-points", type=int, help="error-sampling resolution")
    p.add_argument("--quad-tol", type=float, help="relative quadrature tolerance")
    p.add_argument("--out", help="CSV output path (default: stdout)")
    p.add_argument("--config", help="key=value file with defaults; flags win")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="rbffrac", description="Gaussian RBF collocation for the fractional Laplacian")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True
    p = sub.add_parser("operator", help="approximate (-Delta)^{alpha/2} u of a known function")
    _common(p)
    p = sub.add_parser("solve", help="solve the fractional Poisson problem")
    _common(p)
    p = sub.add_parser("sweep", help="error versus shape parameter")
    _common(p)
    p.add_argument("--mode", choices=["operator", "solve"], default="operator")
    p = sub.add_parser("compare-fdm", help="five-point FDM versus RBF for alpha = 2")
    _common(p, "gausssine")
    p = sub.add_parser("diffuse", help="Crank-Nicolson fractional diffusion")
    _common(p, "diffusion")
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--t-end", type=float, default=1.0)
    p.add_argument("--every", type=float, default=0.1, help="output interval in time")
    sub.add_parser("list-cases", help="print the case registry")
    return parser


def read_config(path: str) -> dict:
    """Flat ``key = value`` file; ``#`` starts a comment, list values are whitespace separated."""
    out = {}
    try:
        with open(path) as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ArgumentError(f"cannot read config file: {exc}") from exc
    for num, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ArgumentError(f"{path}:{num}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def _apply_config(args: argparse.Namespace, sub: argparse.ArgumentParser, argv: Sequence[str]) -> None:
    """Fill arguments not given on the command line from the config file."""
    cfg = read_config(args.config)
    given = {a.split("=", 1)[0].lstrip("-").replace("-", "_") for a in argv if a.startswith("--")}
    actions = {a.dest: a for a in sub._actions}
    for key, raw in cfg.items():
        if key not in actions or key in ("config", "help"):
            raise ArgumentError(f"unknown config key {key!r}")
        if key in given:
            continue
        act = actions[key]
        conv = act.type or str
        try:
            if act.nargs == "+":
                value = [conv(v) for v in raw.replace(",", " ").split()]
            else:
                value = conv(raw)
        except ValueError as exc:
            raise ArgumentError(f"bad value for {key}: {raw!r}") from exc
        if act.choices and value not in act.choices:
            raise ArgumentError(f"bad value for {key}: {raw!r}")
        setattr(args, key, value)


def _subparser(parser: argparse.ArgumentParser, name: str) -> argparse.ArgumentParser:
    for act in parser._actions:
        if isinstance(act, argparse._SubParsersAction):
            return act.choices[name]
    raise KeyError(name)


# --------------------------------------------------------------------------- #
# Output
# --------------------------------------------------------------------------- #

def _fmt(key: str, value) -> str:
    if value is None:
        return ""
    if key in ("rms", "cond", "seconds"):
        return f"{value:.5e}"
    if isinstance(value, float):
        return f"{value:g}"
    return str(value)


def _sort_key(row: dict):
    return (row["case"], row.get("method", ""), row["alpha"], row["epsilon"], row["nbar"], row.get("t", 0.0))


def write_csv(rows: list, columns: list, out: Optional[str]) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in sorted(rows, key=_sort_key):
        w.writerow([_fmt(c, row.get(c)) for c in columns])
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())


# --------------------------------------------------------------------------- #
# Commands
# --------------------------------------------------------------------------- #

def _case(args):
    if not args.case:
        raise ArgumentError("--case is required")
    params = {}
    if args.p is not None:
        params["p"] = args.p
    if args.s is not None:
        params["s"] = args.s
    try:
        return get_case(args.case, **params)
    except KeyError:
        raise ArgumentError(f"unknown case {args.case!r}; available: {', '.join(sorted(CASES))}")


def _require(args, *names):
    for name in names:
        if not getattr(args, name):
            raise ArgumentError(f"--{name.replace('_', '-')} is required")


def _quad(args) -> QuadratureSpec:
    if args.quad_tol is None:
        return QuadratureSpec()
    if not args.quad_tol > 0:
        raise ArgumentError("--quad-tol must be positive")
    return QuadratureSpec(rel_tol=args.quad_tol)


def _clouds(case, args):
    sizes = args.nbar if case.dim == 1 else args.n
    if not sizes:
        raise ArgumentError(f"case {case.name} needs --{'nbar' if case.dim == 1 else 'n'}")
    out = []
    for size in sizes:
        kw = {"nbar": size} if case.dim == 1 else {"n": size}
        out.append(ex.case_cloud(case, points=args.points, **kw))
    return out


def _grid_rows(args, mode: str) -> list:
    case = _case(args)
    if isinstance(case, DiffusionCase):
        raise ArgumentError("the diffusion case is only available through 'diffuse'")
    _require(args, "alpha", "epsilon")
    for a in args.alpha:
        case.check_alpha(a)
    quad = _quad(args)
    runner = ex.run_operator if mode == "operator" else ex.run_solve
    rows = []
    for cloud in _clouds(case, args):
        for a in args.alpha:
            for e in args.epsilon:
                rows.append(runner(case, a, e, cloud, args.m_points, quad))
    return rows


def cmd_compare_fdm(args) -> list:
    case = _case(args)
    if case.dim != 2 or case.exact_lu is None:
        raise ArgumentError("compare-fdm needs a 2D case with a known Laplacian")
    if args.alpha and any(a != 2 for a in args.alpha):
        raise ArgumentError("compare-fdm is defined for alpha = 2 only")
    _require(args, "n")
    eps = args.epsilon or [1.0]
    rows = []
    for n in args.n:
        if n < 3:
            raise ArgumentError("compare-fdm needs grids with at least 3 points per side")
        for e in eps:
            rows.extend(ex.run_compare_fdm(n, e, args.m_points, case))
    return rows


def cmd_diffuse(args) -> list:
    case = _case(args)
    if not isinstance(case, DiffusionCase):
        raise ArgumentError("diffuse needs a time-dependent case (diffusion)")
    _require(args, "alpha", "epsilon", "n")
    if not args.dt > 0 or not args.t_end >= 0 or not args.every > 0:
        raise ArgumentError("--dt and --every must be positive and --t-end nonnegative")
    for a in args.alpha:
        case.check_alpha(a)
    quad = _quad(args)
    X = ex.sample_points(case.domain, args.m_points)
    rows = []
    for n in args.n:
        cloud = tensor_2d(n, case.domain.lo, case.domain.hi)
        for a in args.alpha:
            for e in args.epsilon:
                t0 = time.perf_counter()
                base = {"case": case.name, "d": 2, "alpha": a, "epsilon": e, "nbar": cloud.nbar}
                try:
                    setup = ts.build_setup(case, RbfKernel(e, 2, a), cloud, args.dt, args.t_end, quad)
                except ConditioningError as exc:
                    rows.append(dict(base, t=0.0, rms=None, cond=exc.cond_estimate,
                                     seconds=time.perf_counter() - t0))
                    continue
                for rec in ts.run(setup, X, args.every):
                    rows.append(dict(base, t=rec["t"], rms=rec["rms"], cond=rec["cond"],
                                     seconds=time.perf_counter() - t0))
    return rows


def cmd_list_cases(out: Optional[str]) -> None:
    lines = []
    for name in sorted(CASES):
        case = CASES[name]()
        lines.append(f"{name}\t{case.dim}D\t{type(case.domain).__name__}")
    text = "\n".join(lines) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "list-cases":
            cmd_list_cases(None)
            return EXIT_OK
        if args.config:
            _apply_config(args, _subparser(parser, args.command), argv)
        if args.command in ("operator", "solve"):
            rows = _grid_rows(args, args.command)
            columns = COLUMNS
        elif args.command == "sweep":
            _require(args, "epsilon")
            rows = _grid_rows(args, args.mode)
            columns = COLUMNS
        elif args.command == "compare-fdm":
            rows = cmd_compare_fdm(args)
            columns = COLUMNS + ["method"]
        else:
            rows = cmd_diffuse(args)
            columns = COLUMNS[:5] + ["t"] + COLUMNS[5:]
    except (ArgumentError, ValueError) as exc:
        print(f"rbffrac: error: {exc}", file=sys.stderr)
        return EXIT_ARGS
    write_csv(rows, columns, args.out)
    if any(r.get("rms") is None and r.get("method") != "fdm" for r in rows):
        print("rbffrac: warning: conditioning failure in at least one run", file=sys.stderr)
        return EXIT_COND
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
