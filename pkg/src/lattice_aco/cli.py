"""Command-line entry point: ``lattice-aco {extrema,verify,tsp}``.

Exit status: 0 on success, 2 on usage errors, 1 on runtime errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import List, Optional, Sequence

import numpy as np

from . import __version__
from .colony import AcoParams
from .errors import LatticeAcoError
from .expr import parse_objective
from .lattice import NeighborScheme
from .objective import BoxDomain, Sense, builtin, builtin_names
from .oracle import OracleConfig, grid_extrema, tsp_brute
from .report import dumps_json, emit_plot_data, extrema_csv, report_to_dict, write_report
from .search import BOTH, SearchConfig, error_ratio, search
from .tsp import CityGraph, TspParams, read_cities_csv, solve_tsp

THREADS_ENV = "LATTICE_ACO_THREADS"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """Raises instead of exiting so run_cli controls the error stream and status."""

    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _int_list(minimum: int):
    def convert(text) -> List[int]:
        try:
            values = [int(v) for v in str(text).replace(" ", "").split(",")]
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
        if any(v < minimum for v in values):
            raise argparse.ArgumentTypeError(f"every value must be >= {minimum}, got {text!r}")
        return values
    return convert


def _positive_float(text) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None
    if not (v > 0 and np.isfinite(v)):
        raise argparse.ArgumentTypeError(f"expected a positive finite number, got {text!r}")
    return v


def _domain(text) -> BoxDomain:
    try:
        pairs = [[float(v) for v in part.split(",")] for part in str(text).split(";") if part.strip()]
        if not pairs or any(len(p) != 2 for p in pairs):
            raise ValueError
        return BoxDomain([p[0] for p in pairs], [p[1] for p in pairs])
    except ValueError as exc:
        raise argparse.ArgumentTypeError(
            f"expected 'lo,hi' per dimension separated by ';', got {text!r}"
            + (f" ({exc})" if str(exc) else "")
        ) from None


_EPILOG = """\
expressions: + - * / ^, unary minus, sin cos exp sqrt abs log, constants pi e.
Variables are x (1-D) or x1..xd. '^' binds tighter than unary minus, so
-x^2 means -(x^2). Pass negative domains with '=', e.g. --domain=-1,1;-1,1.
"""


def _add_function_args(p: argparse.ArgumentParser):
    src = p.add_argument_group("function")
    src.add_argument("--builtin", choices=builtin_names(), help="one of the built-in test functions")
    src.add_argument("--expr", help="expression text, e.g. 'sin(x)^2'")
    src.add_argument("--domain", type=_domain, help="box for --expr: 'lo,hi' per dimension, ';'-separated")


def _add_search_args(p: argparse.ArgumentParser):
    s = p.add_argument_group("search")
    s.add_argument("--n", type=_int_list(1), help="initial cells per dimension (one value is broadcast)")
    s.add_argument("--n1", type=_int_list(2), help="subdivision factor per dimension")
    s.add_argument("--epsilon", type=_positive_float, default=1e-4, help="stop once cells are this small (default 1e-4)")
    s.add_argument("--alpha", type=float, default=1.0)
    s.add_argument("--beta", type=float, default=1.0)
    s.add_argument("--rho", type=float, default=0.3, help="evaporation rate in [0, 1)")
    s.add_argument("--c1", type=_positive_float, default=1.0, help="deposit coefficient")
    s.add_argument("--tau0", type=_positive_float, default=10.0, help="initial pheromone")
    s.add_argument("--max-inner-iters", type=int, default=None, help="colony step cap (default 10 x cells)")
    s.add_argument("--sense", choices=["min", "max", BOTH], default="max")
    s.add_argument("--scheme", choices=[m.value for m in NeighborScheme], default="full",
                   help="neighborhood for d >= 2")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--check-boundary", action="store_true", help="also test the domain boundary directly")
    s.add_argument("--dedup-tol", type=str, default=None, help="merge radius per dimension (default 2 x final cell)")


def _add_output_args(p: argparse.ArgumentParser):
    o = p.add_argument_group("output")
    o.add_argument("--out", help="report path (default: JSON on stdout)")
    o.add_argument("--format", choices=["json", "csv"], default=None, help="default: from --out suffix, else json")
    o.add_argument("--plot-dir", help="write curve.csv and extrema.csv here (1-D and 2-D only)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="lattice-aco",
        description="Find all local extrema of a box-bounded function with a lattice ant colony.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--config", help="JSON file of option defaults (keys are option names)")
    sub = parser.add_subparsers(dest="command", required=True)

    ex = sub.add_parser("extrema", help="run the extremum search", epilog=_EPILOG,
                        formatter_class=argparse.RawDescriptionHelpFormatter)
    _add_function_args(ex)
    _add_search_args(ex)
    _add_output_args(ex)

    ver = sub.add_parser("verify", help="run the search and compare with the brute-force oracle", epilog=_EPILOG,
                         formatter_class=argparse.RawDescriptionHelpFormatter)
    _add_function_args(ver)
    _add_search_args(ver)
    _add_output_args(ver)
    ver.add_argument("--oracle-resolution", type=_int_list(3), default=None,
                     help="oracle samples per dimension (default 100001 in 1-D, 2001 in 2-D)")
    ver.add_argument("--refine-steps", type=int, default=60, help="1-D oracle refinement iterations")

    tsp = sub.add_parser("tsp", help="classical ant system on a TSP instance")
    cities = tsp.add_mutually_exclusive_group(required=False)
    cities.add_argument("--cities", help="CSV file with one 'x,y' per line")
    cities.add_argument("--random", type=int, metavar="N", help="N uniform random cities in the unit square")
    tsp.add_argument("--instance-seed", type=int, default=0, help="seed for --random cities")
    tsp.add_argument("--ants", type=int, default=None, help="default round(N / 1.5)")
    tsp.add_argument("--q", type=_positive_float, default=1.0)
    tsp.add_argument("--alpha", type=float, default=1.0)
    tsp.add_argument("--beta", type=float, default=2.0)
    tsp.add_argument("--rho", type=float, default=0.5)
    tsp.add_argument("--t-max", type=int, default=100)
    tsp.add_argument("--tau0", type=_positive_float, default=1.0)
    tsp.add_argument("--marker-threshold", type=_positive_float, default=None,
                     help="stop early once |L_t - L_t+1| / L_t falls below this")
    tsp.add_argument("--seed", type=int, default=0)
    tsp.add_argument("--brute", action="store_true", help="also solve exactly (N <= 11)")
    tsp.add_argument("--out", help="JSON result path (default: stdout)")
    return parser


def _config_defaults(path) -> dict:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"--config {path}: {exc}") from None
    if not isinstance(data, dict):
        raise UsageError(f"--config {path}: expected a JSON object")
    out = {}
    for key, value in data.items():
        dest = key.replace("-", "_")
        if isinstance(value, list):
            value = ",".join(str(v) for v in value)
        elif isinstance(value, (int, float)) and not isinstance(value, bool):
            value = str(value)
        out[dest] = value
    return out


def _parse(argv):
    parser = build_parser()
    pre = _Parser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if known.config:
        defaults = _config_defaults(known.config)
        # Subparser defaults must be set on the subparsers themselves; argparse
        # runs string defaults through each option's type converter.
        seen = set()
        for action in parser._subparsers._group_actions:
            for sp in action.choices.values():
                dests = {a.dest for a in sp._actions}
                seen |= dests
                sp.set_defaults(**{k: v for k, v in defaults.items() if k in dests})
        unknown = sorted(set(defaults) - seen)
        if unknown:
            raise UsageError(f"--config: unknown option(s) {', '.join(unknown)}")
    return parser, parser.parse_args(argv)


def _function(args):
    if (args.builtin is None) == (args.expr is None):
        raise UsageError("give exactly one of --builtin or --expr")
    if args.builtin:
        if args.domain is not None:
            raise UsageError("--domain applies to --expr only; built-ins carry their own domain")
        return builtin(args.builtin)
    if args.domain is None:
        raise UsageError("--expr needs --domain")
    try:
        return parse_objective(args.expr, args.domain)
    except LatticeAcoError as exc:
        raise UsageError(f"--expr: {exc}") from None


def _broadcast(flag, values, dim):
    if values is None:
        raise UsageError(f"--{flag} is required")
    if len(values) == 1:
        return tuple(values) * dim
    if len(values) != dim:
        raise UsageError(f"--{flag} needs 1 or {dim} values, got {len(values)}")
    return tuple(values)


def _workers() -> int:
    raw = os.environ.get(THREADS_ENV)
    if not raw:
        return 1
    try:
        n = int(raw)
    except ValueError:
        raise UsageError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None
    if n < 1:
        raise UsageError(f"{THREADS_ENV} must be positive, got {n}")
    return min(n, os.cpu_count() or 1)


def search_config(args, dim: int) -> SearchConfig:
    n = _broadcast("n", args.n, dim)
    n1 = _broadcast("n1", args.n1, dim)
    tol = None
    if args.dedup_tol is not None:
        try:
            tol = _broadcast("dedup-tol", [float(v) for v in str(args.dedup_tol).split(",")], dim)
        except ValueError:
            raise UsageError(f"--dedup-tol: expected comma-separated numbers, got {args.dedup_tol!r}") from None
    try:
        aco = AcoParams(args.alpha, args.beta, args.rho, args.c1, args.tau0, args.max_inner_iters)
        return SearchConfig(
            n=n, n1=n1, epsilon=args.epsilon, aco=aco,
            sense=BOTH if args.sense == BOTH else Sense.parse(args.sense),
            neighbor_scheme=NeighborScheme(args.scheme), seed=args.seed,
            check_boundary=bool(args.check_boundary), dedup_tol=tol, workers=_workers(),
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _emit(report, args, stdout):
    fmt = args.format
    if fmt is None:
        fmt = "csv" if args.out and args.out.lower().endswith(".csv") else "json"
    if args.out:
        write_report(report, fmt, args.out)
    elif fmt == "json":
        stdout.write(dumps_json(report_to_dict(report)) + "\n")
    else:
        stdout.write(extrema_csv(report.extrema, len(report.config.n)))


def _cmd_extrema(args, stdout):
    f = _function(args)
    cfg = search_config(args, f.dim)
    if args.plot_dir and f.dim > 2:
        raise UsageError("--plot-dir supports 1-D and 2-D functions only")
    report = search(f, cfg)
    _emit(report, args, stdout)
    if args.plot_dir:
        emit_plot_data(f, report.extrema, args.plot_dir)
    return report


def _cmd_verify(args, stdout, stderr):
    f = _function(args)
    cfg = search_config(args, f.dim)
    res = args.oracle_resolution
    if res is None:
        res = {1: [100001], 2: [2001]}.get(f.dim, [101])
    res = _broadcast("oracle-resolution", res, f.dim)
    report = search(f, cfg)
    width = 12 + 8 * f.dim
    lines = []
    total = matched = 0
    used = set()
    tol = 2.0 * np.sqrt(np.sum(np.asarray(report.extrema[0].cell_size) ** 2)) if report.extrema else 0.0
    for sense in cfg.senses:
        oracle = grid_extrema(f, sense, OracleConfig(res, args.refine_steps if f.dim == 1 else 0))
        found = [(k, e) for k, e in enumerate(report.extrema) if e.sense is sense]
        lines.append(f"sense={sense.value}: oracle {len(oracle)}, found {len(found)}")
        lines.append(f"{'#':>3}  {'theory point':>{width}}  {'theory f':>20}  {'calc point':>{width}}  {'calc f':>20}  error %")
        for i, o in enumerate(oracle, start=1):
            total += 1
            best = min(found, key=lambda kv: np.linalg.norm(np.subtract(kv[1].point, o.point)), default=None)
            if best is None:
                lines.append(f"{i:>3}  {_pt(o.point):>{width}}  {o.value:>20.14g}  {'(missing)':>{width}}")
                continue
            k, e = best
            dist = float(np.linalg.norm(np.subtract(e.point, o.point)))
            r = error_ratio(o.value, e.value)
            flag = "" if dist <= max(tol, 1e-12) or e.on_boundary else f"  far ({dist:.3g})"
            if not flag:
                matched += 1
                used.add(k)
            unit = " (abs)" if r.absolute else ""
            lines.append(f"{i:>3}  {_pt(o.point):>{width}}  {o.value:>20.14g}  {_pt(e.point):>{width}}  "
                         f"{e.value:>20.14g}  {r.value:.3g}{unit}{flag}")
    extra = len(report.extrema) - len(used)
    lines.append(f"matched {matched}/{total} oracle extrema; {extra} unmatched search results")
    if args.out:
        fmt = args.format or ("csv" if args.out.lower().endswith(".csv") else "json")
        write_report(report, fmt, args.out)
    stdout.write("\n".join(lines) + "\n")
    return report


def _pt(point) -> str:
    return "(" + ", ".join(f"{c:.10f}" for c in point) + ")"


def _cmd_tsp(args, stdout):
    if args.cities:
        try:
            g = read_cities_csv(args.cities)
        except OSError as exc:
            raise UsageError(f"--cities: {exc}") from None
    elif args.random:
        if args.random < 3:
            raise UsageError("--random needs at least 3 cities")
        g = CityGraph.from_coordinates(np.random.default_rng(args.instance_seed).random((args.random, 2)))
    else:
        raise UsageError("give --cities or --random")
    try:
        params = TspParams(args.ants, args.q, args.alpha, args.beta, args.rho, args.t_max, args.tau0,
                           args.marker_threshold)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    result = solve_tsp(g, params, args.seed)
    out = {
        "config": {"n_cities": g.n, "ants": params.ants(g.n), "q": params.q, "alpha": params.alpha,
                   "beta": params.beta, "rho": params.rho, "t_max": params.t_max, "tau0": params.tau0,
                   "marker_threshold": params.marker_threshold, "seed": args.seed},
        "best_tour": list(result.best_tour),
        "best_length": result.best_length,
        "lengths": result.lengths,
    }
    if args.brute:
        tour, length = tsp_brute(g.distances)
        out["brute_tour"] = list(tour)
        out["brute_length"] = length
    text = dumps_json(out) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        stdout.write(text)
    return out


def run_cli(argv: Optional[Sequence[str]] = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        try:
            _, args = _parse(argv)
        except SystemExit as exc:
            return int(exc.code or 0)
        if args.command == "extrema":
            _cmd_extrema(args, stdout)
        elif args.command == "verify":
            _cmd_verify(args, stdout, stderr)
        else:
            _cmd_tsp(args, stdout)
    except UsageError as exc:
        stderr.write(f"lattice-aco: usage error: {exc}\n")
        return 2
    except (LatticeAcoError, ValueError, OSError, ArithmeticError) as exc:
        stderr.write(f"lattice-aco: error: {exc}\n")
        return 1
    return 0


def main():
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
