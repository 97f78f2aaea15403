"""JSON/CSV run reports and plot-data files.

JSON layout, in this key order::

    {
      "config":  {"function": {"name", "expr", "lower", "upper"},
                  "n", "n1", "epsilon", "alpha", "beta", "rho", "c1", "tau0",
                  "max_inner_iters", "sense", "neighbor_scheme", "seed",
                  "check_boundary", "dedup_tol", "workers"},
      "extrema": [{"point", "value", "cell_size", "on_boundary", "sense"}, ...],
      "stats":   {"outer_iterations", "inner_steps_total", "evaluations",
                  "wall_time_s", "caps_hit"}
    }

CSV has one extremum per row under the header ``x1,...,xd,value,on_boundary,sense``.
Every float in either format is written with 17 significant digits, which
round-trips binary64 exactly.
"""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path
from typing import Iterable, List, Sequence

import numpy as np

from .colony import AcoParams
from .lattice import NeighborScheme
from .objective import ObjectiveFunction, Sense
from .search import BOTH, ExtremumResult, RunReport, SearchConfig

__all__ = [
    "format_float",
    "report_to_dict",
    "report_from_dict",
    "dumps_json",
    "write_report",
    "read_report",
    "extrema_csv",
    "emit_plot_data",
]


def format_float(x: float) -> str:
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"cannot serialize non-finite number {x}")
    return format(x, ".17g")


def _sense_text(sense) -> str:
    return BOTH if sense == BOTH else sense.value


def report_to_dict(report: RunReport) -> dict:
    cfg = report.config
    config = {"function": report.function}
    if cfg is not None:
        aco = cfg.aco
        config.update(
            n=list(cfg.n),
            n1=list(cfg.n1),
            epsilon=float(cfg.epsilon),
            alpha=float(aco.alpha),
            beta=float(aco.beta),
            rho=float(aco.rho),
            c1=float(aco.c1),
            tau0=float(aco.tau0),
            max_inner_iters=aco.max_inner_iters,
            sense=_sense_text(cfg.sense),
            neighbor_scheme=cfg.neighbor_scheme.value,
            seed=int(cfg.seed),
            check_boundary=bool(cfg.check_boundary),
            dedup_tol=None if cfg.dedup_tol is None else [float(v) for v in cfg.dedup_tol],
            workers=int(cfg.workers),
        )
    return {
        "config": config,
        "extrema": [
            {
                "point": [float(c) for c in e.point],
                "value": float(e.value),
                "cell_size": [float(c) for c in e.cell_size],
                "on_boundary": bool(e.on_boundary),
                "sense": e.sense.value,
            }
            for e in report.extrema
        ],
        "stats": {
            "outer_iterations": int(report.outer_iterations),
            "inner_steps_total": int(report.inner_steps_total),
            "evaluations": int(report.evaluations),
            "wall_time_s": float(report.wall_time),
            "caps_hit": int(report.caps_hit),
        },
    }


def report_from_dict(data: dict) -> RunReport:
    c = data["config"]
    cfg = None
    if "n" in c:
        sense = BOTH if c["sense"] == BOTH else Sense(c["sense"])
        cfg = SearchConfig(
            n=tuple(c["n"]),
            n1=tuple(c["n1"]),
            epsilon=c["epsilon"],
            aco=AcoParams(c["alpha"], c["beta"], c["rho"], c["c1"], c["tau0"], c["max_inner_iters"]),
            sense=sense,
            neighbor_scheme=NeighborScheme(c["neighbor_scheme"]),
            seed=c["seed"],
            check_boundary=c["check_boundary"],
            dedup_tol=None if c["dedup_tol"] is None else tuple(c["dedup_tol"]),
            workers=c["workers"],
        )
    s = data["stats"]
    return RunReport(
        extrema=[
            ExtremumResult(tuple(e["point"]), e["value"], tuple(e["cell_size"]), e["on_boundary"], Sense(e["sense"]))
            for e in data["extrema"]
        ],
        outer_iterations=s["outer_iterations"],
        inner_steps_total=s["inner_steps_total"],
        evaluations=s["evaluations"],
        wall_time=s["wall_time_s"],
        caps_hit=s["caps_hit"],
        config=cfg,
        function=c.get("function"),
    )


def dumps_json(obj, indent: int = 2, _level: int = 0) -> str:
    """``json.dumps`` work-alike that writes floats with 17 significant digits."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps_json(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float, np.number)) and not isinstance(v, bool) for v in obj):
            return "[" + ", ".join(dumps_json(v) for v in obj) + "]"
        items = [pad + dumps_json(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def extrema_csv(extrema: Sequence[ExtremumResult], dim: int) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([f"x{k}" for k in range(1, dim + 1)] + ["value", "on_boundary", "sense"])
    for e in extrema:
        w.writerow([format_float(c) for c in e.point]
                   + [format_float(e.value), "true" if e.on_boundary else "false", e.sense.value])
    return buf.getvalue()


def _report_dim(report: RunReport) -> int:
    if report.config is not None:
        return len(report.config.n)
    if report.function:
        return len(report.function["lower"])
    if report.extrema:
        return len(report.extrema[0].point)
    raise ValueError("cannot infer the dimension of an empty report without a config")


def write_report(report: RunReport, fmt: str, path) -> Path:
    """Write ``report`` as ``fmt`` (``"json"`` or ``"csv"``) to ``path``."""
    path = Path(path)
    if fmt == "json":
        text = dumps_json(report_to_dict(report)) + "\n"
    elif fmt == "csv":
        text = extrema_csv(report.extrema, _report_dim(report))
    else:
        raise ValueError(f"unknown report format {fmt!r}; use 'json' or 'csv'")
    path.write_text(text)
    return path


def read_report(path) -> RunReport:
    with open(path) as fh:
        return report_from_dict(json.load(fh))


def emit_plot_data(f: ObjectiveFunction, results: Iterable[ExtremumResult], path, samples=None) -> List[Path]:
    """Write ``curve.csv`` (dense samples of ``f``) and ``extrema.csv`` into directory ``path``."""
    dim = f.dim
    if dim > 2:
        raise ValueError(f"plot data is only produced for 1-D and 2-D functions, {f.name} is {dim}-D")
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    if samples is None:
        samples = 2001 if dim == 1 else 201
    axes = [np.linspace(lo, hi, samples) for lo, hi in zip(f.domain.lower, f.domain.upper)]
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([m.ravel() for m in mesh], axis=1)
    vals = f.evaluate(pts)
    header = [f"x{k}" for k in range(1, dim + 1)] + ["f"]
    curve = out / "curve.csv"
    with open(curve, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for p, v in zip(pts, vals):
            w.writerow([format_float(c) for c in p] + [format_float(v)])
    extrema = out / "extrema.csv"
    extrema.write_text(extrema_csv(list(results), dim))
    return [curve, extrema]
