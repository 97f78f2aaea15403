"""Partition, colonize, prune and subdivide until cells are smaller than epsilon."""

from __future__ import annotations

import itertools
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator, List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np

from .colony import AcoParams, ColonyState, init_colony, run_to_quiescence
from .lattice import Grid, NeighborScheme, partition, subdivide
from .objective import ObjectiveFunction, Sense

__all__ = [
    "BOTH",
    "SearchConfig",
    "ExtremumResult",
    "RunReport",
    "RoundInfo",
    "ErrorRatio",
    "search",
    "iter_rounds",
    "boundary_extrema",
    "dedup",
    "error_ratio",
    "expected_outer_iterations",
]

BOTH = "both"
_SENSE_CODE = {Sense.MINIMIZE: 0, Sense.MAXIMIZE: 1}


@dataclass(frozen=True)
class SearchConfig:
    """Parameters of one extremum search.

    ``sense`` is a :class:`Sense` or :data:`BOTH`, which runs a minimizing
    and a maximizing pass and merges the labelled results. ``dedup_tol``
    defaults to twice the final cell size per dimension. ``workers`` > 1
    runs the child grids of a round on a thread pool; results do not depend
    on it.
    """

    n: Tuple[int, ...]
    n1: Tuple[int, ...]
    epsilon: float = 1e-4
    aco: AcoParams = field(default_factory=AcoParams)
    sense: Union[Sense, str] = Sense.MAXIMIZE
    neighbor_scheme: NeighborScheme = NeighborScheme.FULL
    seed: int = 0
    check_boundary: bool = False
    dedup_tol: Optional[Tuple[float, ...]] = None
    workers: int = 1

    def __post_init__(self):
        n = tuple(int(v) for v in np.atleast_1d(self.n))
        n1 = tuple(int(v) for v in np.atleast_1d(self.n1))
        if not n or any(v < 1 for v in n):
            raise ValueError(f"n must hold positive integers, got {n}")
        if len(n1) != len(n) or any(v < 2 for v in n1):
            raise ValueError(f"n1 must hold one integer >= 2 per dimension, got {n1}")
        if not self.epsilon > 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        if self.sense != BOTH and not isinstance(self.sense, Sense):
            raise ValueError(f"sense must be a Sense or {BOTH!r}, got {self.sense!r}")
        if self.dedup_tol is not None:
            tol = tuple(float(v) for v in np.atleast_1d(self.dedup_tol))
            if len(tol) != len(n) or any(not v > 0 for v in tol):
                raise ValueError(f"dedup_tol must hold one positive value per dimension, got {tol}")
            object.__setattr__(self, "dedup_tol", tol)
        if int(self.workers) < 1:
            raise ValueError(f"workers must be positive, got {self.workers}")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "n1", n1)

    @property
    def senses(self) -> Tuple[Sense, ...]:
        return (Sense.MINIMIZE, Sense.MAXIMIZE) if self.sense == BOTH else (self.sense,)


@dataclass(frozen=True)
class ExtremumResult:
    point: Tuple[float, ...]
    value: float
    cell_size: Tuple[float, ...]
    on_boundary: bool
    sense: Sense


@dataclass
class RunReport:
    extrema: List[ExtremumResult]
    outer_iterations: int
    inner_steps_total: int
    evaluations: int
    wall_time: float
    caps_hit: int
    config: Optional[SearchConfig] = None
    function: Optional[dict] = None

    def interior(self) -> List[ExtremumResult]:
        return [e for e in self.extrema if not e.on_boundary]

    def boundary(self) -> List[ExtremumResult]:
        return [e for e in self.extrema if e.on_boundary]


@dataclass
class RoundInfo:
    """One round of colonies: every grid of the round and what its colony occupied."""

    index: int
    sense: Sense
    grids: List[Grid]
    colonies: List[ColonyState]

    @property
    def delta(self) -> np.ndarray:
        return np.max([g.delta for g in self.grids], axis=0)

    def occupied(self, k: int) -> np.ndarray:
        return np.flatnonzero(self.colonies[k].occupancy())


class ErrorRatio(NamedTuple):
    value: float
    absolute: bool  # True when the theory value is ~0 and value is |calc - theory|

    def __float__(self):
        return float(self.value)


def expected_outer_iterations(delta0: float, epsilon: float, n1: int) -> int:
    """Number of subdivisions the loop performs for a uniform factor ``n1``."""
    if delta0 <= epsilon:
        return 0
    k = math.ceil(math.log(delta0 / epsilon) / math.log(n1))
    # Guard against log rounding either way.
    while delta0 / n1 ** (k - 1) <= epsilon:
        k -= 1
    while delta0 / n1 ** k > epsilon:
        k += 1
    return k


def _colony_rng(seed: int, sense: Sense, round_index: int, grid_index: int) -> np.random.Generator:
    ss = np.random.SeedSequence(int(seed) % 2 ** 64, spawn_key=(_SENSE_CODE[sense], round_index, grid_index))
    return np.random.default_rng(ss)


def iter_rounds(
    f: ObjectiveFunction,
    cfg: SearchConfig,
    sense: Sense,
    record_history: bool = False,
) -> Iterator[RoundInfo]:
    """Yield every round of the search for one sense, the final one last.

    Round 0 partitions the domain with ``cfg.n``; each later round holds one
    child grid per cell occupied at quiescence in the previous round. The
    last round is the first whose cells are no larger than ``epsilon``.
    """
    if f.dim != len(cfg.n):
        raise ValueError(f"{f.name} is {f.dim}-dimensional but n has {len(cfg.n)} entries")
    grids = [partition(f.domain, cfg.n)]
    workers = int(cfg.workers)
    pool = ThreadPoolExecutor(workers) if workers > 1 else None
    try:
        for round_index in itertools.count():
            def run(item):
                gi, g = item
                state = init_colony(g, f, sense, cfg.aco, cfg.neighbor_scheme, record_history)
                return run_to_quiescence(state, rng=_colony_rng(cfg.seed, sense, round_index, gi))

            items = list(enumerate(grids))
            colonies = list(pool.map(run, items)) if pool else [run(it) for it in items]
            info = RoundInfo(round_index, sense, grids, colonies)
            yield info
            if np.all(info.delta <= cfg.epsilon):
                return
            grids = [
                child
                for g, col in zip(grids, colonies)
                for child in subdivide(g, np.flatnonzero(col.occupancy()), cfg.n1)
            ]
    finally:
        if pool:
            pool.shutdown()


def boundary_extrema(f: ObjectiveFunction, sense: Sense, delta: Sequence[float]) -> Tuple[List[ExtremumResult], int]:
    """Extrema located exactly on the domain boundary.

    Samples every face of the box on a lattice of spacing ``delta`` (corners
    and face edges included) and keeps the samples strictly better than
    every in-domain point ``p + o * delta`` with ``o`` in ``{-1, 0, 1}^d``.
    Returns the results and the number of function evaluations spent.
    """
    dom = f.domain
    lo, hi = np.asarray(dom.lower), np.asarray(dom.upper)
    delta = np.asarray(delta, dtype=float)
    d = dom.dim
    axes = []
    for k in range(d):
        m = max(1, int(round((hi[k] - lo[k]) / delta[k])))
        ax = lo[k] + np.arange(m + 1) * delta[k]
        ax[-1] = hi[k]
        axes.append(np.clip(ax, lo[k], hi[k]))
    faces = []
    for k in range(d):
        for bound in (lo[k], hi[k]):
            grids = [axes[j] if j != k else np.array([bound]) for j in range(d)]
            mesh = np.meshgrid(*grids, indexing="ij")
            faces.append(np.stack([g.ravel() for g in mesh], axis=1))
    pts = np.unique(np.concatenate(faces), axis=0)
    v = sense.sign * f.evaluate(pts)
    evaluations = pts.shape[0]
    better = np.ones(pts.shape[0], dtype=bool)
    scale = np.maximum(np.abs(hi - lo), 1.0) * 1e-12
    for off in NeighborScheme.FULL.offsets(d):
        nb = pts + off * delta
        inside = np.all((nb >= lo - scale) & (nb <= hi + scale), axis=1)
        idx = np.flatnonzero(inside & better)
        if idx.size == 0:
            continue
        vn = sense.sign * f.evaluate(np.clip(nb[idx], lo, hi))
        evaluations += idx.size
        better[idx] &= v[idx] < vn
    results = [
        ExtremumResult(tuple(float(c) for c in pts[i]), float(sense.sign * v[i]), tuple(float(c) for c in delta), True, sense)
        for i in np.flatnonzero(better)
    ]
    return results, evaluations


def _sort_key(r: ExtremumResult):
    return r.point


def dedup(
    results: Sequence[ExtremumResult],
    tol: Sequence[float],
    groups: Optional[Sequence[int]] = None,
) -> List[ExtremumResult]:
    """Collapse results closer than ``tol`` (per component) onto the best of them.

    Candidates are visited best oriented value first. A candidate is dropped
    when a kept representative lies within ``tol`` and is strictly better,
    or sits at the identical point. Exact value ties at distinct points are
    merged only when they come from different groups and neither lies on a
    plateau (a tie with another result of its own group). That merges an
    extremum split across the shared face of two child grids while keeping
    every cell of a flat region. Without ``groups`` all results share one
    group. Output is sorted by point.
    """
    tol = np.asarray(tol, dtype=float)
    if np.any(~(tol > 0)):
        raise ValueError(f"tol must be positive, got {tol.tolist()}")
    if groups is None:
        groups = [0] * len(results)
    if len(groups) != len(results):
        raise ValueError("groups must have one entry per result")
    pts = [np.asarray(r.point) for r in results]

    def near(i, j):
        return results[i].sense is results[j].sense and bool(np.all(np.abs(pts[i] - pts[j]) <= tol))

    plateau = [
        any(j != i and groups[j] == groups[i] and results[j].value == results[i].value and near(i, j)
            for j in range(len(results)))
        for i in range(len(results))
    ]
    order = sorted(range(len(results)), key=lambda i: (results[i].sense.sign * results[i].value, results[i].point))
    kept: List[int] = []
    for i in order:
        r = results[i]
        for j in kept:
            if not near(i, j):
                continue
            q = results[j]
            if (q.sense.sign * q.value < r.sense.sign * r.value or q.point == r.point
                    or (groups[j] != groups[i] and not plateau[i] and not plateau[j])):
                break
        else:
            kept.append(i)
    return sorted((results[i] for i in kept), key=_sort_key)


def error_ratio(theory_value: float, calc_value: float) -> ErrorRatio:
    """Relative error in percent, or the absolute error when the theory value is ~0."""
    if abs(theory_value) > 1e-12:
        return ErrorRatio(abs((calc_value - theory_value) / theory_value) * 100.0, False)
    return ErrorRatio(abs(calc_value - theory_value), True)


def _single_pass(f: ObjectiveFunction, cfg: SearchConfig, sense: Sense):
    steps = caps = evaluations = 0
    last = None
    for info in iter_rounds(f, cfg, sense):
        for g, col in zip(info.grids, info.colonies):
            steps += col.t
            caps += int(col.capped)
            evaluations += g.size
        last = info
    delta = last.delta
    found, groups = [], []
    for k, (g, col) in enumerate(zip(last.grids, last.colonies)):
        for i in last.occupied(k):
            groups.append(k)
            found.append(ExtremumResult(
                tuple(float(c) for c in g.centers[i]),
                float(sense.sign * col.values[i]),
                tuple(float(c) for c in g.delta),
                False,
                sense,
            ))
    if cfg.check_boundary:
        on_boundary, n_eval = boundary_extrema(f, sense, delta)
        found.extend(on_boundary)
        groups.extend([-1] * len(on_boundary))
        evaluations += n_eval
    tol = cfg.dedup_tol if cfg.dedup_tol is not None else tuple(2.0 * delta)
    return dedup(found, tol, groups), last.index, steps, evaluations, caps


def search(f: ObjectiveFunction, cfg: SearchConfig) -> RunReport:
    """Locate the local extrema of ``f`` on its domain."""
    start = time.perf_counter()
    extrema: List[ExtremumResult] = []
    outer = steps = evaluations = caps = 0
    for sense in cfg.senses:
        found, o, s, e, c = _single_pass(f, cfg, sense)
        extrema.extend(found)
        outer = max(outer, o)
        steps += s
        evaluations += e
        caps += c
    extrema.sort(key=lambda r: (r.point, _SENSE_CODE[r.sense]))
    return RunReport(
        extrema=extrema,
        outer_iterations=outer,
        inner_steps_total=steps,
        evaluations=evaluations,
        wall_time=time.perf_counter() - start,
        caps_hit=caps,
        config=cfg,
        function=describe_function(f),
    )


def describe_function(f: ObjectiveFunction) -> dict:
    return {
        "name": f.name,
        "expr": f.source,
        "lower": list(f.domain.lower),
        "upper": list(f.domain.upper),
    }
