"""Brute-force ground truth: dense-lattice extrema and exhaustive TSP tours.

Nothing here shares code with the colony search; the oracle must stay an
independent check of it.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import List, NamedTuple, Sequence, Tuple

import numpy as np

from .errors import OracleRefusal
from .objective import ObjectiveFunction, Sense

__all__ = ["OracleConfig", "OracleExtremum", "grid_extrema", "tsp_brute", "tour_length", "MAX_BRUTE_CITIES"]

MAX_BRUTE_CITIES = 11


@dataclass(frozen=True)
class OracleConfig:
    """``resolution[k]`` samples per dimension, boundaries included.

    Adjacent extrema must be at least three samples apart to be resolved.
    ``refine_steps`` bracket-halving iterations polish 1-D interior hits.
    """

    resolution: Tuple[int, ...]
    refine_steps: int = 0

    def __post_init__(self):
        res = tuple(int(r) for r in np.atleast_1d(self.resolution))
        if any(r < 3 for r in res):
            raise ValueError(f"resolution must be >= 3 in every dimension, got {res}")
        if self.refine_steps < 0:
            raise ValueError("refine_steps must be non-negative")
        object.__setattr__(self, "resolution", res)


class OracleExtremum(NamedTuple):
    point: Tuple[float, ...]
    value: float


def _strict_local_minima(v: np.ndarray) -> np.ndarray:
    """Mask of entries strictly below every existing neighbor (all 3^d - 1 offsets)."""
    d = v.ndim
    padded = np.pad(v, 1, mode="constant", constant_values=np.inf)
    core = tuple(slice(1, -1) for _ in range(d))
    mask = np.ones(v.shape, dtype=bool)
    for off in itertools.product((-1, 0, 1), repeat=d):
        if not any(off):
            continue
        shifted = padded[tuple(slice(1 + o, padded.shape[k] - 1 + o) for k, o in enumerate(off))]
        mask &= padded[core] < shifted
    return mask


def _refine_1d(f: ObjectiveFunction, sign: float, a: float, b: float, c: float, steps: int) -> float:
    g = lambda x: sign * f(x)
    fa, fb, fc = g(a), g(b), g(c)
    for _ in range(steps):
        m1, m2 = 0.5 * (a + b), 0.5 * (b + c)
        f1, f2 = g(m1), g(m2)
        xs = (a, m1, b, m2, c)
        fs = (fa, f1, fb, f2, fc)
        j = min((1, 2, 3), key=lambda i: fs[i])
        a, b, c = xs[j - 1], xs[j], xs[j + 1]
        fa, fb, fc = fs[j - 1], fs[j], fs[j + 1]
        if c - a <= 4 * np.finfo(float).eps * max(1.0, abs(b)):
            break
    return b


def grid_extrema(f: ObjectiveFunction, sense: Sense, cfg: OracleConfig) -> List[OracleExtremum]:
    """Every lattice sample strictly better than all its neighbors, sorted by point."""
    dom = f.domain
    if len(cfg.resolution) != dom.dim:
        raise ValueError(f"need {dom.dim} resolutions, got {len(cfg.resolution)}")
    axes = [np.linspace(lo, hi, r) for lo, hi, r in zip(dom.lower, dom.upper, cfg.resolution)]
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([m.ravel() for m in mesh], axis=1)
    v = (sense.sign * f.evaluate(pts)).reshape(cfg.resolution)
    hits = np.argwhere(_strict_local_minima(v))
    out = []
    for idx in hits:
        point = [axes[k][i] for k, i in enumerate(idx)]
        interior = all(0 < i < r - 1 for i, r in zip(idx, cfg.resolution))
        if dom.dim == 1 and cfg.refine_steps > 0 and interior:
            i = idx[0]
            point = [_refine_1d(f, sense.sign, axes[0][i - 1], axes[0][i], axes[0][i + 1], cfg.refine_steps)]
        point = tuple(float(c) for c in point)
        out.append(OracleExtremum(point, f(point)))
    out.sort(key=lambda e: e.point)
    return out


def tour_length(distances, tour: Sequence[int]) -> float:
    d = np.asarray(distances, dtype=float)
    return float(sum(d[tour[k], tour[(k + 1) % len(tour)]] for k in range(len(tour))))


def tsp_brute(distances) -> Tuple[Tuple[int, ...], float]:
    """Exact shortest closed tour by enumerating permutations with city 0 fixed."""
    d = np.asarray(distances, dtype=float)
    n = d.shape[0]
    if d.ndim != 2 or d.shape != (n, n):
        raise ValueError("distance matrix must be square")
    if not np.allclose(d, d.T):
        raise ValueError("distance matrix must be symmetric")
    if n > MAX_BRUTE_CITIES:
        raise OracleRefusal(f"refusing exhaustive search over {n} cities (limit {MAX_BRUTE_CITIES})")
    if n <= 3:
        tour = tuple(range(n))
        return tour, tour_length(d, tour)
    best, best_len = None, np.inf
    for perm in itertools.permutations(range(1, n)):
        if perm[0] > perm[-1]:
            continue  # mirror image of a tour already seen
        length = d[0, perm[0]] + d[perm[-1], 0]
        for a, b in zip(perm, perm[1:]):
            length += d[a, b]
        if length < best_len:
            best, best_len = (0,) + perm, length
    return best, float(best_len)
