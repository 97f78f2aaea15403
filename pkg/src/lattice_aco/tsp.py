"""Classical ant system for the symmetric TSP.

Kept separate from the lattice colony on purpose: here pheromone lives on
edges (``tau[i, j]``), there it lives on cells.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

__all__ = [
    "CityGraph",
    "TspParams",
    "TspResult",
    "solve_tsp",
    "transition_row",
    "convergence_marker",
    "marker_stop",
    "read_cities_csv",
]


@dataclass(frozen=True)
class CityGraph:
    distances: np.ndarray
    coordinates: Optional[np.ndarray] = None

    def __post_init__(self):
        d = np.asarray(self.distances, dtype=float)
        n = d.shape[0]
        if d.ndim != 2 or d.shape != (n, n):
            raise ValueError("distance matrix must be square")
        if n < 3:
            raise ValueError(f"need at least 3 cities, got {n}")
        if np.any(d < 0) or not np.array_equal(d, d.T) or np.any(np.diag(d) != 0):
            raise ValueError("distances must be symmetric, non-negative, with a zero diagonal")
        off = ~np.eye(n, dtype=bool)
        if np.any(d[off] == 0):
            i, j = np.argwhere((d == 0) & off)[0]
            raise ValueError(f"cities {i} and {j} coincide; the heuristic 1/d is undefined")
        d.setflags(write=False)
        object.__setattr__(self, "distances", d)

    @classmethod
    def from_coordinates(cls, coords) -> "CityGraph":
        xy = np.asarray(coords, dtype=float)
        if xy.ndim != 2 or xy.shape[1] != 2:
            raise ValueError("coordinates must be a list of (x, y) pairs")
        diff = xy[:, None, :] - xy[None, :, :]
        return cls(np.hypot(diff[..., 0], diff[..., 1]), xy)

    @property
    def n(self) -> int:
        return self.distances.shape[0]


@dataclass(frozen=True)
class TspParams:
    m: Optional[int] = None  # ants; None gives round(N / 1.5)
    q: float = 1.0
    alpha: float = 1.0
    beta: float = 2.0
    rho: float = 0.5
    t_max: int = 100
    tau0: float = 1.0
    marker_threshold: Optional[float] = None

    def __post_init__(self):
        if not 0.0 <= self.rho < 1.0:
            raise ValueError(f"rho must lie in [0, 1), got {self.rho}")
        if self.m is not None and self.m < 1:
            raise ValueError("m must be positive")
        if self.t_max < 1 or not self.q > 0 or not self.tau0 > 0:
            raise ValueError("t_max, q and tau0 must be positive")

    def ants(self, n_cities: int) -> int:
        return self.m if self.m is not None else max(1, round(n_cities / 1.5))


@dataclass
class TspResult:
    best_tour: Tuple[int, ...]
    best_length: float
    lengths: List[float]  # shortest tour of each iteration
    best_so_far: List[float] = field(default_factory=list)
    tau: Optional[np.ndarray] = field(default=None, repr=False)


def transition_row(tau_row, eta_row, unvisited, alpha: float, beta: float) -> np.ndarray:
    """Probabilities of moving from one city to each other city."""
    w = np.where(unvisited, np.asarray(tau_row) ** alpha * np.asarray(eta_row) ** beta, 0.0)
    return w / w.sum()


def _tour_lengths(d: np.ndarray, tours: np.ndarray) -> np.ndarray:
    return d[tours, np.roll(tours, -1, axis=1)].sum(axis=1)


def solve_tsp(g: CityGraph, p: TspParams = TspParams(), rng=None) -> TspResult:
    """Run ``t_max`` iterations (or until the convergence marker drops below threshold)."""
    rng = np.random.default_rng(rng)
    d = g.distances
    n = g.n
    m = p.ants(n)
    eta = np.zeros_like(d)
    off = ~np.eye(n, dtype=bool)
    eta[off] = 1.0 / d[off]
    heur = eta ** p.beta
    tau = np.full((n, n), float(p.tau0))
    np.fill_diagonal(tau, 0.0)

    best_tour, best_len = None, np.inf
    lengths, best_so_far = [], []
    ants = np.arange(m)
    for t in range(p.t_max):
        starts = rng.choice(n, size=m, replace=False) if m <= n else rng.integers(n, size=m)
        tours = np.empty((m, n), dtype=np.int64)
        tours[:, 0] = starts
        visited = np.zeros((m, n), dtype=bool)
        visited[ants, starts] = True
        cur = starts
        for k in range(1, n):
            w = np.where(visited, 0.0, tau[cur] ** p.alpha * heur[cur])
            cum = np.cumsum(w, axis=1)
            thresholds = rng.random(m) * cum[:, -1]
            hit = cum > thresholds[:, None]
            last_open = n - 1 - np.argmax((~visited)[:, ::-1], axis=1)
            nxt = np.where(hit.any(axis=1), np.argmax(hit, axis=1), last_open)
            tours[:, k] = nxt
            visited[ants, nxt] = True
            cur = nxt
        L = _tour_lengths(d, tours)

        delta = np.zeros_like(tau)
        a, b = tours, np.roll(tours, -1, axis=1)
        dep = np.repeat(p.q / L, n)
        # Sequential accumulation in ant-id order keeps the sum reproducible.
        np.add.at(delta, (a.ravel(), b.ravel()), dep)
        np.add.at(delta, (b.ravel(), a.ravel()), dep)
        tau = (1.0 - p.rho) * tau + delta

        k_best = int(np.argmin(L))
        lengths.append(float(L[k_best]))
        if L[k_best] < best_len:
            best_len, best_tour = float(L[k_best]), tuple(int(c) for c in tours[k_best])
        best_so_far.append(best_len)
        if p.marker_threshold is not None and t >= 1:
            if convergence_marker(lengths[-2:])[0] < p.marker_threshold:
                break
    return TspResult(best_tour, best_len, lengths, best_so_far, tau)


def convergence_marker(lengths: Sequence[float]) -> List[float]:
    """Relative change ``|L[t] - L[t+1]| / L[t]`` between consecutive iterations."""
    L = [float(v) for v in lengths]
    if not L or any(not v > 0 for v in L):
        raise ValueError("lengths must be a non-empty sequence of positive numbers")
    return [abs(a - b) / a for a, b in zip(L, L[1:])]


def marker_stop(lengths: Sequence[float], threshold: float) -> Optional[int]:
    """First iteration ``t >= 1`` at which the marker falls below ``threshold``."""
    for t, mk in enumerate(convergence_marker(lengths), start=1):
        if mk < threshold:
            return t
    return None


def read_cities_csv(path) -> CityGraph:
    """Read ``x,y`` per line (an optional non-numeric header line is skipped)."""
    rows = []
    with open(path, newline="") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = [s.strip() for s in line.split(",")]
            try:
                x, y = (float(s) for s in parts)
            except ValueError:
                if not rows and lineno == 1:
                    continue
                raise ValueError(f"{path}:{lineno}: expected 'x,y', got {line!r}") from None
            rows.append((x, y))
    return CityGraph.from_coordinates(rows)
