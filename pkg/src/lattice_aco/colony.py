"""One ant colony on one grid: placement, moves, pheromone and quiescence.

Every cell starts with one ant and ``tau0`` pheromone. An ant may move only
to a neighbor whose oriented value is strictly lower than its own cell's; it
picks among those with probability proportional to
``tau[j]**alpha * (v[i] - v[j])**beta``. All ants choose against the same
snapshot, then move, then the field is updated once:
``tau' = (1 - rho) * tau + deposits`` where each move ``i -> j`` deposits
``c1 * (v[i] - v[j])`` on its destination.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Set, Tuple

import numpy as np

from .errors import DomainError, InternalError
from .lattice import CellId, Grid, NeighborScheme
from .objective import ObjectiveFunction, Sense

__all__ = [
    "AcoParams",
    "Ant",
    "ColonyState",
    "init_colony",
    "allowed_moves",
    "transition_probabilities",
    "step",
    "run_to_quiescence",
]


@dataclass(frozen=True)
class AcoParams:
    alpha: float = 1.0
    beta: float = 1.0
    rho: float = 0.3
    c1: float = 1.0
    tau0: float = 10.0
    max_inner_iters: Optional[int] = None  # None: 10 x cell count of each grid

    def __post_init__(self):
        if not 0.0 <= self.rho < 1.0:
            raise ValueError(f"rho must lie in [0, 1), got {self.rho}")
        if not self.tau0 > 0.0:
            raise ValueError(f"tau0 must be positive, got {self.tau0}")
        if not self.c1 > 0.0:
            raise ValueError(f"c1 must be positive, got {self.c1}")
        if self.max_inner_iters is not None and self.max_inner_iters < 1:
            raise ValueError(f"max_inner_iters must be positive, got {self.max_inner_iters}")

    def inner_cap(self, n_cells: int) -> int:
        return self.max_inner_iters if self.max_inner_iters is not None else 10 * n_cells


@dataclass(frozen=True)
class Ant:
    id: int
    cell: CellId


@dataclass
class ColonyState:
    """Colony on ``grid``.

    ``positions[k]`` is the flat cell index of ant ``k``; ``tau`` and
    ``values`` are indexed by flat cell index. ``values`` holds oriented
    function values at the cell centers and is computed once per grid.
    When ``history`` is enabled it collects a ``(positions, tau)`` snapshot
    taken after initialization and after every step.
    """

    grid: Grid
    positions: np.ndarray
    tau: np.ndarray
    values: np.ndarray
    params: AcoParams
    scheme: NeighborScheme = NeighborScheme.FULL
    t: int = 0
    capped: bool = False
    history: Optional[List[Tuple[np.ndarray, np.ndarray]]] = field(default=None, repr=False)

    @property
    def ants(self) -> List[Ant]:
        return [Ant(k, self.grid.cell(p)) for k, p in enumerate(self.positions)]

    @property
    def n_ants(self) -> int:
        return int(self.positions.shape[0])

    def pheromone(self, c: CellId) -> float:
        return float(self.tau[self.grid.flat(c)])

    def value(self, c: CellId) -> float:
        return float(self.values[self.grid.flat(c)])

    def occupancy(self) -> np.ndarray:
        return np.bincount(self.positions, minlength=self.grid.size)

    def occupied(self) -> List[CellId]:
        return [self.grid.cell(i) for i in np.flatnonzero(self.occupancy())]


def init_colony(
    g: Grid,
    f: ObjectiveFunction,
    sense: Sense,
    p: AcoParams,
    scheme: NeighborScheme = NeighborScheme.FULL,
    record_history: bool = False,
) -> ColonyState:
    """One ant per cell, ``tau0`` everywhere, all centers evaluated."""
    centers = g.centers
    values = sense.sign * f.evaluate(centers)
    bad = np.flatnonzero(~np.isfinite(values))
    if bad.size:
        raise DomainError(f"{f.name} is not finite at cell center {centers[bad[0]].tolist()}")
    positions = np.arange(g.size, dtype=np.int64)
    return ColonyState(
        grid=g,
        positions=positions,
        tau=np.full(g.size, float(p.tau0)),
        values=values,
        params=p,
        scheme=scheme,
        history=[(positions.copy(), np.full(g.size, float(p.tau0)))] if record_history else None,
    )


def _allowed_flat(s: ColonyState, cell_flat: int) -> np.ndarray:
    nb = s.grid.neighbor_table(s.scheme)[cell_flat]
    nb = nb[nb >= 0]
    return nb[s.values[nb] < s.values[cell_flat]]


def allowed_moves(s: ColonyState, a: Ant, scheme: Optional[NeighborScheme] = None) -> Set[CellId]:
    """Neighbors of the ant's cell with strictly lower oriented value."""
    if scheme is not None and scheme is not s.scheme:
        s = replace(s, scheme=scheme)
    flat = s.grid.flat(a.cell)
    return {s.grid.cell(j) for j in _allowed_flat(s, flat)}


def transition_probabilities(s: ColonyState, a: Ant, allowed) -> Dict[CellId, float]:
    """Move distribution of ``a`` over ``allowed`` (cells outside it get zero)."""
    i = s.grid.flat(a.cell)
    cells = sorted(allowed, key=s.grid.flat)
    if not cells:
        raise ValueError("allowed set is empty")
    js = np.array([s.grid.flat(c) for c in cells])
    eta = s.values[i] - s.values[js]
    if np.any(eta <= 0):
        raise ValueError("every allowed cell must have a strictly lower value than the ant's cell")
    w = s.tau[js] ** s.params.alpha * eta ** s.params.beta
    total = w.sum()
    if not total > 0:
        raise InternalError(f"transition weights vanish for ant {a.id} at cell {a.cell}")
    return {c: float(wj / total) for c, wj in zip(cells, w)}


def _advance(s: ColonyState, rng: np.random.Generator):
    p = s.params
    table = s.grid.neighbor_table(s.scheme)
    here = s.positions
    nb = table[here]
    valid = nb >= 0
    safe = np.where(valid, nb, 0)
    v_here = s.values[here]
    v_nb = s.values[safe]
    allowed = valid & (v_nb < v_here[:, None])
    movers = np.flatnonzero(allowed.any(axis=1))

    new_positions = here.copy()
    deposits = np.zeros_like(s.tau)
    dest = movers
    if movers.size:
        eta = np.where(allowed[movers], v_here[movers, None] - v_nb[movers], 0.0)
        w = np.where(allowed[movers], s.tau[safe[movers]] ** p.alpha * eta ** p.beta, 0.0)
        cum = np.cumsum(w, axis=1)
        total = cum[:, -1]
        if np.any(~(total > 0)):
            k = movers[np.flatnonzero(~(total > 0))[0]]
            raise InternalError(f"transition weights vanish for ant {k}")
        thresholds = rng.random(movers.size) * total
        hit = cum > thresholds[:, None]
        # A draw that rounds up to the total falls back to the last positive weight.
        last_positive = w.shape[1] - 1 - np.argmax((w > 0)[:, ::-1], axis=1)
        choice = np.where(hit.any(axis=1), np.argmax(hit, axis=1), last_positive)
        dest = safe[movers, choice]
        new_positions[movers] = dest
        # np.add.at accumulates sequentially, i.e. in ascending ant-id order.
        np.add.at(deposits, dest, p.c1 * (v_here[movers] - s.values[dest]))

    tau = (1.0 - p.rho) * s.tau + deposits
    history = None
    if s.history is not None:
        history = s.history + [(new_positions, tau)]
    return movers, dest, replace(s, positions=new_positions, tau=tau, t=s.t + 1, history=history)


def step(s: ColonyState, rng: np.random.Generator) -> Tuple[List[Tuple[int, CellId, CellId]], ColonyState]:
    """Advance the colony by one synchronous move round plus one pheromone update.

    Returns the moves made as ``(ant_id, from_cell, to_cell)`` and the new
    state; ``s`` itself is left untouched. Uniform draws are consumed in
    ascending ant-id order, one per ant that has a move.
    """
    movers, dest, new = _advance(s, rng)
    g = s.grid
    moves = [(int(k), g.cell(int(s.positions[k])), g.cell(int(d))) for k, d in zip(movers, dest)]
    return moves, new


def run_to_quiescence(s: ColonyState, p: Optional[AcoParams] = None, rng=None) -> ColonyState:
    """Step until a full step moves no ant, or until the inner-iteration cap.

    The returned state's ``capped`` flag records whether the cap stopped it.
    """
    if p is not None and p != s.params:
        s = replace(s, params=p)
    rng = np.random.default_rng(rng)
    cap = s.params.inner_cap(s.grid.size)
    while True:
        if s.t >= cap:
            return replace(s, capped=True)
        movers, _, s = _advance(s, rng)
        if movers.size == 0:
            return s
