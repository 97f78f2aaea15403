"""Uniform lattice partitions of a box: cells, centers, neighbors and subdivision."""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, List, Sequence, Set, Tuple

import numpy as np

from .errors import EmptyOccupancyError
from .objective import BoxDomain

__all__ = ["CellId", "NeighborScheme", "Grid", "partition", "subdivide"]

CellId = Tuple[int, ...]


class NeighborScheme(enum.Enum):
    AXIS = "axis"  # +-1 along exactly one dimension
    FULL = "full"  # every offset in {-1, 0, 1}^d except the origin

    def offsets(self, dim: int) -> np.ndarray:
        if self is NeighborScheme.AXIS:
            eye = np.eye(dim, dtype=np.int64)
            return np.concatenate([-eye, eye])
        offs = [o for o in itertools.product((-1, 0, 1), repeat=dim) if any(o)]
        return np.asarray(offs, dtype=np.int64)


@dataclass(frozen=True)
class Grid:
    """``counts[k]`` equal cells per dimension over ``region``.

    Cells are addressed either by a :data:`CellId` tuple or by their flat
    C-order index; ``flat``/``cell`` convert between the two.
    """

    region: BoxDomain
    counts: Tuple[int, ...]

    def __post_init__(self):
        counts = tuple(int(c) for c in np.atleast_1d(self.counts))
        if len(counts) != self.region.dim:
            raise ValueError(f"need one count per dimension ({self.region.dim}), got {len(counts)}")
        if any(c < 1 for c in counts):
            raise ValueError(f"cell counts must be positive, got {counts}")
        object.__setattr__(self, "counts", counts)

    @property
    def dim(self) -> int:
        return self.region.dim

    @cached_property
    def delta(self) -> np.ndarray:
        return self.region.widths / np.asarray(self.counts, dtype=float)

    @property
    def size(self) -> int:
        return int(np.prod(self.counts))

    def __len__(self):
        return self.size

    def _check(self, c: CellId) -> CellId:
        c = tuple(int(i) for i in np.atleast_1d(c))
        if len(c) != self.dim or any(not 0 <= i < n for i, n in zip(c, self.counts)):
            raise IndexError(f"cell {c} is not valid in a grid with counts {self.counts}")
        return c

    def flat(self, c: CellId) -> int:
        return int(np.ravel_multi_index(self._check(c), self.counts))

    def cell(self, flat_index: int) -> CellId:
        return tuple(int(i) for i in np.unravel_index(int(flat_index), self.counts))

    def cells(self) -> List[CellId]:
        return [tuple(c) for c in itertools.product(*(range(n) for n in self.counts))]

    def center(self, c: CellId) -> np.ndarray:
        idx = np.asarray(self._check(c), dtype=float)
        return np.asarray(self.region.lower) + (idx + 0.5) * self.delta

    @cached_property
    def centers(self) -> np.ndarray:
        """Centers of all cells, shape ``(size, dim)``, in flat-index order."""
        idx = np.indices(self.counts).reshape(self.dim, -1).T.astype(float)
        return np.asarray(self.region.lower) + (idx + 0.5) * self.delta

    def cell_box(self, c: CellId) -> BoxDomain:
        c = self._check(c)
        lo = np.asarray(self.region.lower)
        lower = lo + np.asarray(c) * self.delta
        upper = lo + (np.asarray(c) + 1) * self.delta
        # Pin the outermost faces to the region so nested boxes never drift outside it.
        for k, i in enumerate(c):
            if i == 0:
                lower[k] = self.region.lower[k]
            if i == self.counts[k] - 1:
                upper[k] = self.region.upper[k]
        return BoxDomain(lower, upper)

    def neighbors(self, c: CellId, scheme: NeighborScheme = NeighborScheme.FULL) -> Set[CellId]:
        c = np.asarray(self._check(c))
        out = set()
        for off in scheme.offsets(self.dim):
            nb = c + off
            if np.all(nb >= 0) and np.all(nb < self.counts):
                out.add(tuple(int(i) for i in nb))
        return out

    def neighbor_table(self, scheme: NeighborScheme = NeighborScheme.FULL) -> np.ndarray:
        """Flat neighbor indices, shape ``(size, n_offsets)``, padded with -1 off-grid."""
        return self._neighbor_tables[scheme]

    @cached_property
    def _neighbor_tables(self):
        idx = np.indices(self.counts).reshape(self.dim, -1).T
        counts = np.asarray(self.counts)
        tables = {}
        for scheme in NeighborScheme:
            offs = scheme.offsets(self.dim)
            nb = idx[:, None, :] + offs[None, :, :]
            valid = np.all((nb >= 0) & (nb < counts), axis=2)
            flat = np.ravel_multi_index(tuple(np.moveaxis(np.where(valid[..., None], nb, 0), 2, 0)), self.counts)
            tables[scheme] = np.where(valid, flat, -1)
        return tables


def partition(region: BoxDomain, counts: Sequence[int]) -> Grid:
    """Split ``region`` into ``counts[k]`` equal cells along each dimension."""
    return Grid(region, tuple(counts))


def subdivide(g: Grid, occupied: Iterable, n1: Sequence[int]) -> List[Grid]:
    """One child grid with ``n1`` cells per dimension for each occupied cell, in flat-index order.

    ``occupied`` may hold :data:`CellId` tuples or flat indices.
    """
    flats = set()
    for c in occupied:
        if isinstance(c, (int, np.integer)):
            flats.add(int(c))
        else:
            flats.add(g.flat(c))
    if not flats:
        raise EmptyOccupancyError("cannot subdivide: no occupied cells")
    return [Grid(g.cell_box(g.cell(i)), tuple(n1)) for i in sorted(flats)]
