"""Objective functions, box domains and optimization sense."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import DomainError, UnknownFunctionError

__all__ = [
    "BoxDomain",
    "Sense",
    "ObjectiveFunction",
    "builtin",
    "builtin_names",
    "BUILTIN_EXPRESSIONS",
    "oriented_value",
]


class Sense(enum.Enum):
    MINIMIZE = "min"
    MAXIMIZE = "max"

    @property
    def sign(self) -> float:
        return 1.0 if self is Sense.MINIMIZE else -1.0

    @classmethod
    def parse(cls, text: str) -> "Sense":
        key = text.strip().lower()
        aliases = {"min": cls.MINIMIZE, "minimize": cls.MINIMIZE,
                   "max": cls.MAXIMIZE, "maximize": cls.MAXIMIZE}
        try:
            return aliases[key]
        except KeyError:
            raise ValueError(f"unknown sense {text!r}; use 'min' or 'max'") from None


@dataclass(frozen=True)
class BoxDomain:
    """Axis-aligned box ``[lower[k], upper[k]]`` in each dimension."""

    lower: tuple
    upper: tuple

    def __post_init__(self):
        lower = tuple(float(v) for v in np.atleast_1d(self.lower))
        upper = tuple(float(v) for v in np.atleast_1d(self.upper))
        if len(lower) == 0 or len(lower) != len(upper):
            raise DomainError(
                f"lower and upper must be non-empty and of equal length, got {len(lower)} and {len(upper)}"
            )
        for k, (lo, hi) in enumerate(zip(lower, upper)):
            if not (np.isfinite(lo) and np.isfinite(hi)):
                raise DomainError(f"bounds of dimension {k} must be finite")
            if not lo < hi:
                raise DomainError(f"dimension {k}: lower bound {lo} is not below upper bound {hi}")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @property
    def dim(self) -> int:
        return len(self.lower)

    @property
    def widths(self) -> np.ndarray:
        return np.asarray(self.upper) - np.asarray(self.lower)

    def contains(self, points) -> np.ndarray:
        """Boolean mask of the rows of ``points`` (shape ``(m, dim)``) inside the closed box."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        return np.all((pts >= self.lower) & (pts <= self.upper), axis=1)

    def clip(self, points) -> np.ndarray:
        return np.clip(np.asarray(points, dtype=float), self.lower, self.upper)


@dataclass(frozen=True)
class ObjectiveFunction:
    """A deterministic scalar function on a box.

    ``evaluator`` maps an array of points with shape ``(m, dim)`` to an array
    of ``m`` values. ``source`` holds the expression text when the function
    was parsed, so reports can name a reproducible definition.
    """

    evaluator: Callable[[np.ndarray], np.ndarray]
    domain: BoxDomain
    name: str
    source: Optional[str] = field(default=None, compare=False)

    @property
    def dim(self) -> int:
        return self.domain.dim

    def evaluate(self, points) -> np.ndarray:
        pts = np.asarray(points, dtype=float)
        if pts.ndim == 1:
            pts = pts.reshape(-1, self.dim)
        if pts.shape[1] != self.dim:
            raise DomainError(f"{self.name} takes {self.dim}-dimensional points, got {pts.shape[1]}")
        return np.asarray(self.evaluator(pts), dtype=float).reshape(pts.shape[0])

    def __call__(self, point) -> float:
        p = np.atleast_1d(np.asarray(point, dtype=float))
        return float(self.evaluate(p.reshape(1, -1))[0])


def oriented_value(f: ObjectiveFunction, sense: Sense, p) -> float:
    """Value that the colony minimizes: ``f(p)`` for MINIMIZE, ``-f(p)`` for MAXIMIZE."""
    point = np.atleast_1d(np.asarray(p, dtype=float))
    if point.shape != (f.dim,):
        raise DomainError(f"expected a point of dimension {f.dim}, got shape {point.shape}")
    if not f.domain.contains(point)[0]:
        raise DomainError(f"point {point.tolist()} lies outside the domain of {f.name}")
    return sense.sign * f(point)


def _f1(x):
    return np.sin(5.1 * np.pi * x[:, 0] + 0.5) ** 6


def _f2(x):
    t = x[:, 0]
    return 5.0 * np.exp(-0.5 * t) * np.sin(30.0 * t) + np.exp(0.2 * t) * np.sin(20.0 * t) + 6.0


def _f3(x):
    a, b = x[:, 0], x[:, 1]
    return a ** 2 + b ** 2 - np.cos(18.0 * a) - np.cos(18.0 * b)


def _f4(x):
    t = x[:, 0]
    return (t + 1.0) * (t + 2.0) * (t + 3.0) * (t + 4.0) * (t + 5.0) + 5.0


def _f5(x):
    t = x[:, 0]
    return (t + 2.0) * np.cos(9.0 * t) + np.sin(7.0 * t)


_BUILTINS = {
    "f1": (_f1, ([0.0], [1.0])),
    "f2": (_f2, ([0.0], [8.0])),
    "f3": (_f3, ([-1.0, -1.0], [1.0, 1.0])),
    "f4": (_f4, ([-5.0], [0.0])),
    "f5": (_f5, ([0.0], [4.0])),
}

# Textual forms of the built-ins, used to cross-check the expression parser.
BUILTIN_EXPRESSIONS = {
    "f1": "sin(5.1*pi*x+0.5)^6",
    "f2": "5*exp(-0.5*x)*sin(30*x)+exp(0.2*x)*sin(20*x)+6",
    "f3": "x1^2+x2^2-cos(18*x1)-cos(18*x2)",
    "f4": "(x+1)*(x+2)*(x+3)*(x+4)*(x+5)+5",
    "f5": "(x+2)*cos(9*x)+sin(7*x)",
}


def builtin_names() -> Sequence[str]:
    return tuple(_BUILTINS)


def builtin(name: str) -> ObjectiveFunction:
    """Return one of the five benchmark instances with its domain."""
    try:
        fn, (lo, hi) = _BUILTINS[name]
    except KeyError:
        raise UnknownFunctionError(name, _BUILTINS) from None
    return ObjectiveFunction(fn, BoxDomain(lo, hi), name)
