"""Find all local extrema of a box-bounded function with a lattice ant colony."""

__version__ = "0.1.0"

from .colony import AcoParams, ColonyState, init_colony, run_to_quiescence, step
from .errors import (
    DomainError,
    EmptyOccupancyError,
    ExprEvaluationError,
    ExprSyntaxError,
    LatticeAcoError,
    OracleRefusal,
    UnknownFunctionError,
)
from .expr import parse, parse_objective
from .lattice import Grid, NeighborScheme, partition, subdivide
from .objective import BoxDomain, ObjectiveFunction, Sense, builtin, builtin_names, oriented_value
from .oracle import OracleConfig, grid_extrema, tsp_brute
from .search import BOTH, ExtremumResult, RunReport, SearchConfig, dedup, error_ratio, search
from .tsp import CityGraph, TspParams, convergence_marker, solve_tsp

__all__ = [
    "AcoParams", "ColonyState", "init_colony", "run_to_quiescence", "step",
    "DomainError", "EmptyOccupancyError", "ExprEvaluationError", "ExprSyntaxError",
    "LatticeAcoError", "OracleRefusal", "UnknownFunctionError",
    "parse", "parse_objective",
    "Grid", "NeighborScheme", "partition", "subdivide",
    "BoxDomain", "ObjectiveFunction", "Sense", "builtin", "builtin_names", "oriented_value",
    "OracleConfig", "grid_extrema", "tsp_brute",
    "BOTH", "ExtremumResult", "RunReport", "SearchConfig", "dedup", "error_ratio", "search",
    "CityGraph", "TspParams", "convergence_marker", "solve_tsp",
]
