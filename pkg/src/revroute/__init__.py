"""Permutation routing with reversals on paths and general graphs."""

from .core import (CostModel, Matching, PathReversal, Reversal, ScheduleError,
                   UnsupportedOperation, apply_sequence, binary_label, d_infinity,
                   dumps_schedule, is_sorted, loads_schedule, makespan, op_duration,
                   random_permutation)
from .graph_algorithms import grid_graph, parse_graph, route_sparse_general
from .path_algorithms import ALGORITHMS, atbs, gdc, middle_exchange, odd_even_sort, route, tbs

__version__ = "0.1.0"

__all__ = [
    "CostModel", "Matching", "PathReversal", "Reversal", "ScheduleError", "UnsupportedOperation",
    "apply_sequence", "binary_label", "d_infinity", "dumps_schedule", "is_sorted",
    "loads_schedule", "makespan", "op_duration", "random_permutation",
    "grid_graph", "parse_graph", "route_sparse_general",
    "ALGORITHMS", "atbs", "gdc", "middle_exchange", "odd_even_sort", "route", "tbs",
]
