"""Parallel chip-firing games: simulation, period detection, constructions and verification sweeps."""

from .constructions import construct_bipartite_period, construct_cpartite_period, sigma_2k, sigma_k
from .engine import Position, complement, firing_set, is_confined, phi, step, trace
from .graphs import Graph, build_graph, complete, complete_bipartite, complete_multipartite, cycle, path
from .period import PeriodResult, detect_period, detect_period_lowmem

__version__ = "0.1.0"

__all__ = [
    "Graph",
    "PeriodResult",
    "Position",
    "build_graph",
    "complement",
    "complete",
    "complete_bipartite",
    "complete_multipartite",
    "construct_bipartite_period",
    "construct_cpartite_period",
    "cycle",
    "detect_period",
    "detect_period_lowmem",
    "firing_set",
    "is_confined",
    "path",
    "phi",
    "sigma_2k",
    "sigma_k",
    "step",
    "trace",
]
