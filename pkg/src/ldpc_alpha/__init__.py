"""Finite-length 1/n correction of BP erasure rates for LDPC ensembles on the BEC."""

__version__ = "0.1.0"

from .alpha import AlphaBreakdown, alpha, alpha_limit, alpha_regular, xi, xi_exact
from .cycle import gamma
from .density_evolution import evolve, fixed_point, threshold
from .ensemble import DegreeDistribution, Ensemble, irregular_example, parse_distribution
from .oracle import exact_pb_full, exact_pb_sampled
from .simulator import estimate_pb, sample_graph, simulate_grid
from .tree import beta

__all__ = [
    "AlphaBreakdown",
    "DegreeDistribution",
    "Ensemble",
    "alpha",
    "alpha_limit",
    "alpha_regular",
    "beta",
    "estimate_pb",
    "evolve",
    "exact_pb_full",
    "exact_pb_sampled",
    "fixed_point",
    "gamma",
    "irregular_example",
    "parse_distribution",
    "sample_graph",
    "simulate_grid",
    "threshold",
    "xi",
    "xi_exact",
]
