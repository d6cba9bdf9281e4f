"""Localization game on graphs: exact solvers, strategies, bound formulas and G(n, p) experiments."""

__version__ = "0.1.0"

from .graph import (  # noqa: E402
    UNREACHABLE, GnpParams, Graph, bfs_distances, diameter, generate_gnp, is_connected,
    neighborhood, sphere,
)
from .signatures import (  # noqa: E402
    distinguishing_profile, distinguishing_set, partition_by_signature, signature,
)
from .game import play, simulate_walk, step  # noqa: E402
from .solver import (  # noqa: E402
    SolverBudget, Verdict, cop_wins, localization_number, metric_dimension, naive_cop_wins_oracle,
)

__all__ = [
    "UNREACHABLE", "GnpParams", "Graph", "bfs_distances", "diameter", "generate_gnp", "is_connected",
    "neighborhood", "sphere", "distinguishing_profile", "distinguishing_set", "partition_by_signature",
    "signature", "play", "simulate_walk", "step", "SolverBudget", "Verdict", "cop_wins",
    "localization_number", "metric_dimension", "naive_cop_wins_oracle",
]
