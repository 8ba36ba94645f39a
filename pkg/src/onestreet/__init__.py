"""Solve a one-street poker game for arbitrary deal distributions and learn
readable strategies from a database of solved games."""
from .deals import make_joint, marginals, sample_simplex
from .equilibrium import EquilibriumResult, best_response_p1, best_response_p2, nash_conv, solve
from .game import DEFAULT_CONFIG, GameConfig, expected_value, payoff
from .metrics import emd_1d, feature_distance, input_distance, output_distance
from .representations import Representation

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_CONFIG", "EquilibriumResult", "GameConfig", "Representation", "best_response_p1",
    "best_response_p2", "emd_1d", "expected_value", "feature_distance", "input_distance", "make_joint",
    "marginals", "nash_conv", "output_distance", "payoff", "sample_simplex", "solve",
]
