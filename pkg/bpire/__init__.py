"""
Branching processes with immigration in random environment.

Exact Cramer roots, stationary sampling, tail and extremal-index estimators,
stable limits of partial sums and the random walk in random environment
built on the same chain.
"""

from .const import TOOL_VERSION
from .cramer import solve_kappa
from .env_model import EnvironmentModel, preset_model, two_point_environment
from .model_config import parse_model, serialize_model
from .rwre import RwreModel

__version__ = TOOL_VERSION

__all__ = [
    "EnvironmentModel",
    "RwreModel",
    "parse_model",
    "preset_model",
    "serialize_model",
    "solve_kappa",
    "two_point_environment",
]
