"""Positive discrepancy of graphs: exact oracles, spectral certificates, SDP ascent and rounding."""

from .errors import ConvergenceError, DiscLabError, GuardError, InvariantError, SoundnessError
from .graph import Graph

__version__ = "0.1.0"

__all__ = [
    "ConvergenceError",
    "DiscLabError",
    "Graph",
    "GuardError",
    "InvariantError",
    "SoundnessError",
    "__version__",
]
