"""Singularity dynamics of Schwarz functions and potentials for Laplacian and elliptic growth."""

from .dynamics import SinkSpec, Trajectory, cusp_time, evolve, schwarz_time_derivative
from .errors import SchwarzFlowError
from .families import FamilyId, FamilyState, schwarz_eval, singularities

__all__ = [
    "FamilyId",
    "FamilyState",
    "SchwarzFlowError",
    "SinkSpec",
    "Trajectory",
    "cusp_time",
    "evolve",
    "schwarz_eval",
    "schwarz_time_derivative",
    "singularities",
]

__version__ = "0.1.0"
