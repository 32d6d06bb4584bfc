"""Spacelike capillary surfaces in Lorentz-Minkowski space L^3.

Discrete spacelike graphs with boundary on a support surface (plane,
hyperbolic plane or pseudosphere), their capillary energy and its first
variation, a solver for stationary surfaces, Hopf differential diagnostics on
rotational patches, and numerical checks of the classification and one-side
results.
"""
from ._backend import ENV_VAR as BACKEND_ENV_VAR
from .flow import (
    Classification,
    InadmissibleLambda,
    SolveOptions,
    SolveResult,
    SolverError,
    analytic_cap,
    analytic_disc,
    classify,
    initial_guess,
    perturb,
    rotational_cmc_profile,
    solve_stationary,
)
from .kernels import get_backend, set_backend
from .lorentz_core import BoundaryFrame, causal_character, hyperbolic_angle, minkowski_inner
from .mesh import DegenerateMesh, SpacelikeGraph, SpacelikeViolation
from .umbilic import HyperbolicPlane, Pseudosphere, SpacelikePlane
from .variational import StationarityReport, energy, stationarity_report

__version__ = "0.1.0"

__all__ = [
    "BACKEND_ENV_VAR",
    "BoundaryFrame",
    "Classification",
    "DegenerateMesh",
    "HyperbolicPlane",
    "InadmissibleLambda",
    "Pseudosphere",
    "SolveOptions",
    "SolveResult",
    "SolverError",
    "SpacelikeGraph",
    "SpacelikePlane",
    "SpacelikeViolation",
    "StationarityReport",
    "analytic_cap",
    "analytic_disc",
    "causal_character",
    "classify",
    "energy",
    "get_backend",
    "hyperbolic_angle",
    "initial_guess",
    "minkowski_inner",
    "perturb",
    "rotational_cmc_profile",
    "set_backend",
    "solve_stationary",
    "stationarity_report",
]
