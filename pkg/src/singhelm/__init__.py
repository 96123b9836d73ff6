"""Fundamental solutions of a three-fold singular Helmholtz equation in an octant.

Modules: ``hyperseries`` (2F1, 0F1, Pochhammer), ``quadrivariate`` (H0_{4,3},
Lauricella F_A and their expansions), ``fundsol`` (q_1..q_8), ``verify``
(residual and asymptotic checks) and ``cli``.
"""

from .errors import ConvergenceError, DomainError
from .fundsol import NormalizationConstants, Parameters, PointPair, q_solution, sigma_map
from .hyperseries import EvalResult, Path, SeriesOptions
from .quadrivariate import ConfluentParams, QuadArgs, h43_0

__version__ = "0.1.0"

__all__ = [
    "ConvergenceError",
    "DomainError",
    "NormalizationConstants",
    "Parameters",
    "PointPair",
    "q_solution",
    "sigma_map",
    "EvalResult",
    "Path",
    "SeriesOptions",
    "ConfluentParams",
    "QuadArgs",
    "h43_0",
]
