"""
Fundamental solutions of the singular Helmholtz equation

    sum_i u_{x_i x_i} + sum_{j<=3} (2 alpha_j / x_j) u_{x_j} - mu u = 0,   mu = lambda^2,

in the octant x_1, x_2, x_3 > 0 of R^p.

The eight solutions are q_i = k_i * (r^2)^(-alpha - sum_S (1 - 2 alpha_k))
* prod_{k in S} (x_k x0_k)^(1 - 2 alpha_k) * H0_{4,3}(branch i; sigma), where S
is the set of axes flagged by branch i and sigma are the similarity
variables returned by ``sigma_map``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import special

from .errors import DomainError
from .hyperseries import DEFAULT_OPTIONS, EvalResult, SeriesOptions
from .quadrivariate import (
    ConfluentParams,
    QuadArgs,
    branch_params,
    branch_spec,
    h43_0,
    h43_0_regularized,
)

__all__ = [
    "Parameters",
    "PointPair",
    "SigmaCoords",
    "NormalizationConstants",
    "PDECoefficients",
    "sigma_map",
    "default_k1",
    "base_params",
    "solution_params",
    "prefactor_exponents",
    "q_solution",
    "pde_lhs_coefficients",
]


@dataclass(frozen=True)
class Parameters:
    """Problem data: dimension p, exponents alpha = (a1, a2, a3), mu = lambda^2."""

    p: int
    alpha: tuple
    mu: float = 0.0

    def __post_init__(self):
        if isinstance(self.p, bool) or int(self.p) != self.p:
            raise DomainError(f"p must be an integer, got {self.p}")
        object.__setattr__(self, "p", int(self.p))
        if self.p < 3:
            raise DomainError(f"p must be at least 3, got {self.p}")
        alpha = tuple(float(v) for v in self.alpha)
        if len(alpha) != 3:
            raise DomainError("alpha needs three components")
        for v in alpha:
            if not 0.0 < 2.0 * v < 1.0:
                raise DomainError(f"each alpha_j must satisfy 0 < 2 alpha_j < 1, got {v}")
        object.__setattr__(self, "alpha", alpha)
        mu = float(self.mu)
        if not math.isfinite(mu):
            raise DomainError("mu must be finite")
        object.__setattr__(self, "mu", mu)

    @property
    def alpha_tot(self) -> float:
        """alpha = a1 + a2 + a3 - 1 + p/2."""
        return sum(self.alpha) - 1.0 + self.p / 2.0


@dataclass(frozen=True)
class PointPair:
    """Evaluation point x and source point x0, both in the open octant."""

    x: tuple
    x0: tuple

    def __post_init__(self):
        x = tuple(float(v) for v in self.x)
        x0 = tuple(float(v) for v in self.x0)
        if len(x) != len(x0):
            raise DomainError("x and x0 must have the same dimension")
        if len(x) < 3:
            raise DomainError("points need at least three coordinates")
        if not all(math.isfinite(v) for v in x + x0):
            raise DomainError("coordinates must be finite")
        if min(x[:3]) <= 0 or min(x0[:3]) <= 0:
            raise DomainError("x_1, x_2, x_3 and x0_1, x0_2, x0_3 must be positive")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "x0", x0)

    def swapped(self) -> "PointPair":
        return PointPair(self.x0, self.x)


@dataclass(frozen=True)
class SigmaCoords:
    """Similarity variables of a point pair.

    r2 = |x - x0|^2; rk2[k] is r2 with the k-th difference replaced by the sum
    x_k + x0_k; sigma = (sigma_1, sigma_2, sigma_3, sigma_4) with
    sigma_k = -4 x_k x0_k / r2 and sigma_4 = -mu r2 / 4; P = r2^(-alpha).
    """

    r2: float
    rk2: tuple
    sigma: tuple
    alpha_tot: float
    P: float

    @property
    def args(self) -> QuadArgs:
        return QuadArgs(*self.sigma)


@dataclass(frozen=True)
class NormalizationConstants:
    """k_1..k_8.  ``default`` uses the closed-form k_1 and k_2..k_8 = 1."""

    k: tuple

    def __post_init__(self):
        k = tuple(float(v) for v in self.k)
        if len(k) != 8:
            raise DomainError("eight normalization constants are needed")
        object.__setattr__(self, "k", k)

    @classmethod
    def default(cls, prm: Parameters) -> "NormalizationConstants":
        return cls((default_k1(prm),) + (1.0,) * 7)

    def __getitem__(self, i: int) -> float:
        return self.k[int(i) - 1]


@dataclass(frozen=True)
class PDECoefficients:
    """Multipliers of u_{x_i x_i}, u_{x_i} and u in the equation at a point."""

    second: tuple
    first: tuple
    zeroth: float


def sigma_map(pt: PointPair, prm: Parameters) -> SigmaCoords:
    """Similarity variables for the pair (x, x0)."""
    if len(pt.x) != prm.p:
        raise DomainError(f"points have dimension {len(pt.x)}, parameters say p={prm.p}")
    x = np.array(pt.x)
    x0 = np.array(pt.x0)
    diff2 = (x - x0) ** 2
    r2 = float(math.fsum(diff2))
    if r2 == 0.0:
        raise DomainError("singular point: x equals x0")
    rk2 = tuple(float(r2 - diff2[k] + (x[k] + x0[k]) ** 2) for k in range(3))
    sigma = tuple(float(-4.0 * x[k] * x0[k] / r2) for k in range(3)) + (-prm.mu * r2 / 4.0,)
    a = prm.alpha_tot
    return SigmaCoords(r2, rk2, sigma, a, r2 ** (-a))


def default_k1(prm: Parameters) -> float:
    """k_1 = 4^(a1+a2+a3-1) Gamma(alpha) prod Gamma(a_j) / (pi^(p/2) prod Gamma(2 a_j))."""
    al = np.array(prm.alpha)
    log_k = ((al.sum() - 1.0) * math.log(4.0) + special.gammaln(prm.alpha_tot)
             + special.gammaln(al).sum() - 0.5 * prm.p * math.log(math.pi)
             - special.gammaln(2.0 * al).sum())
    return float(math.exp(log_k))


def base_params(prm: Parameters) -> ConfluentParams:
    """H0 parameters of q_1: (alpha; a1, a2, a3; 2a1, 2a2, 2a3)."""
    return ConfluentParams(prm.alpha_tot, prm.alpha, tuple(2.0 * v for v in prm.alpha))


def solution_params(i: int, prm: Parameters, printed: bool = False) -> ConfluentParams:
    """H0 parameters of q_i.

    ``printed=True`` reproduces the printed leading parameter 1+alpha-2a1 of
    q_3 and q_4 (inconsistent with the branch shifts, kept for auditing).
    """
    spec = branch_spec(i)
    cp = branch_params(spec, base_params(prm))
    if printed and spec.index in (3, 4):
        cp = ConfluentParams(1.0 + prm.alpha_tot - 2.0 * prm.alpha[0], cp.b, cp.d)
    return cp


def prefactor_exponents(i: int, prm: Parameters):
    """(exponent of r^2, exponents of x_k x0_k for k = 1, 2, 3) for q_i."""
    spec = branch_spec(i)
    ek = tuple(1.0 - 2.0 * a if f else 0.0 for f, a in zip(spec.flags, prm.alpha))
    return -prm.alpha_tot - sum(ek), ek


def q_solution(i: int, pt: PointPair, prm: Parameters, ks: NormalizationConstants | None = None,
               opts: SeriesOptions | None = None, path: str = "auto",
               fixed_level: int | None = None, printed: bool = False) -> EvalResult:
    """Fundamental solution q_i(x, x0), i = 1..8.

    ``path`` selects the H0 evaluator (see ``quadrivariate.h43_0``);
    ``fixed_level`` forces the regularized expansion truncated at that level.
    """
    opts = opts or DEFAULT_OPTIONS
    ks = ks or NormalizationConstants.default(prm)
    sc = sigma_map(pt, prm)
    cp = solution_params(i, prm, printed)
    e_r2, ek = prefactor_exponents(i, prm)
    log_pre = e_r2 * math.log(sc.r2)
    for k in range(3):
        if ek[k]:
            log_pre += ek[k] * math.log(pt.x[k] * pt.x0[k])
    scale = ks[i] * math.exp(log_pre)
    if fixed_level is not None:
        res = h43_0_regularized(cp, sc.args, opts, fixed_level=fixed_level)
    else:
        res = h43_0(cp, sc.args, opts, path)
    return EvalResult(scale * res.value, res.level_used, float(abs(scale) * res.tail_estimate),
                      res.path)


def pde_lhs_coefficients(prm: Parameters, x: Sequence[float]) -> PDECoefficients:
    """Multipliers 1 (second derivatives), 2 a_j / x_j (first, j <= 3) and -mu."""
    x = tuple(float(v) for v in x)
    if len(x) != prm.p:
        raise DomainError(f"point has dimension {len(x)}, parameters say p={prm.p}")
    if min(x[:3]) <= 0:
        raise DomainError("x_1, x_2, x_3 must be positive")
    first = tuple(2.0 * prm.alpha[j] / x[j] for j in range(3)) + (0.0,) * (prm.p - 3)
    return PDECoefficients((1.0,) * prm.p, first, -prm.mu)
