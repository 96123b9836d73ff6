"""
Numerical verification: PDE residuals of q_i, residuals of the
hypergeometric system satisfied by the branch solutions, the derivative
formula for H0_{4,3}, the singular behaviour of q_1 at x -> x0, and the Gauss
summation formula.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import integrate, special

from .errors import DomainError
from .fundsol import (
    NormalizationConstants,
    Parameters,
    PointPair,
    pde_lhs_coefficients,
    q_solution,
    sigma_map,
)
from .hyperseries import DEFAULT_OPTIONS, SeriesOptions, gauss_2f1, pochhammer
from .quadrivariate import ConfluentParams, QuadArgs, branch_spec, h43_0, omega_branch

__all__ = [
    "ResidualReport",
    "SingularityFit",
    "DerivativeCheck",
    "GaussTrial",
    "GaussReport",
    "STEP_FRACTION",
    "default_step",
    "observed_order",
    "pde_residual",
    "pde_residual_fn",
    "system_residual",
    "system_rows",
    "derivative_check",
    "singularity_fit",
    "singularity_reference",
    "default_radii",
    "gauss_series_at_one",
    "gauss_summation_check",
]

# h0 as a fraction of the distance to the nearest boundary or singularity
STEP_FRACTION = 0.05
N_HALVINGS = 2


@dataclass(frozen=True)
class ResidualReport:
    """Finite-difference residual at h0, h0/2, h0/4.

    ``residual`` and ``normalized_residual`` refer to the smallest step; the
    per-step values are in ``steps``, ``residuals`` and ``normalized``.
    ``order_estimate`` is the least-squares slope of log|normalized| against
    log h.
    """

    point: tuple
    h: float
    residual: float
    normalized_residual: float
    order_estimate: float
    steps: tuple = ()
    residuals: tuple = ()
    normalized: tuple = ()


@dataclass(frozen=True)
class SingularityFit:
    """Log-log fit of q_1 along a ray x = x0 + r * direction."""

    slope: float
    constant: float
    reference: float
    radii: tuple = ()
    values: tuple = ()
    scaled: tuple = ()

    @property
    def ratio(self) -> float:
        return self.constant / self.reference


@dataclass(frozen=True)
class DerivativeCheck:
    """Mixed difference of H0 against the shifted-parameter closed form."""

    index: tuple
    finite_difference: float
    closed_form: float

    @property
    def rel_error(self) -> float:
        return abs(self.finite_difference - self.closed_form) / abs(self.closed_form)


@dataclass(frozen=True)
class GaussTrial:
    a: float
    b: float
    c: float
    series: float
    closed: float
    passed: bool

    @property
    def rel_error(self) -> float:
        return abs(self.series - self.closed) / abs(self.closed) if self.closed else abs(self.series)


@dataclass(frozen=True)
class GaussReport:
    trials: tuple = field(default=())

    @property
    def passes(self) -> int:
        return sum(t.passed for t in self.trials)

    @property
    def ok(self) -> bool:
        return self.passes == len(self.trials)

    @property
    def worst(self) -> float:
        return max((t.rel_error for t in self.trials), default=0.0)


def observed_order(steps: Sequence[float], errors: Sequence[float]) -> float:
    """Least-squares slope of log|error| against log step (NaN if any error is zero)."""
    e = np.abs(np.asarray(errors, dtype=float))
    if np.any(e == 0) or not np.all(np.isfinite(e)):
        return float("nan")
    slope, _ = np.polyfit(np.log(np.asarray(steps, dtype=float)), np.log(e), 1)
    return float(slope)


def _step_sequence(h0):
    return tuple(h0 / 2.0 ** j for j in range(N_HALVINGS + 1))


# ---------------------------------------------------------------------------
# PDE residual
# ---------------------------------------------------------------------------

def default_step(pt: PointPair) -> float:
    """h0 = STEP_FRACTION times the distance to the nearest coordinate plane or x0."""
    dist = min(min(pt.x[:3]), math.dist(pt.x, pt.x0))
    return STEP_FRACTION * dist


def pde_residual_fn(u: Callable[[tuple], float], x: Sequence[float], prm: Parameters,
                    h: float, x0: Sequence[float] | None = None) -> ResidualReport:
    """Residual of the PDE applied to an arbitrary function ``u`` at ``x``.

    Central differences for u_{x_i x_i} and u_{x_i}, steps h, h/2, h/4.
    """
    x = tuple(float(v) for v in x)
    coef = pde_lhs_coefficients(prm, x)
    if not h > 0:
        raise DomainError("step must be positive")
    if h >= min(x[:3]):
        raise DomainError("stencil leaves the octant")
    if x0 is not None and h >= math.dist(x, x0):
        raise DomainError("stencil reaches the singular point")
    u0 = float(u(x))
    steps = _step_sequence(h)
    res, norm = [], []
    for hh in steps:
        terms = [coef.zeroth * u0]
        for j in range(prm.p):
            xp = list(x)
            xm = list(x)
            xp[j] += hh
            xm[j] -= hh
            up, um = float(u(tuple(xp))), float(u(tuple(xm)))
            terms.append(coef.second[j] * (up - 2.0 * u0 + um) / hh ** 2)
            if coef.first[j]:
                terms.append(coef.first[j] * (up - um) / (2.0 * hh))
        r = math.fsum(terms)
        scale = max(abs(u0), max(abs(t) for t in terms))
        res.append(r)
        norm.append(r / scale if scale else r)
    return ResidualReport(x, steps[-1], res[-1], norm[-1], observed_order(steps, norm),
                          steps, tuple(res), tuple(norm))


def pde_residual(i: int, pt: PointPair, prm: Parameters, h: float | None = None,
                 ks: NormalizationConstants | None = None,
                 opts: SeriesOptions | None = None) -> ResidualReport:
    """PDE residual of q_i(., x0) at x (steps h, h/2, h/4; h defaults to ``default_step``)."""
    branch_spec(i)
    ks = ks or NormalizationConstants.default(prm)
    h = default_step(pt) if h is None else float(h)

    def u(x):
        return q_solution(i, PointPair(x, pt.x0), prm, ks, opts).value

    return pde_residual_fn(u, pt.x, prm, h, pt.x0)


# ---------------------------------------------------------------------------
# Hypergeometric system
# ---------------------------------------------------------------------------

_VARS = "xyzt"


def system_rows(p: ConfluentParams, v: Sequence[float], D: dict) -> list:
    """Terms of the four equations at v = (x, y, z, t).

    ``D`` maps derivative labels ("", "x", "xy", "tt", ...) to values.
    Each row is returned as a list of terms whose sum should vanish.
    """
    a = p.a
    rows = []
    for k in range(3):
        vk = v[k]
        bk, dk = p.b[k], p.d[k]
        c = _VARS[k]
        others = [j for j in range(3) if j != k]
        terms = [vk * (1.0 - vk) * D[c + c]]
        for j in others:
            terms.append(-vk * v[j] * D[_mixed(c, _VARS[j])])
        terms.append(vk * v[3] * D[_mixed(c, "t")])
        terms.append((dk - (a + bk + 1.0) * vk) * D[c])
        for j in others:
            terms.append(-bk * v[j] * D[_VARS[j]])
        terms.append(bk * v[3] * D["t"])
        terms.append(-a * bk * D[""])
        rows.append(terms)
    t = v[3]
    rows.append([t * D["tt"], -v[0] * D["xt"], -v[1] * D["yt"], -v[2] * D["zt"],
                 (1.0 - a) * D["t"], D[""]])
    return rows


def _mixed(c1, c2):
    return "".join(sorted(c1 + c2, key=_VARS.index))


def _stencil_derivatives(f, v, h):
    """Central differences of f at v: values, gradient, Hessian (4 variables)."""
    cache = {}

    def at(offset):
        key = tuple(offset)
        if key not in cache:
            cache[key] = float(f(tuple(vi + oi * h for vi, oi in zip(v, offset))))
        return cache[key]

    e = np.eye(4, dtype=int)
    D = {"": at((0, 0, 0, 0))}
    for j in range(4):
        up, um = at(e[j]), at(-e[j])
        D[_VARS[j]] = (up - um) / (2.0 * h)
        D[_VARS[j] * 2] = (up - 2.0 * D[""] + um) / h ** 2
    for j, k in itertools.combinations(range(4), 2):
        D[_VARS[j] + _VARS[k]] = (at(e[j] + e[k]) - at(e[j] - e[k]) - at(e[k] - e[j])
                                  + at(-e[j] - e[k])) / (4.0 * h ** 2)
    return D


def system_residual(i: int, p: ConfluentParams, args: QuadArgs, h: float | None = None,
                    opts: SeriesOptions | None = None, path: str = "direct") -> list:
    """Residuals of the four system equations on omega_i at ``args``.

    Returns four ResidualReports (one per equation).  The default step is
    STEP_FRACTION times the distance to the nearest coordinate plane of a
    branch power or to the rim |x|+|y|+|z| = 1 of the power series.
    """
    spec = branch_spec(i)
    v = (args.x, args.y, args.z, args.t)
    tau = spec.exponents(p)[:3]
    flagged = [abs(v[k]) for k in range(3) if tau[k] != 0.0]
    dist = min(flagged + [1.0 - args.l1])
    if not dist > 0:
        raise DomainError("system residual needs positive flagged arguments inside the series domain")
    h = STEP_FRACTION * dist if h is None else float(h)
    if h >= dist or args.l1 + 2.0 * h >= 1.0:
        raise DomainError("stencil leaves the valid region")

    def f(w):
        return omega_branch(spec, p, QuadArgs(*w), opts, path).value

    steps = _step_sequence(h)
    per_row = [[] for _ in range(4)]
    for hh in steps:
        D = _stencil_derivatives(f, v, hh)
        for r, terms in enumerate(system_rows(p, v, D)):
            val = math.fsum(terms)
            scale = max(abs(t) for t in terms)
            per_row[r].append((val, val / scale if scale else val))
    out = []
    for rows in per_row:
        res = tuple(r for r, _ in rows)
        norm = tuple(n for _, n in rows)
        out.append(ResidualReport(v, steps[-1], res[-1], norm[-1], observed_order(steps, norm),
                                  steps, res, norm))
    return out


# ---------------------------------------------------------------------------
# Derivative formula
# ---------------------------------------------------------------------------

def derivative_check(p: ConfluentParams, args: QuadArgs, h: float = 1e-2,
                     opts: SeriesOptions | None = None, path: str = "direct") -> list:
    """Mixed central differences d^(i+j+k+l) H0 / dx^i dy^j dz^k dt^l for
    (i, j, k, l) in {0, 1}^4 against

        (a)_(i+j+k-l) (b1)_i (b2)_j (b3)_k / ((d1)_i (d2)_j (d3)_k)
            * H0(a+i+j+k-l; b1+i, b2+j, b3+k; d1+i, d2+j, d3+k).

    The differences at h and h/2 are combined by one Richardson step.
    """
    v = np.array([args.x, args.y, args.z, args.t])
    cache = {}

    def H(w):
        key = tuple(w)
        if key not in cache:
            cache[key] = h43_0(p, QuadArgs(*w), opts, path).value
        return cache[key]

    def mixed(axes, hh):
        acc = 0.0
        for signs in itertools.product((1, -1), repeat=len(axes)):
            w = v.copy()
            for j, s in zip(axes, signs):
                w[j] += s * hh
            acc += math.prod(signs) * H(w)
        return acc / (2.0 * hh) ** len(axes)

    out = []
    for idx in itertools.product((0, 1), repeat=4):
        axes = [j for j in range(4) if idx[j]]
        fd = (4.0 * mixed(axes, h / 2.0) - mixed(axes, h)) / 3.0
        i, j, k, l = idx
        shift = (i, j, k)
        coef = float(pochhammer(p.a, i + j + k - l))
        for bk, dk, s in zip(p.b, p.d, shift):
            if s:
                coef *= bk / dk
        q = ConfluentParams(p.a + i + j + k - l, tuple(b + s for b, s in zip(p.b, shift)),
                            tuple(d + s for d, s in zip(p.d, shift)))
        closed = coef * h43_0(q, args, opts, path).value
        out.append(DerivativeCheck(idx, fd, closed))
    return out


# ---------------------------------------------------------------------------
# Singularity
# ---------------------------------------------------------------------------

def singularity_reference(prm: Parameters) -> float:
    """4^(a1+a2+a3-1) Gamma((p-2)/2) / pi^(p/2)."""
    return float(4.0 ** (sum(prm.alpha) - 1.0) * special.gamma((prm.p - 2) / 2.0)
                 / math.pi ** (prm.p / 2.0))


def default_radii(x0: Sequence[float], n: int = 8, decades: float = 2.0,
                  largest: float = 1e-3) -> tuple:
    """n radii from largest*min(x0_k) down over ``decades`` decades."""
    s = min(x0[:3])
    return tuple(float(s * largest * 10.0 ** (-decades * j / (n - 1))) for j in range(n))


def singularity_fit(direction: Sequence[float], x0: Sequence[float], prm: Parameters,
                    radii: Sequence[float] | None = None, ks: NormalizationConstants | None = None,
                    opts: SeriesOptions | None = None, n_fit: int = 4) -> SingularityFit:
    """Evaluate q_1 at x0 + r * direction for each radius.

    slope: least-squares slope of log|q_1| against log r over the ``n_fit``
    smallest radii.  constant: q_1 r^(p-2) prod r_k^(2 a_k) at the smallest
    radius.  reference: ``singularity_reference``.
    """
    x0 = tuple(float(v) for v in x0)
    d = np.asarray(direction, dtype=float)
    if d.shape != (prm.p,) or not np.linalg.norm(d) > 0:
        raise DomainError("direction must be a nonzero p-vector")
    d = d / np.linalg.norm(d)
    radii = tuple(sorted(default_radii(x0) if radii is None else radii, reverse=True))
    if len(radii) < 2 or radii[-1] <= 0:
        raise DomainError("need at least two positive radii")
    ks = ks or NormalizationConstants.default(prm)
    vals, scaled = [], []
    for r in radii:
        x = tuple(np.asarray(x0) + r * d)
        pt = PointPair(x, x0)
        q = q_solution(1, pt, prm, ks, opts).value
        sc = sigma_map(pt, prm)
        rk = math.prod(rk2 ** a for rk2, a in zip(sc.rk2, prm.alpha))
        vals.append(q)
        scaled.append(q * sc.r2 ** ((prm.p - 2) / 2.0) * rk)
    m = min(n_fit, len(radii))
    slope, _ = np.polyfit(np.log(radii[-m:]), np.log(np.abs(vals[-m:])), 1)
    return SingularityFit(float(slope), float(scaled[-1]), singularity_reference(prm),
                          radii, tuple(vals), tuple(scaled))


# ---------------------------------------------------------------------------
# Gauss summation
# ---------------------------------------------------------------------------

def gauss_series_at_one(a: float, b: float, c: float, n_head: int | None = None) -> float:
    """2F1(a, b; c; 1) from its series: n_head terms summed, the rest by
    Euler-Maclaurin with the tail integral done by quadrature.

    Independent of the Gamma closed form; needs c - a - b > 0.
    """
    s = c - a - b
    if not s > 0:
        raise DomainError("series at 1 needs c-a-b > 0")
    N = n_head or int(64 + 4 * (abs(a) + abs(b) + abs(c)))
    terms = np.empty(N + 1)
    terms[0] = 1.0
    for n in range(N):
        terms[n + 1] = terms[n] * (a + n) * (b + n) / ((c + n) * (n + 1.0))
    head = math.fsum(terms[:N])
    fN = terms[N]
    if fN == 0.0:
        return head

    def ratio(x):
        # f(x) / f(N) for real x >= N
        return (special.poch(c + x, a - c) / special.poch(c + N, a - c)
                * special.poch(1.0 + x, b - 1.0) / special.poch(1.0 + N, b - 1.0))

    # x = N v^(-1/s): int_N^inf f dx = (N/s) int_0^1 f(x) (x/N)^(1+s) dv
    def g(v):
        x = N * v ** (-1.0 / s)
        return ratio(x) * (x / N) ** (1.0 + s)

    integral, _ = integrate.quad(g, 0.0, 1.0, epsabs=0.0, epsrel=1e-11, limit=200)
    integral *= fN * N / s

    def poly(k):
        return (special.polygamma(k, a + N) + special.polygamma(k, b + N)
                - special.polygamma(k, c + N) - special.polygamma(k, 1.0 + N))

    g1, g2, g3 = poly(0), poly(1), poly(2)
    d1 = fN * g1
    d3 = fN * (g1 ** 3 + 3.0 * g1 * g2 + g3)
    return float(head + integral + fN / 2.0 - d1 / 12.0 + d3 / 720.0)


def gauss_summation_check(trials: int = 100, seed: int = 0, rel_tol: float = 1e-9,
                          opts: SeriesOptions | None = None) -> GaussReport:
    """Random (a, b, c) with c > 0 and c-a-b > 0.2: the evaluator's value at
    x = 1 against the summed series."""
    opts = opts or DEFAULT_OPTIONS
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < trials:
        a, b = rng.uniform(-1.5, 2.5, size=2)
        c = a + b + 0.2 + rng.uniform(0.0, 3.0)
        if c <= 0.05:
            continue
        closed = gauss_2f1(a, b, c, 1.0, opts).value
        series = gauss_series_at_one(a, b, c)
        err = abs(series - closed) / max(abs(closed), 1e-300)
        out.append(GaussTrial(float(a), float(b), float(c), series, closed, bool(err <= rel_tol)))
    return GaussReport(tuple(out))
