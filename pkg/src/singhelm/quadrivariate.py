"""
Multivariable hypergeometric evaluators.

* ``h43``: the four-variable series H_{4,3}(a, b1..b4, c4; d1..d3; x, y, z, t)
  with joint index (a)_{m+n+k-l}.
* ``h43_0_direct``: its confluent limit H0_{4,3}(a, b1..b3; d1..d3; x, y, z, t)
  summed as a power series.
* ``lauricella_fa3``: Lauricella F_A in three variables.
* ``fa3_decomposed``, ``h43_0_expanded``, ``h43_0_regularized``: the
  expansions in products of Gauss functions (see ``_expansion``).  The
  regularized form is valid for all x, y, z < 1 and is the one used close to
  the singular point of the fundamental solutions.
* ``h43_0_integral``: H0 at t = 0 (where it reduces to F_A) from the Laplace
  integral of a product of three 1F1 functions; used far from the origin,
  where the lattice sums need too many levels.
* ``omega_branch``: the eight local solutions x^tau y^nu z^mu H0(shifted) of
  the hypergeometric system satisfied by H0.

Direct series are organized by the total degree M = m+n+k of the x, y, z
powers.  For fixed M the sum over l (the t index) is the one-variable series
(a)_M * 0F1(1-a-M; -t) for H0, or (a)_M * 2F1(b4, c4; 1-a-M; -t) for H4,3,
because (a)_{M-l} = (a)_M (-1)^l / (1-a-M)_l.  The x, y, z part at degree M
is a discrete convolution of three one-variable coefficient sequences.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy import special

from . import _expansion
from .errors import ConvergenceError, DomainError
from .hyperseries import (
    DEFAULT_OPTIONS,
    EvalResult,
    Path,
    SeriesOptions,
    hyp0f1_array,
    pochhammer,
)

__all__ = [
    "H43Params",
    "ConfluentParams",
    "QuadArgs",
    "BranchSpec",
    "BRANCHES",
    "branch_spec",
    "branch_params",
    "h43",
    "h43_0_direct",
    "h43_0",
    "lauricella_fa3",
    "fa3_decomposed",
    "h43_0_expanded",
    "h43_0_regularized",
    "h43_0_integral",
    "coefficient_A",
    "omega_branch",
    "DIRECT_RADIUS",
]

# auto path: direct series when |x|+|y|+|z| is at most this
DIRECT_RADIUS = 0.7


def _check_denominators(d):
    for v in d:
        if v <= 0 and v == math.floor(v):
            raise DomainError(f"denominator parameter {v} is a nonpositive integer")


@dataclass(frozen=True)
class H43Params:
    """Parameters of H_{4,3}: a; b = (b1, b2, b3, b4); c4; d = (d1, d2, d3)."""

    a: float
    b: tuple
    c4: float
    d: tuple

    def __post_init__(self):
        object.__setattr__(self, "b", tuple(float(v) for v in self.b))
        object.__setattr__(self, "d", tuple(float(v) for v in self.d))
        if len(self.b) != 4 or len(self.d) != 3:
            raise DomainError("H43Params needs four b and three d parameters")
        _check_denominators(self.d)


@dataclass(frozen=True)
class ConfluentParams:
    """Parameters of H0_{4,3}: a; b = (b1, b2, b3); d = (d1, d2, d3)."""

    a: float
    b: tuple
    d: tuple

    def __post_init__(self):
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "b", tuple(float(v) for v in self.b))
        object.__setattr__(self, "d", tuple(float(v) for v in self.d))
        if len(self.b) != 3 or len(self.d) != 3:
            raise DomainError("ConfluentParams needs three b and three d parameters")
        _check_denominators(self.d)


@dataclass(frozen=True)
class QuadArgs:
    """Arguments (x, y, z, t)."""

    x: float
    y: float
    z: float
    t: float = 0.0

    @property
    def xyz(self):
        return (self.x, self.y, self.z)

    @property
    def l1(self):
        return abs(self.x) + abs(self.y) + abs(self.z)


@dataclass(frozen=True)
class BranchSpec:
    """One of the eight local solutions.

    ``flags[k]`` tells whether variable k carries the power 1 - d_k; the
    exponent of t is always 0.
    """

    index: int
    flags: tuple

    def exponents(self, p: ConfluentParams):
        """(tau, nu, mu, delta) for the given parameters."""
        tau, nu, mu = (1.0 - dk if f else 0.0 for f, dk in zip(self.flags, p.d))
        return (tau, nu, mu, 0.0)


BRANCHES = {
    1: BranchSpec(1, (False, False, False)),
    2: BranchSpec(2, (True, False, False)),
    3: BranchSpec(3, (False, True, False)),
    4: BranchSpec(4, (False, False, True)),
    5: BranchSpec(5, (True, True, False)),
    6: BranchSpec(6, (True, False, True)),
    7: BranchSpec(7, (False, True, True)),
    8: BranchSpec(8, (True, True, True)),
}


def branch_spec(index) -> BranchSpec:
    try:
        return BRANCHES[int(index)]
    except (KeyError, ValueError, TypeError):
        raise DomainError(f"branch index must be 1..8, got {index}") from None


def branch_params(spec: BranchSpec, p: ConfluentParams) -> ConfluentParams:
    """Shifted parameters of the H0 factor in branch ``spec``.

    Each flagged variable k contributes a -> a + 1 - d_k, b_k -> b_k + 1 - d_k
    and d_k -> 2 - d_k.
    """
    a = p.a
    b = list(p.b)
    d = list(p.d)
    for k, f in enumerate(spec.flags):
        if f:
            a += 1.0 - p.d[k]
            b[k] = p.b[k] + 1.0 - p.d[k]
            d[k] = 2.0 - p.d[k]
    return ConfluentParams(a, tuple(b), tuple(d))


def coefficient_A(s, q) -> Fraction:
    """Weight A(s, q): 1 for s = q = 0 and q/s for s >= 1."""
    if int(s) != s or int(q) != q or s < 0 or q < 0 or q > s:
        raise DomainError(f"coefficient_A needs integers 0 <= q <= s, got s={s}, q={q}")
    s, q = int(s), int(q)
    if s == 0:
        return Fraction(1)
    return Fraction(q, s)


# ---------------------------------------------------------------------------
# direct series
# ---------------------------------------------------------------------------


def _variable_coefficients(b, d, x, n):
    """(b)_m x^m / (d)_m for m = 0..n, by iterated products."""
    out = np.empty(n + 1)
    out[0] = 1.0
    for m in range(n):
        out[m + 1] = out[m] * (b + m) / (d + m) * x
    return out


@functools.lru_cache(maxsize=8)
def _binomial_table(n):
    """Lower-triangular C(M, m) for 0 <= m <= M <= n."""
    M = np.arange(n + 1)[:, None]
    m = np.arange(n + 1)[None, :]
    return np.where(m <= M, special.comb(M, m), 0.0)


def _binomial_convolve(u, v, n):
    """w_M = sum_m C(M, m) u_m v_{M-m} for M = 0..n."""
    M = np.arange(n + 1)[:, None]
    m = np.arange(n + 1)[None, :]
    vshift = np.where(m <= M, v[np.clip(M - m, 0, n)], 0.0)
    return (_binomial_table(n) * vshift) @ u[: n + 1]


def _degree_sums(b, d, xyz, n):
    """S_M = M! * sum_{m+n+k=M} prod_k (b_k)_{m_k} x_k^{m_k} / ((d_k)_{m_k} m_k!)."""
    u = [_variable_coefficients(bk, dk, xk, n) for bk, dk, xk in zip(b, d, xyz)]
    return _binomial_convolve(_binomial_convolve(u[0], u[1], n), u[2], n)


def _a_over_factorial(a, n):
    """(a)_M / M! for M = 0..n, by iterated products."""
    out = np.empty(n + 1)
    out[0] = 1.0
    for M in range(n):
        out[M + 1] = out[M] * (a + M) / (M + 1.0)
    return out


def _sum_by_degree(terms, rel_tol, ratio_bound):
    """Apply the three-consecutive-small-terms rule to a degree sequence.

    Returns ``(value, level, tail, converged)``.
    """
    acc = 0.0
    comp = 0.0
    abs_sum = 0.0
    quiet = 0
    for M, t in enumerate(terms):
        t = float(t)
        s = acc + t
        comp += (acc - s) + t if abs(acc) >= abs(t) else (t - s) + acc
        acc = s
        abs_sum += abs(t)
        quiet = quiet + 1 if abs(t) < rel_tol * abs_sum else 0
        if quiet >= 3:
            rho = min(ratio_bound, 0.99)
            return acc + comp, M, abs(t) * rho / (1.0 - rho), True
    return acc + comp, len(terms) - 1, abs(float(terms[-1])) if len(terms) else 0.0, False


def _check_direct_domain(args: QuadArgs):
    if not args.l1 < 1.0:
        raise DomainError(f"direct series needs |x|+|y|+|z| < 1, got {args.l1}")


def _is_positive_integer(v):
    return v > 0 and v == math.floor(v)


def _t_factor_confluent(a, t, n, rel_tol, max_terms):
    """g_M = (a)_M/M! * 0F1(1-a-M; -t), i.e. sum_l (a)_{M-l} t^l / l! / M!."""
    M = np.arange(n + 1)
    pref = _a_over_factorial(a, n)
    if t == 0.0:
        return pref
    if a == math.floor(a):
        if a > 0:
            raise DomainError(f"(a)_(M-l) has poles for positive integer a={a} when t != 0")
        # a a nonpositive integer: 0F1 parameter hits poles, sum l directly
        out = np.empty(n + 1)
        for Mi in range(n + 1):
            acc, term_t = 0.0, 1.0
            for l in range(max_terms):
                if l > 0:
                    term_t *= t / l
                c = pochhammer(a, Mi - l)
                acc += c * term_t
                if l > Mi and abs(term_t) < rel_tol * abs(acc) * 1e-3:
                    break
            out[Mi] = acc / math.factorial(Mi) if Mi < 170 else acc * math.exp(-special.gammaln(Mi + 1))
        return out
    f = hyp0f1_array(1.0 - a - M, -t, rel_tol=rel_tol * 1e-2, max_terms=max_terms)
    if not np.all(np.isfinite(f)):
        raise ConvergenceError("0F1 factor did not converge")
    return pref * f


def _t_factor_gauss(a, b4, c4, t, n, rel_tol, max_terms):
    """(a)_M/M! * sum_l (b4)_l (c4)_l (-t)^l / ((1-a-M)_l l!)."""
    pref = _a_over_factorial(a, n)
    if t == 0.0:
        return pref
    if a == math.floor(a) and a > 0:
        raise DomainError(f"(a)_(M-l) has poles for positive integer a={a} when t != 0")
    from .hyperseries import _direct_2f1

    M = np.arange(n + 1, dtype=float)
    c = 1.0 - a - M
    v, _, _, _, conv = _direct_2f1(np.full(n + 1, b4), np.full(n + 1, c4), c, np.full(n + 1, -t),
                                   rel_tol * 1e-2, max_terms)
    if not np.all(conv):
        raise ConvergenceError("t-series of H4,3 did not converge")
    return pref * v


def _direct_degree_series(a, b, d, xyz, tfac, opts, what):
    l1 = sum(abs(v) for v in xyz)
    n = int(opts.max_level)
    S = _degree_sums(b, d, xyz, n)
    g = tfac(n)
    terms = S * g
    value, level, tail, ok = _sum_by_degree(terms, opts.rel_tol, l1)
    if not ok or not math.isfinite(value):
        raise ConvergenceError(f"{what} did not converge by degree {n}")
    return EvalResult(float(value), int(level), float(tail), Path.DIRECT)


def h43(p: H43Params, args: QuadArgs, opts: SeriesOptions | None = None) -> EvalResult:
    """H_{4,3}(a, b1, b2, b3, b4, c4; d1, d2, d3; x, y, z, t) by direct summation.

    Valid for |x|+|y|+|z| < 1 and |t| < 1/(1+|x|+|y|+|z|).
    """
    opts = opts or DEFAULT_OPTIONS
    _check_direct_domain(args)
    if not abs(args.t) < 1.0 / (1.0 + args.l1):
        raise DomainError("H4,3 needs |t| < 1/(1+|x|+|y|+|z|)")
    b1, b2, b3, b4 = p.b

    def tfac(n):
        return _t_factor_gauss(p.a, b4, p.c4, args.t, n, opts.rel_tol, opts.max_terms)

    return _direct_degree_series(p.a, (b1, b2, b3), p.d, args.xyz, tfac, opts, "H4,3")


def h43_0_direct(p: ConfluentParams, args: QuadArgs, opts: SeriesOptions | None = None) -> EvalResult:
    """H0_{4,3}(a, b1, b2, b3; d1, d2, d3; x, y, z, t) by direct summation.

    Needs |x|+|y|+|z| < 1; t is unrestricted (the t series is entire).
    """
    opts = opts or DEFAULT_OPTIONS
    _check_direct_domain(args)

    def tfac(n):
        return _t_factor_confluent(p.a, args.t, n, opts.rel_tol, opts.max_terms)

    return _direct_degree_series(p.a, p.b, p.d, args.xyz, tfac, opts, "H0_4,3")


def lauricella_fa3(a, b: Sequence[float], d: Sequence[float], x, y, z,
                   opts: SeriesOptions | None = None) -> EvalResult:
    """Lauricella F_A in three variables, for |x|+|y|+|z| < 1."""
    opts = opts or DEFAULT_OPTIONS
    b = tuple(float(v) for v in b)
    d = tuple(float(v) for v in d)
    _check_denominators(d)
    args = QuadArgs(x, y, z, 0.0)
    _check_direct_domain(args)
    a = float(a)

    def tfac(n):
        return _a_over_factorial(a, n)

    return _direct_degree_series(a, b, d, args.xyz, tfac, opts, "F_A")


# ---------------------------------------------------------------------------
# expansions in Gauss functions
# ---------------------------------------------------------------------------


def fa3_decomposed(a, b: Sequence[float], d: Sequence[float], x, y, z,
                   opts: SeriesOptions | None = None) -> EvalResult:
    """F_A in three variables as a triple sum of products of three Gauss functions.

    sum_{l,m,n} (a)_{l+m+n} (b1)_{l+m} (b2)_{l+n} (b3)_{m+n}
        / ((d1)_{l+m} (d2)_{l+n} (d3)_{m+n} l! m! n!) x^{l+m} y^{l+n} z^{m+n}
        F(a+l+m, b1+l+m; d1+l+m; x) F(a+l+m+n, b2+l+n; d2+l+n; y)
        F(a+l+m+n, b3+m+n; d3+m+n; z)
    """
    opts = opts or DEFAULT_OPTIONS
    p = ConfluentParams(a, tuple(b), tuple(d))
    args = QuadArgs(x, y, z, 0.0)
    for v in args.xyz:
        if not v < 1:
            raise DomainError("Gauss factors need x, y, z < 1")
    return _expansion.evaluate(p, args, opts, mode="raw", confluent=False)


def h43_0_expanded(p: ConfluentParams, args: QuadArgs, opts: SeriesOptions | None = None,
                   fixed_level: int | None = None) -> EvalResult:
    """H0_{4,3} from its expansion in Gauss functions of x, y, z and 0F1 of t.

    ``fixed_level`` sums every term with l+m+n+s <= fixed_level instead of
    applying the stopping rule.
    """
    opts = opts or DEFAULT_OPTIONS
    if not args.l1 < 1.0:
        raise DomainError(f"expanded form needs |x|+|y|+|z| < 1, got {args.l1}")
    return _expansion.evaluate(p, args, opts, mode="raw", confluent=True, fixed_level=fixed_level)


def h43_0_regularized(p: ConfluentParams, args: QuadArgs, opts: SeriesOptions | None = None,
                      fixed_level: int | None = None) -> EvalResult:
    """H0_{4,3} from the expansion with Gauss functions of x/(x-1), y/(y-1), z/(z-1).

    Valid for x, y, z < 1, in particular for large negative arguments, but
    the terms decay roughly like X^(L/3) with X = max x/(x-1), so the number
    of levels grows like 1/(1-X) = 1-x.  ``fixed_level`` sums every term with
    l+m+n+s <= fixed_level instead of applying the stopping rule.
    """
    opts = opts or DEFAULT_OPTIONS
    for v in args.xyz:
        if not v < 1:
            raise DomainError(f"regularized form needs x, y, z < 1, got {args.xyz}")
    return _expansion.evaluate(p, args, opts, mode="transformed", confluent=True, fixed_level=fixed_level)


def _laplace_fa3(a, b, d, xyz, rel_tol, s=0.0):
    """Gamma(a)^-1 int_0^inf e^(-w - s/w) w^(a-1) prod_k 1F1(b_k; d_k; x_k w) dw, s >= 0.

    Quadrature in log w on unit panels.  For s = 0 (needs a > 0) the piece
    w < w0 uses the quadratic Taylor polynomial of the integrand; for s > 0
    the factor e^(-s/w) cuts the range off below w = s/L.  Returns
    (value, error estimate).
    """
    x = np.asarray(xyz, dtype=float)
    b = np.asarray(b, dtype=float)
    d = np.asarray(d, dtype=float)
    growth = float(np.sum(np.maximum(x, 0.0)))
    scale = max(1.0, float(np.max(np.abs(x))))
    if s > 0:
        head = 0.0
        w0 = s / (60.0 + 2.0 * abs(a))
    else:
        w0 = 1e-5 / scale
        beta = b * x / d
        gamma = b * (b + 1.0) * x**2 / (2.0 * d * (d + 1.0))
        c1 = beta.sum() - 1.0
        c2 = gamma.sum() + (beta.sum() ** 2 - (beta**2).sum()) / 2.0 - beta.sum() + 0.5
        head = w0**a * (1.0 / a + c1 * w0 / (a + 1.0) + c2 * w0**2 / (a + 2.0))

    w_hi = (50.0 + 2.0 * abs(a) + 2.0 * math.log(scale)) / (1.0 - growth)
    u0, u1 = math.log(w0), math.log(max(w_hi, 2.0 * w0))
    edges = np.linspace(u0, u1, int(math.ceil(u1 - u0)) + 1)

    def quad(nodes):
        gx, gw = np.polynomial.legendre.leggauss(nodes)
        half = 0.5 * np.diff(edges)
        mid = 0.5 * (edges[1:] + edges[:-1])
        w = np.exp((mid[:, None] + half[:, None] * gx).ravel())
        f = np.exp(-w - s / w + a * np.log(w))
        for bk, dk, xk in zip(b, d, x):
            f = f * special.hyp1f1(bk, dk, xk * w)
        return float(np.sum((half[:, None] * gw).ravel() * f))

    fine, coarse = quad(24), quad(12)
    norm = math.exp(-special.gammaln(a)) * special.gammasgn(a)
    value = (head + fine) * norm
    return value, abs(fine - coarse) * abs(norm) + abs(head * norm) * 1e-15


def _bessel_part(a, b, d, xyz, s, opts):
    """Gamma(1-a) s^a / Gamma(1+a) * sum_M C_M(-s x) 0F1(1+a+M; s) / (1+a)_M,

    C_M(x) = sum_{m+n+k=M} prod (b)_m x^m / ((d)_m m!).  This is the part of
    H0 at t = -s < 0 that the Laplace integral with weight e^(-s/w) misses.
    Returns (value, tail, level).
    """
    v = tuple(-s * xk for xk in xyz)
    n = 32
    while True:
        u = [_variable_coefficients(bk, dk, vk, n) / np.exp(special.gammaln(np.arange(n + 1) + 1.0))
             for bk, dk, vk in zip(b, d, v)]
        C = np.convolve(np.convolve(u[0], u[1])[: n + 1], u[2])[: n + 1]
        inv = np.empty(n + 1)
        inv[0] = 1.0
        for M in range(n):
            inv[M + 1] = inv[M] / (1.0 + a + M)
        f = hyp0f1_array(1.0 + a + np.arange(n + 1), s, rel_tol=opts.rel_tol * 1e-2,
                         max_terms=opts.max_terms)
        if not np.all(np.isfinite(f)):
            raise ConvergenceError("0F1 factor did not converge")
        value, level, tail, ok = _sum_by_degree(C * inv * f, opts.rel_tol, 0.5)
        if ok:
            break
        if n >= opts.max_level:
            raise ConvergenceError(f"Bessel part did not converge by degree {n}")
        n = min(2 * n, opts.max_level)
    log_pre = special.gammaln(1.0 - a) + a * math.log(s) - special.gammaln(1.0 + a)
    pre = float(special.gammasgn(1.0 - a) * special.gammasgn(1.0 + a) * np.exp(log_pre))
    return pre * value, abs(pre) * tail, level


def h43_0_integral(p: ConfluentParams, args: QuadArgs, opts: SeriesOptions | None = None) -> EvalResult:
    """H0_{4,3} for t <= 0 from a Laplace integral of three 1F1 factors.

    At t = 0, H0 is the Lauricella function F_A and equals
    Gamma(a)^-1 int_0^inf e^-w w^(a-1) prod_k 1F1(b_k; d_k; x_k w) dw (a > 0).
    For t = -s < 0 the t-factor splits as
        Gamma(a+M) 0F1(1-a-M; s) = int_0^inf e^(-w-s/w) w^(a+M-1) dw
            + pi s^(a+M) 0F1(1+a+M; s) / (sin((a+M) pi) Gamma(1+a+M)),
    so H0 is the integral with the extra weight e^(-s/w) plus a series in
    s x, s y, s z (see ``_bessel_part``); a must not be an integer.
    Needs x+ + y+ + z+ < 1 (positive parts).  Accuracy does not depend on how
    large the negative arguments are, so this path covers the neighbourhood
    of the singular point of the fundamental solutions.
    """
    opts = opts or DEFAULT_OPTIONS
    t = float(args.t)
    if t > 0.0:
        raise DomainError("integral path needs t <= 0")
    if t == 0.0 and not p.a > 0:
        raise DomainError(f"integral path at t = 0 needs a > 0, got {p.a}")
    if t < 0.0 and p.a == math.floor(p.a):
        raise DomainError(f"integral path at t < 0 needs non-integer a, got {p.a}")
    if not sum(max(v, 0.0) for v in args.xyz) < 1.0:
        raise DomainError("integral path needs the positive parts of x, y, z to sum below 1")
    value, err = _laplace_fa3(p.a, p.b, p.d, args.xyz, opts.rel_tol, s=-t)
    level = 0
    scale = abs(value)
    if t < 0.0:
        extra, tail, level = _bessel_part(p.a, p.b, p.d, args.xyz, -t, opts)
        scale = max(scale, abs(extra))
        value += extra
        err += tail + 1e-15 * abs(extra)
    if not math.isfinite(value):
        raise ConvergenceError("Laplace integral overflowed")
    if err > max(1e-10, 100 * opts.rel_tol) * max(abs(value), 1e-300):
        raise ConvergenceError(f"Laplace quadrature error estimate {err:.2e} too large "
                               f"(cancellation scale {scale:.2e})")
    return EvalResult(float(value), int(level), float(err), Path.INTEGRAL)


def _auto_path(p: ConfluentParams, args: QuadArgs) -> str:
    if args.l1 <= DIRECT_RADIUS:
        return "direct"
    if sum(max(v, 0.0) for v in args.xyz) < 1.0:
        if (args.t == 0.0 and p.a > 0) or (args.t < 0.0 and p.a != math.floor(p.a)):
            return "integral"
    return "regularized"


_PATHS = {
    "direct": h43_0_direct,
    "expanded": h43_0_expanded,
    "regularized": h43_0_regularized,
    "integral": h43_0_integral,
}


def h43_0(p: ConfluentParams, args: QuadArgs, opts: SeriesOptions | None = None,
          path: str = "auto") -> EvalResult:
    """H0_{4,3} by the requested path: "direct", "expanded", "regularized",
    "integral" or "auto".

    "auto" sums the power series when |x|+|y|+|z| <= DIRECT_RADIUS.  Beyond
    that it uses the integral when t <= 0 (the regularized lattice sum
    decays only like X^(L/3) with X = x/(x-1), which is slow for large |x|),
    and the regularized expansion for t > 0.
    """
    if path == "auto":
        path = _auto_path(p, args)
    try:
        fn = _PATHS[path]
    except KeyError:
        raise DomainError(f"unknown evaluation path {path!r}") from None
    return fn(p, args, opts)


def omega_branch(spec: BranchSpec, p: ConfluentParams, args: QuadArgs,
                 opts: SeriesOptions | None = None, path: str = "auto",
                 abs_powers: bool = False) -> EvalResult:
    """Branch solution x^tau y^nu z^mu H0(shifted parameters; x, y, z, t).

    Powers need positive arguments; with ``abs_powers`` they act on |x|, |y|,
    |z| instead, which is again a solution (it differs by a constant factor).
    """
    tau, nu, mu, _ = spec.exponents(p)
    scale = 1.0
    for e, v in zip((tau, nu, mu), args.xyz):
        if e == 0.0:
            continue
        if v <= 0 and not abs_powers:
            raise DomainError("branch power needs a positive argument")
        if v == 0:
            raise DomainError("branch power at a zero argument")
        scale *= abs(v) ** e
    res = h43_0(branch_params(spec, p), args, opts, path)
    return EvalResult(scale * res.value, res.level_used, scale * res.tail_estimate, res.path)
