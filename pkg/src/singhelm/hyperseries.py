"""
Scalar special-function kernels.

Signed-index Pochhammer symbols, the Gauss function 2F1 on the real line
below 1 and the confluent limit 0F1.  Every series is summed with
compensated accumulation and stopped by the same tail rule: the current
term must stay below ``rel_tol`` times the running absolute sum for three
consecutive terms.

The array kernels (``hyp2f1_array``, ``hyp0f1_array``) evaluate many
parameter sets at once and are what the multivariable evaluators use for
their tables of Gauss functions.  The scalar entry points wrap them and
report diagnostics in an :class:`EvalResult`.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import ConvergenceError, DomainError

__all__ = [
    "SeriesOptions",
    "EvalResult",
    "Path",
    "DomainError",
    "ConvergenceError",
    "pochhammer",
    "gauss_2f1",
    "gauss_closed_form",
    "hyp_0f1",
    "hyp2f1_array",
    "hyp0f1_array",
    "CompensatedSum",
]

# Arguments of 2F1 up to this value are summed directly; beyond it the
# connection formula in 1-x takes over.
SAFE_RADIUS = 0.5

# |c-a-b - m| below this is treated as the integer case m of the connection
# formula (logarithmic branch).
INTEGER_TOL = 1e-9

# Numerator parameters this close to 0, -1, -2, ... are summed directly.
NEAR_POLY_TOL = 1e-6

# Ratio of absolute sum to value above which a direct series is considered
# cancellation dominated and the Euler form is tried instead.
CANCELLATION_LIMIT = 1e4

# Below -BESSEL_THRESHOLD, 0F1 with a > 0 goes through Bessel J.
BESSEL_THRESHOLD = 25.0


class Path(str, enum.Enum):
    """Which representation produced a value."""

    DIRECT = "DirectSeries"
    DECOMPOSITION = "Decomposition"
    TRANSFORMED = "Transformed"
    CONNECTION = "Connection"
    CLOSED_FORM = "ClosedForm"
    INTEGRAL = "Integral"


@dataclass(frozen=True)
class SeriesOptions:
    """Truncation policy shared by all series evaluators.

    Attributes
    ----------
    rel_tol : float
        Relative tail tolerance, strictly between 0 and 1.
    max_level : int
        Largest total degree (sum of all summation indices) a multivariable
        evaluator may reach.
    max_terms : int
        Hard cap on the number of terms of any single one-dimensional series.
    """

    rel_tol: float = 1e-14
    max_level: int = 200
    max_terms: int = 20000

    def __post_init__(self):
        if not (0.0 < self.rel_tol < 1.0):
            raise DomainError(f"rel_tol must lie in (0, 1), got {self.rel_tol}")
        if int(self.max_level) != self.max_level or self.max_level < 1:
            raise DomainError(f"max_level must be an integer >= 1, got {self.max_level}")
        if int(self.max_terms) != self.max_terms or self.max_terms < 1:
            raise DomainError(f"max_terms must be an integer >= 1, got {self.max_terms}")


DEFAULT_OPTIONS = SeriesOptions()


@dataclass(frozen=True)
class EvalResult:
    """A value together with how it was obtained.

    ``level_used`` is the degree at which truncation fired, ``tail_estimate``
    an estimate of the absolute size of the neglected tail.
    """

    value: float
    level_used: int
    tail_estimate: float
    path: Path

    def __post_init__(self):
        if not self.tail_estimate >= 0:
            raise ValueError("tail_estimate must be nonnegative")

    def __float__(self):
        return float(self.value)


class CompensatedSum:
    """Neumaier running sum that also tracks the sum of absolute values."""

    __slots__ = ("total", "comp", "abs_total")

    def __init__(self):
        self.total = 0.0
        self.comp = 0.0
        self.abs_total = 0.0

    def add(self, v):
        v = float(v)
        t = self.total + v
        if abs(self.total) >= abs(v):
            self.comp += (self.total - t) + v
        else:
            self.comp += (v - t) + self.total
        self.total = t
        self.abs_total += abs(v)

    def add_many(self, values):
        values = np.asarray(values, dtype=float).ravel()
        if values.size == 0:
            return
        self.add(math.fsum(values))
        self.abs_total += float(np.abs(values).sum()) - abs(math.fsum(values))

    @property
    def value(self):
        return self.total + self.comp


def _is_nonpositive_integer(v):
    v = np.asarray(v, dtype=float)
    return (v <= 0) & (v == np.floor(v))


def _near_nonpositive_integer(v):
    """True within NEAR_POLY_TOL of 0, -1, -2, ... (series almost terminates)."""
    v = np.asarray(v, dtype=float)
    return (v < 0.5) & (np.abs(v - np.rint(v)) < NEAR_POLY_TOL)


def log_gamma_sign(v):
    """Return ``(log|Gamma(v)|, sign Gamma(v))`` with sign 0 at the poles."""
    v = np.asarray(v, dtype=float)
    lg = special.gammaln(v)
    sg = np.where(_is_nonpositive_integer(v), 0.0, special.gammasgn(v))
    return lg, sg


def pochhammer(a, m):
    """Signed-index Pochhammer symbol ``(a)_m = Gamma(a+m)/Gamma(a)``.

    Computed by iterated products for ``m >= 0`` and by iterated division for
    ``m < 0``, where ``(a)_{-n} = 1/((a-1)(a-2)...(a-n))``.

    Raises
    ------
    DomainError
        If ``m < 0`` and one of the factors ``a-1, ..., a+m`` vanishes.
    """
    if int(m) != m:
        raise DomainError(f"Pochhammer index must be an integer, got {m}")
    m = int(m)
    a = float(a)
    out = 1.0
    if m >= 0:
        for j in range(m):
            out *= a + j
        return out
    for j in range(1, -m + 1):
        f = a - j
        if f == 0.0:
            raise DomainError(f"(a)_m has a pole: a={a}, m={m}")
        out /= f
    return out


# ---------------------------------------------------------------------------
# array series kernels
# ---------------------------------------------------------------------------


def _sum_series(ratio, shape, rel_tol, max_terms, n_start=0):
    """Sum ``sum_n t_n`` with ``t_0 = 1`` and ``t_{n+1} = t_n * ratio(n, idx)``.

    ``ratio(n, idx)`` returns the term ratio for the flat element indices
    ``idx``.  Returns ``(value, abs_sum, terms_used, tail, converged)``.
    """
    size = int(np.prod(shape)) if shape else 1
    total = np.ones(size)
    comp = np.zeros(size)
    abs_sum = np.ones(size)
    term = np.ones(size)
    quiet = np.zeros(size, dtype=np.int64)
    used = np.zeros(size, dtype=np.int64)
    tail = np.zeros(size)
    converged = np.zeros(size, dtype=bool)
    idx = np.arange(size)
    for n in range(n_start, n_start + max_terms):
        if idx.size == 0:
            break
        r = ratio(n, idx)
        t = term[idx] * r
        s = total[idx]
        u = s + t
        comp[idx] += np.where(np.abs(s) >= np.abs(t), (s - u) + t, (t - u) + s)
        total[idx] = u
        a_new = abs_sum[idx] + np.abs(t)
        abs_sum[idx] = a_new
        term[idx] = t
        small = np.abs(t) < rel_tol * a_new
        q = np.where(small, quiet[idx] + 1, 0)
        quiet[idx] = q
        done = q >= 3
        if np.any(done):
            d = idx[done]
            rho = np.abs(r[done])
            used[d] = n + 1 - n_start
            with np.errstate(invalid="ignore"):
                tail[d] = np.where(rho < 0.9, np.abs(t[done]) * rho / (1.0 - rho), np.abs(t[done]) * 10.0)
            converged[d] = True
            idx = idx[~done]
    if idx.size:
        used[idx] = max_terms
        tail[idx] = np.abs(term[idx])
    value = total + comp
    return (value.reshape(shape), abs_sum.reshape(shape), used.reshape(shape),
            tail.reshape(shape), converged.reshape(shape))


def _direct_2f1(a, b, c, x, rel_tol, max_terms):
    a, b, c, x = (np.ravel(v) for v in (a, b, c, x))

    def ratio(n, i):
        return (a[i] + n) * (b[i] + n) / ((c[i] + n) * (n + 1.0)) * x[i]

    return _sum_series(ratio, a.shape, rel_tol, max_terms)


def _logpow(base, expo):
    """``expo * log(base)`` with the convention ``0 * log(0) = 0``."""
    with np.errstate(divide="ignore", invalid="ignore"):
        out = expo * np.log(base)
    return np.where(expo == 0, 0.0, out)


def _connection_2f1(a, b, c, xc, rel_tol, max_terms):
    """2F1(a,b;c;1-xc) for 0 < xc < 1 and c-a-b > 0 via the 1-x connection formula."""
    a, b, c, xc = (np.ravel(np.asarray(v, dtype=float)) for v in (a, b, c, xc))
    s = c - a - b
    m = np.rint(s)
    degenerate = np.abs(s - m) < INTEGER_TOL
    value = np.full(a.shape, np.nan)
    tail = np.zeros(a.shape)
    used = np.zeros(a.shape, dtype=np.int64)
    ok = np.ones(a.shape, dtype=bool)
    logxc = np.log(xc)

    g = ~degenerate
    if np.any(g):
        ag, bg, cg, sg, xg, lxg = a[g], b[g], c[g], s[g], xc[g], logxc[g]
        lc, sc = log_gamma_sign(cg)
        l1, s1 = log_gamma_sign(sg)
        l2, s2 = log_gamma_sign(cg - ag)
        l3, s3 = log_gamma_sign(cg - bg)
        coef1 = sc * s1 * s2 * s3 * np.exp(np.where(s2 * s3 == 0, -np.inf, lc + l1 - l2 - l3))
        l4, s4 = log_gamma_sign(-sg)
        l5, s5 = log_gamma_sign(ag)
        l6, s6 = log_gamma_sign(bg)
        coef2 = sc * s4 * s5 * s6 * np.exp(np.where(s5 * s6 == 0, -np.inf, lc + l4 - l5 - l6 + sg * lxg))
        f1, _, u1, t1, c1 = _direct_2f1(ag, bg, 1.0 - sg, xg, rel_tol, max_terms)
        f2, _, u2, t2, c2 = _direct_2f1(cg - ag, cg - bg, 1.0 + sg, xg, rel_tol, max_terms)
        value[g] = coef1 * f1 + coef2 * f2
        tail[g] = np.abs(coef1) * t1 + np.abs(coef2) * t2
        used[g] = np.maximum(u1, u2)
        ok[g] = c1 & c2

    d = degenerate
    if np.any(d):
        v, t, u, c_ok = _connection_integer(a[d], b[d], m[d].astype(np.int64), xc[d], logxc[d],
                                            rel_tol, max_terms)
        value[d], tail[d], used[d], ok[d] = v, t, u, c_ok
    return value, tail, used, ok


def _connection_integer(a, b, m, xc, logxc, rel_tol, max_terms):
    """Connection formula when c = a + b + m with m a nonnegative integer."""
    c = a + b + m
    lc, sc = log_gamma_sign(c)
    # finite part: Gamma(m)Gamma(c)/(Gamma(a+m)Gamma(b+m)) sum_{k<m} (a)_k(b)_k/(k!(1-m)_k) xc^k
    finite = np.zeros(a.shape)
    mmax = int(m.max()) if m.size else 0
    if mmax > 0:
        pos = m > 0
        lm = special.gammaln(np.maximum(m, 1).astype(float))
        la, sa = log_gamma_sign(a + m)
        lb, sb = log_gamma_sign(b + m)
        coef = np.where(pos, sc * sa * sb * np.exp(np.where(sa * sb == 0, -np.inf, lm + lc - la - lb)), 0.0)
        acc = np.zeros(a.shape)
        term = np.ones(a.shape)
        for k in range(mmax):
            live = k < m
            acc = acc + np.where(live, term, 0.0)
            with np.errstate(divide="ignore", invalid="ignore"):
                nxt = term * (a + k) * (b + k) / ((1.0 - m + k) * (k + 1.0)) * xc
            term = np.where(k + 1 < m, nxt, 0.0)
        finite = coef * acc
    # logarithmic part:
    # -(-1)^m xc^m Gamma(c)/(Gamma(a)Gamma(b)) sum_k (a+m)_k(b+m)_k/(k!(k+m)!) xc^k
    #   * [log xc - psi(k+1) - psi(k+m+1) + psi(a+k+m) + psi(b+k+m)]
    la, sa = log_gamma_sign(a)
    lb, sb = log_gamma_sign(b)
    mf = m.astype(float)
    live = sa * sb != 0
    coef = np.zeros(a.shape)
    coef[live] = -((-1.0) ** mf[live]) * sc[live] * sa[live] * sb[live] * np.exp(
        lc[live] - la[live] - lb[live] - special.gammaln(mf[live] + 1.0) + mf[live] * logxc[live])
    series = np.zeros(a.shape)
    tail = np.zeros(a.shape)
    used = np.zeros(a.shape, dtype=np.int64)
    ok = np.ones(a.shape, dtype=bool)
    if np.any(live):
        al, bl, ml, xl, lxl = a[live], b[live], mf[live], xc[live], logxc[live]
        psi1 = np.full(al.shape, special.digamma(1.0))
        psi2 = special.digamma(ml + 1.0)
        psi3 = special.digamma(al + ml)
        psi4 = special.digamma(bl + ml)
        cterm = np.ones(al.shape)
        total = CompensatedArray(al.shape)
        quiet = np.zeros(al.shape, dtype=np.int64)
        done = np.zeros(al.shape, dtype=bool)
        nused = np.full(al.shape, max_terms, dtype=np.int64)
        last = np.zeros(al.shape)
        for k in range(max_terms):
            t = cterm * (lxl - psi1 - psi2 + psi3 + psi4)
            t = np.where(done, 0.0, t)
            total.add(t)
            small = np.abs(t) < rel_tol * total.abs_sum
            quiet = np.where(small, quiet + 1, 0)
            newly = (quiet >= 3) & ~done
            nused[newly] = k + 1
            last[newly] = np.abs(t[newly])
            done |= newly
            if done.all():
                break
            cterm = cterm * (al + ml + k) * (bl + ml + k) / ((k + 1.0) * (k + ml + 1.0)) * xl
            psi1 = psi1 + 1.0 / (k + 1.0)
            psi2 = psi2 + 1.0 / (k + ml + 1.0)
            psi3 = psi3 + 1.0 / (al + ml + k)
            psi4 = psi4 + 1.0 / (bl + ml + k)
        series[live] = total.value
        tail[live] = np.abs(coef[live]) * np.where(done, last * 10.0, np.abs(cterm))
        used[live] = nused
        ok[live] = done
    return finite + coef * series, tail, np.maximum(used, m), ok


class CompensatedArray:
    """Elementwise Neumaier accumulation for arrays of running sums."""

    def __init__(self, shape):
        self.total = np.zeros(shape)
        self.comp = np.zeros(shape)
        self.abs_sum = np.zeros(shape)

    def add(self, t):
        s = self.total
        u = s + t
        self.comp += np.where(np.abs(s) >= np.abs(t), (s - u) + t, (t - u) + s)
        self.total = u
        self.abs_sum = self.abs_sum + np.abs(t)

    @property
    def value(self):
        return self.total + self.comp


_DE_STEP = 1.0 / 16.0


def _integral_2f1(a, b, c, xc):
    """2F1(a,b;c;1-xc) from Euler's integral, for b > 0 and c - b > 0.

    With v = 1 - s the integrand is v^(c-b-1) (1-v)^(b-1) (xc + (1-xc) v)^(-a),
    positive on (0, 1), so no cancellation occurs however large b is.  The
    mass sits within v of order 1/b, so the range is cut where (1-v)^(b-1)
    has decayed below double precision, and a tanh-sinh rule absorbs the
    endpoint singularity at v = 0.
    """
    a, b, c, xc = (np.asarray(v, dtype=float)[:, None] for v in (a, b, c, xc))
    beta = c - b
    vmax = np.minimum(1.0, (80.0 + 3.0 * np.maximum(-a, 0.0)) / np.maximum(b - 1.0, 1e-300))
    # lower end must reach v with v^beta below double precision
    tmax = float(np.arcsinh(45.0 / (np.pi * max(float(beta.min()), 1e-3))))
    tmax = min(max(tmax, 4.0), 9.0)
    t = np.arange(-tmax, tmax + 0.5 * _DE_STEP, _DE_STEP)
    u = np.pi * np.sinh(t)
    log_frac = -np.logaddexp(0.0, -u)
    log_comp = -np.logaddexp(0.0, u)
    log_jac = np.log(np.pi * np.cosh(t)) + log_frac + log_comp + np.log(_DE_STEP)
    log_v = np.log(vmax) + log_frac
    v = np.exp(log_v)
    with np.errstate(divide="ignore", invalid="ignore"):
        log_f = ((beta - 1.0) * log_v + (b - 1.0) * np.log1p(-np.minimum(v, 1.0))
                 - a * np.log(xc + (1.0 - xc) * v))
        lg = special.gammaln(c) - special.gammaln(b) - special.gammaln(beta)
        out = np.exp(log_f + log_jac + np.log(vmax) + lg).sum(axis=1)
    return out


def _unit_2f1(a, b, c, x, xc, rel_tol, max_terms):
    """2F1 for 0 <= x < 1 with ``xc = 1 - x`` supplied to full precision."""
    value = np.full(a.shape, np.nan)
    tail = np.zeros(a.shape)
    used = np.zeros(a.shape, dtype=np.int64)
    ok = np.zeros(a.shape, dtype=bool)
    path = np.full(a.shape, 0, dtype=np.int8)  # 0 direct, 1 connection, 2 euler

    # near x = 1 with c-a-b < 0, Euler's transformation flips the sign of c-a-b
    # a (nearly) terminating series is summed directly: the connection
    # coefficients would cancel to all digits
    poly = _near_nonpositive_integer(a) | _near_nonpositive_integer(b)
    flip = (x > SAFE_RADIUS) & (c - a - b < 0) & ~poly
    flip_pre = np.exp(np.where(flip, _logpow(xc, c - a - b), 0.0))
    a, b = np.where(flip, c - a, a), np.where(flip, c - b, b)
    poly |= _near_nonpositive_integer(a) | _near_nonpositive_integer(b)

    near = (x > SAFE_RADIUS) & (c - a - b >= 0) & ~poly
    # The connection formula cancels like exp(b*(1-x)) for large b; Euler's
    # integral is used there instead (roles of a and b swapped if needed).
    int_b = near & (b > 0) & (c - b > 0) & (b * xc > 1.0)
    int_a = near & ~int_b & (a > 0) & (c - a > 0) & (a * xc > 1.0)
    if np.any(int_b):
        value[int_b] = _integral_2f1(a[int_b], b[int_b], c[int_b], xc[int_b])
    if np.any(int_a):
        value[int_a] = _integral_2f1(b[int_a], a[int_a], c[int_a], xc[int_a])
    integral = int_a | int_b
    ok[integral] = np.isfinite(value[integral])
    path[integral] = 5
    tail[integral] = np.abs(value[integral]) * 1e-13
    near &= ~integral
    direct = ~near & ~integral
    if np.any(direct):
        ad, bd, cd, xd, xcd = a[direct], b[direct], c[direct], x[direct], xc[direct]
        v, asum, u, t, conv = _direct_2f1(ad, bd, cd, xd, rel_tol, max_terms)
        with np.errstate(divide="ignore", invalid="ignore"):
            cond = asum / np.abs(v)
        retry = conv & ~(cond <= CANCELLATION_LIMIT)
        if np.any(retry):
            # Euler form (1-x)^(c-a-b) F(c-a, c-b; c; x)
            ar, br, cr, xr = ad[retry], bd[retry], cd[retry], xd[retry]
            pre = np.exp(_logpow(xcd[retry], cr - ar - br))
            v2, asum2, u2, t2, conv2 = _direct_2f1(cr - ar, cr - br, cr, xr, rel_tol, max_terms)
            with np.errstate(divide="ignore", invalid="ignore"):
                cond2 = asum2 / np.abs(v2)
            better = conv2 & (cond2 < cond[retry])
            sel = np.flatnonzero(retry)[better]
            v[sel] = pre[better] * v2[better]
            t[sel] = pre[better] * t2[better]
            u[sel] = u2[better]
            idx = np.flatnonzero(direct)[sel]
            path[idx] = 2
        value[direct], tail[direct], used[direct], ok[direct] = v, t, u, conv
    if np.any(near):
        v, t, u, conv = _connection_2f1(a[near], b[near], c[near], xc[near], rel_tol, max_terms)
        value[near], tail[near], used[near], ok[near] = v, t, u, conv
        path[near] = 1
    return flip_pre * value, flip_pre * tail, used, ok, path


def gauss_closed_form(a, b, c):
    """Gauss summation ``Gamma(c)Gamma(c-a-b)/(Gamma(c-a)Gamma(c-b))`` (needs c-a-b > 0)."""
    a, b, c = (np.asarray(v, dtype=float) for v in (a, b, c))
    lc, sc = log_gamma_sign(c)
    l1, s1 = log_gamma_sign(c - a - b)
    l2, s2 = log_gamma_sign(c - a)
    l3, s3 = log_gamma_sign(c - b)
    den = s2 * s3
    with np.errstate(invalid="ignore"):
        out = sc * s1 * den * np.exp(np.where(den == 0, -np.inf, lc + l1 - l2 - l3))
    return out


def _hyp2f1_full(a, b, c, x, xc, rel_tol, max_terms):
    shape = np.broadcast(a, b, c, x).shape
    a, b, c, x = (np.broadcast_to(np.asarray(v, dtype=float), shape).ravel().copy() for v in (a, b, c, x))
    if xc is None:
        xc = 1.0 - x
    else:
        xc = np.broadcast_to(np.asarray(xc, dtype=float), shape).ravel().copy()
    value = np.full(a.shape, np.nan)
    tail = np.zeros(a.shape)
    used = np.zeros(a.shape, dtype=np.int64)
    ok = np.zeros(a.shape, dtype=bool)
    path = np.zeros(a.shape, dtype=np.int8)

    bad_c = _is_nonpositive_integer(c)
    zero = (x == 0) & ~bad_c
    value[zero], ok[zero] = 1.0, True

    one = (x == 1) & ~bad_c
    if np.any(one):
        conv = c[one] - a[one] - b[one] > 0
        vals = gauss_closed_form(a[one], b[one], c[one])
        value[one] = np.where(conv, vals, np.nan)
        ok[one] = conv
        path[one] = 3

    unit = (x > 0) & (x < 1) & ~bad_c
    if np.any(unit):
        v, t, u, o, pth = _unit_2f1(a[unit], b[unit], c[unit], x[unit], xc[unit], rel_tol, max_terms)
        value[unit], tail[unit], used[unit], ok[unit], path[unit] = v, t, u, o, pth

    neg = (x < 0) & ~bad_c
    if np.any(neg):
        an, bn, cn, xn = a[neg], b[neg], c[neg], x[neg]
        w = -xn / (1.0 - xn)
        wc = 1.0 / (1.0 - xn)
        # F(a,b;c;x) = (1-x)^(-b) F(c-a, b; c; w); the roles of a and b are
        # swapped when that keeps the transformed c-a'-b' positive near w=1.
        swap = (w > SAFE_RADIUS) & (bn > an)
        # a nearly terminating numerator is the one kept untransformed
        na, nb = _near_nonpositive_integer(an), _near_nonpositive_integer(bn)
        a_closer = np.abs(an - np.rint(an)) < np.abs(bn - np.rint(bn))
        swap = np.where(na & (~nb | a_closer), True, np.where(nb, False, swap))
        first = np.where(swap, bn, an)
        second = np.where(swap, an, bn)
        pre = np.exp(_logpow(1.0 - xn, -second))
        v, t, u, o, _ = _unit_2f1(cn - first, second, cn, w, wc, rel_tol, max_terms)
        value[neg] = pre * v
        tail[neg] = pre * t
        used[neg], ok[neg] = u, o
        path[neg] = 4
    return (value.reshape(shape), tail.reshape(shape), used.reshape(shape),
            ok.reshape(shape), path.reshape(shape))


def hyp2f1_array(a, b, c, x, xc=None, rel_tol=1e-15, max_terms=20000):
    """Vectorized real 2F1(a, b; c; x) for x <= 1.

    ``xc`` may carry ``1 - x`` computed without cancellation (useful when x
    is within rounding of 1).  Entries that cannot be evaluated (poles in c,
    x > 1, divergent or unconverged series) are NaN.
    """
    value, *_ = _hyp2f1_full(a, b, c, x, xc, rel_tol, max_terms)
    return value


_PATH_CODES = {0: Path.DIRECT, 1: Path.CONNECTION, 2: Path.TRANSFORMED, 3: Path.CLOSED_FORM,
               4: Path.TRANSFORMED, 5: Path.INTEGRAL}


def gauss_2f1(a, b, c, x, opts: SeriesOptions | None = None) -> EvalResult:
    """Gauss hypergeometric function 2F1(a, b; c; x) for real x <= 1.

    Paths: direct series for 0 <= x <= 1/2 (with an Euler-form retry when the
    series cancels badly); the 1-x connection formula for 1/2 < x < 1 when
    c-a-b > 0; the Gauss summation formula at x = 1; and for x < 0 the
    transformation F(a,b;c;x) = (1-x)^(-b) F(c-a,b;c;x/(x-1)).

    Raises
    ------
    DomainError
        c a nonpositive integer, x > 1, or x = 1 with c-a-b <= 0.
    ConvergenceError
        The series did not meet the tail rule within ``opts.max_terms``
        (for instance x close to 1 with c-a-b <= 0).
    """
    opts = opts or DEFAULT_OPTIONS
    a, b, c, x = float(a), float(b), float(c), float(x)
    if _is_nonpositive_integer(c):
        raise DomainError(f"c must not be a nonpositive integer, got {c}")
    if x > 1 or not math.isfinite(x):
        raise DomainError(f"x must satisfy x <= 1, got {x}")
    if x == 1 and not c - a - b > 0:
        raise DomainError("2F1 at x=1 needs c-a-b > 0")
    value, tail, used, ok, path = _hyp2f1_full(a, b, c, x, None, opts.rel_tol, opts.max_terms)
    if not bool(ok) or not np.isfinite(value):
        raise ConvergenceError(f"2F1({a}, {b}; {c}; {x}) did not converge in {opts.max_terms} terms")
    level = min(int(used), opts.max_level)
    return EvalResult(float(value), level, float(tail), _PATH_CODES[int(path)])


def _direct_0f1(a, x, rel_tol, max_terms):
    a, x = (np.ravel(v) for v in (a, x))

    def ratio(n, i):
        return x[i] / ((a[i] + n) * (n + 1.0))

    return _sum_series(ratio, a.shape, rel_tol, max_terms)


def _bessel_0f1(a, x):
    """0F1(; a; x) = Gamma(a) z^(1-a) J_{a-1}(2z), z = sqrt(-x), for x < 0 and a > 0."""
    z = np.sqrt(-x)
    return np.exp(special.gammaln(a) + (1.0 - a) * np.log(z)) * special.jv(a - 1.0, 2.0 * z)


def _eval_0f1(a, x, rel_tol, max_terms):
    v, _, used, tail, conv = _direct_0f1(a, x, rel_tol, max_terms)
    # the power series cancels like exp(2 sqrt(-x)) for large negative x
    osc = (x < -BESSEL_THRESHOLD) & (a > 0)
    if np.any(osc):
        v[osc] = _bessel_0f1(a[osc], x[osc])
        tail[osc] = 1e-15 * np.exp(special.gammaln(a[osc]) + (0.5 - a[osc]) * np.log(np.sqrt(-x[osc])))
        used[osc], conv[osc] = 0, True
    return v, used, tail, conv


def hyp0f1_array(a, x, rel_tol=1e-15, max_terms=20000):
    """Vectorized 0F1(; a; x); NaN where ``a`` is a nonpositive integer."""
    shape = np.broadcast(a, x).shape
    a, x = (np.broadcast_to(np.asarray(v, dtype=float), shape).ravel().copy() for v in (a, x))
    with np.errstate(divide="ignore", invalid="ignore"):
        v, _, _, conv = _eval_0f1(a, x, rel_tol, max_terms)
    v = np.where(_is_nonpositive_integer(a) | ~conv, np.nan, v)
    return v.reshape(shape)


def hyp_0f1(a, x, opts: SeriesOptions | None = None) -> EvalResult:
    """Confluent limit function 0F1(; a; x) = sum_n x^n / ((a)_n n!).

    Raises
    ------
    DomainError
        ``a`` in {0, -1, -2, ...}.
    """
    opts = opts or DEFAULT_OPTIONS
    a, x = float(a), float(x)
    if _is_nonpositive_integer(a):
        raise DomainError(f"0F1 parameter must not be a nonpositive integer, got {a}")
    v, used, tail, conv = _eval_0f1(np.array([a]), np.array([x]), opts.rel_tol, opts.max_terms)
    if not conv[0]:
        raise ConvergenceError(f"0F1({a}; {x}) did not converge in {opts.max_terms} terms")
    return EvalResult(float(v[0]), min(int(used[0]), opts.max_level), float(tail[0]), Path.DIRECT)
