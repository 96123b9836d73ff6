"""
Layered summation of the Gauss-function expansions of H0_{4,3}.

Both expansions share one shape.  With L = l+m+n, e1 = i+l+m, e2 = j+l+n,
e3 = k+m+n and s = i+j+k,

    H0 = pre * sum_s g_s sum_{l,m,n} (a+s)_L / (l! m! n!)
             * s! sum_{i+j+k=s} prod_k P_k(e_k) F_k(u_k, e_k) / (i! j! k!)

where P_k(e) = (b_k)_e / (d_k)_e * X_k^e and g_s collects the t dependence.

* raw form: X_k = x_k, pre = 1, F_k(u, e) = F(a+u, b_k+e; d_k+e; x_k) with
  u1 = s+l+m and u2 = u3 = s+L, weight (-1)^s g_s.
* transformed form: X_k = x_k/(x_k-1), pre = prod (1-x_k)^(-b_k),
  F_k(u, e) = F(d_k-a-u, b_k+e; d_k+e; X_k) with u1 = s-i, u2 = s-j+m,
  u3 = s-k+l, weight g_s.

g_0 = 0F1(1-a; -t) and for s >= 1
g_s = sum_{q=1..s} C(s-1, q-1) (-t)^q / (q! (1-a)_q) 0F1(1-a+q; -t).

For fixed (s, l, m, n) the inner sum over i+j+k = s is a triple convolution,
so each layer s is summed shell by shell in L with vectorized convolutions.
At t = 0 only the layer s = 0 survives.  In the transformed form the terms
decay like X_k^L, so the number of shells needed grows like 1/(1-X_k); far
from the origin the lattice sum becomes too long and callers switch to the
integral representation in ``quadrivariate``.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import special

from .errors import ConvergenceError, DomainError
from .hyperseries import EvalResult, Path, hyp0f1_array, hyp2f1_array

# layers s above this overflow s! in the convolution weights
MAX_LAYER = 150
# shell cap for layers s >= 1
LAYER_SHELL_CAP = 120
STALL_WINDOW = 15


def _simplex(L):
    """All (l, m, n) with l+m+n = L."""
    l, m = np.meshgrid(np.arange(L + 1), np.arange(L + 1), indexing="ij")
    keep = l + m <= L
    l, m = l[keep], m[keep]
    return l, m, L - l - m


def _simplex_range(lo, hi):
    """All (l, m, n) with lo <= l+m+n <= hi."""
    parts = [_simplex(L) for L in range(lo, hi + 1)]
    return tuple(np.concatenate(c) for c in zip(*parts))


class _GaussTable:
    """Lazily filled table of F(A0 + sign*u, b+e; d+e; x) on integer (u, e)."""

    def __init__(self, A0, sign, b, d, x, xc):
        self.A0, self.sign, self.b, self.d, self.x, self.xc = A0, sign, b, d, x, xc
        self.data = np.full((32, 32), np.nan)

    def _grow(self, umax, emax):
        nu, ne = self.data.shape
        if umax < nu and emax < ne:
            return
        while nu <= umax:
            nu *= 2
        while ne <= emax:
            ne *= 2
        new = np.full((nu, ne), np.nan)
        new[: self.data.shape[0], : self.data.shape[1]] = self.data
        self.data = new

    def continuous(self, u, e):
        v = hyp2f1_array(self.A0 + self.sign * np.asarray(u, float), self.b + e, self.d + e,
                         self.x, self.xc)
        if not np.all(np.isfinite(v)):
            raise ConvergenceError("Gauss factor could not be evaluated")
        return v

    def __call__(self, u, e):
        u, e = np.broadcast_arrays(np.asarray(u, dtype=np.int64), np.asarray(e, dtype=np.int64))
        if u.size == 0:
            return np.zeros(u.shape)
        self._grow(int(u.max()), int(e.max()))
        vals = self.data[u, e]
        miss = np.isnan(vals)
        if np.any(miss):
            ncol = self.data.shape[1]
            uu, ee = np.divmod(np.unique(u[miss] * ncol + e[miss]), ncol)
            self.data[uu, ee] = self.continuous(uu, ee)
            vals = self.data[u, e]
        return vals


class _LogTable:
    """log|prod_{j<n} f(j)| and its sign for integer n, grown on demand."""

    def __init__(self, factor):
        self.factor = factor
        self.log = np.zeros(1)
        self.sign = np.ones(1)

    def __call__(self, n):
        n = np.asarray(n, dtype=np.int64)
        top = int(n.max()) if n.size else 0
        if top >= self.log.size:
            size = max(2 * self.log.size, top + 1)
            j = np.arange(self.log.size - 1, size - 1)
            f = self.factor(j)
            with np.errstate(divide="ignore"):
                lf = np.log(np.abs(f))
            self.log = np.concatenate([self.log, self.log[-1] + np.cumsum(lf)])
            self.sign = np.concatenate([self.sign, self.sign[-1] * np.cumprod(np.sign(f))])
        return self.log[n], self.sign[n]


class _Engine:
    def __init__(self, p, args, opts, mode):
        self.a = p.a
        self.b = p.b
        self.d = p.d
        self.opts = opts
        self.mode = mode
        self.tol = opts.rel_tol
        x = np.array(args.xyz, dtype=float)
        if mode == "transformed":
            self.X = x / (x - 1.0)
            self.delta = 1.0 / (1.0 - x)
            self.tables = [_GaussTable(dk - p.a, -1.0, bk, dk, Xk, ck)
                           for bk, dk, Xk, ck in zip(p.b, p.d, self.X, self.delta)]
        else:
            self.X = x
            self.delta = 1.0 - x
            self.tables = [_GaussTable(p.a, 1.0, bk, dk, xk, 1.0 - xk)
                           for bk, dk, xk in zip(p.b, p.d, x)]
        with np.errstate(divide="ignore"):
            self.logX = np.log(np.abs(self.X))
        self.signX = np.sign(self.X)
        self.P = [_LogTable(lambda j, bk=bk, dk=dk: (bk + j) / (dk + j)) for bk, dk in zip(p.b, p.d)]
        self.apoch = {}
        self.lfact = special.gammaln(np.arange(4096) + 1.0)

    # -- integer terms -----------------------------------------------------

    def _logfact(self, n):
        n = np.asarray(n)
        if n.size and n.max() >= self.lfact.size:
            self.lfact = special.gammaln(np.arange(2 * int(n.max()) + 2) + 1.0)
        return self.lfact[n]

    def _power(self, k, e):
        """P_k(e) on integer e."""
        lp, sp = self.P[k](e)
        with np.errstate(invalid="ignore"):
            lx = np.where(e == 0, 0.0, e * self.logX[k])
        if self.signX[k] < 0:
            sx = np.where(e % 2 == 1, -1.0, 1.0)
        else:
            sx = np.where(e == 0, 1.0, self.signX[k])
        return sp * sx, lp + lx

    def _apoch(self, s, L):
        if s not in self.apoch:
            a = self.a + s
            self.apoch[s] = _LogTable(lambda j, a=a: a + j)
        return self.apoch[s](L)

    def _factor(self, k, idx, e, u):
        sg, lg = self._power(k, e)
        return sg * np.exp(lg - self._logfact(idx)) * self.tables[k](u, e)

    def block(self, s, l, m, n):
        """Contribution of each triple (l, m, n) to layer s, without g_s."""
        L = l + m + n
        i = np.arange(s + 1)
        col = lambda v: v[:, None]
        e1 = i + col(l + m)
        e2 = i + col(l + n)
        e3 = i + col(m + n)
        if self.mode == "transformed":
            u1 = np.broadcast_to(s - i, e1.shape)
            u2 = s - i + col(m)
            u3 = s - i + col(l)
        else:
            u1 = np.broadcast_to(s + col(l + m), e1.shape)
            u2 = np.broadcast_to(s + col(L), e1.shape)
            u3 = u2
        A = self._factor(0, i, e1, u1)
        B = self._factor(1, i, e2, u2)
        C = self._factor(2, i, e3, u3)
        if s == 0:
            conv = A[:, 0] * B[:, 0] * C[:, 0]
        else:
            AB = np.zeros_like(A)
            for q in range(s + 1):
                AB[:, q:] += A[:, q:q + 1] * B[:, : s + 1 - q]
            conv = np.einsum("ij,ij->i", AB, C[:, ::-1])
        la, sa = self._apoch(s, L)
        lw = la - self._logfact(l) - self._logfact(m) - self._logfact(n) + self._logfact(s)
        return sa * np.exp(lw) * conv

    # -- layer sums ---------------------------------------------------------

    def shells(self, s, gs, scale, cap, start=8):
        """Sum layer s shell by shell; returns (value, tail, converged, level).

        Shells are evaluated in batches (one vectorized call per batch) and
        the sum stops after three consecutive negligible shells.
        """
        total = 0.0
        comp = 0.0
        quiet = 0
        prev = None
        lo = 0
        hi = min(cap, max(start, 4))
        while lo <= cap:
            l, m, n = _simplex_range(lo, hi)
            shell = np.bincount(l + m + n - lo, weights=self.block(s, l, m, n), minlength=hi - lo + 1)
            for L, v in zip(range(lo, hi + 1), shell * gs):
                v = float(v)
                y = total + v
                comp += (total - y) + v if abs(total) >= abs(v) else (v - y) + total
                total = y
                ref = max(abs(total + comp), scale)
                quiet = quiet + 1 if abs(v) <= self.tol * ref else 0
                if quiet >= 3:
                    rho = min(abs(v) / abs(prev), 0.9) if prev else 0.5
                    return total + comp, abs(v) * rho / (1.0 - rho), True, L
                prev = v if v != 0 else prev
            lo, hi = hi + 1, min(cap, hi + 4)
        return total + comp, abs(v), False, cap


def _t_weights(a, t, smax, rel_tol):
    """g_s for s = 0..smax."""
    g = np.zeros(smax + 1)
    g[0] = float(hyp0f1_array(1.0 - a, -t, rel_tol=rel_tol)) if t != 0 else 1.0
    if t == 0 or smax == 0:
        return g
    if a == math.floor(a) and a >= 1:
        raise DomainError(f"expansion in t needs a not a positive integer, got a={a}")
    q = np.arange(1, smax + 1)
    f = hyp0f1_array(1.0 - a + q, -t, rel_tol=rel_tol)
    h = np.empty(smax)
    c = 1.0
    for k in range(smax):
        c *= (-t) / ((k + 1.0) * (1.0 - a + k))
        h[k] = c * f[k]
    for s in range(1, smax + 1):
        qq = np.arange(1, s + 1)
        g[s] = np.dot(special.comb(s - 1, qq - 1), h[:s])
    return g


def evaluate(p, args, opts, mode, confluent, fixed_level=None):
    """Sum the raw ("raw") or transformed ("transformed") expansion.

    With ``fixed_level`` every term with l+m+n+s <= fixed_level is summed and
    no stopping rule is applied; the tail estimate is then the size of the
    outermost level.
    """
    eng = _Engine(p, args, opts, mode)
    t = float(args.t) if confluent else 0.0
    if fixed_level is not None:
        return _fixed(eng, p, args, t, mode, int(fixed_level), opts)
    smax = min(MAX_LAYER, int(opts.max_level))
    g = _t_weights(p.a, t, smax, opts.rel_tol)
    if mode == "raw":
        g = g * (-1.0) ** np.arange(smax + 1)

    path, pre = _path_prefactor(p, args, mode)
    total = 0.0
    tail = 0.0
    quiet = 0
    level = 0
    sizes = []
    for s in range(smax + 1):
        if g[s] == 0.0 and s > 0:
            if t == 0:
                break
            continue
        cap = int(opts.max_level) - s
        val, tl, ok, lev = eng.shells(s, g[s], abs(total), cap if s == 0 else min(cap, LAYER_SHELL_CAP),
                                      start=max(8, level - s + 1))
        if not ok:
            raise ConvergenceError(f"expansion layer s={s} did not converge by level {s + lev}")
        total += val
        tail += tl
        level = max(level, lev + s)
        if t == 0:
            break
        sizes.append(abs(val))
        if _stalled(sizes):
            raise ConvergenceError(f"expansion layers stopped decaying by s={s} "
                                   f"(|layer| {sizes[-1]:.1e}, total {abs(total):.1e})")
        quiet = quiet + 1 if abs(val) <= opts.rel_tol * abs(total) else 0
        if quiet >= 3:
            break
    else:
        raise ConvergenceError(f"expansion in layers did not converge by s={smax}")
    value = pre * total
    if not math.isfinite(value):
        raise ConvergenceError("expansion overflowed")
    return EvalResult(value, level, abs(pre) * tail, path)


def _stalled(sizes, window=STALL_WINDOW):
    # no net decay over the last two windows of layers: the s-series is
    # at best algebraically convergent here and will not reach tolerance
    n = len(sizes)
    if n < 4 * window:
        return False
    recent = max(sizes[-window:])
    return recent > 0.5 * max(sizes[-3 * window:-2 * window])


def _path_prefactor(p, args, mode):
    if mode == "transformed":
        return Path.TRANSFORMED, float(np.exp(-np.sum(np.array(p.b) * np.log1p(-np.array(args.xyz)))))
    return Path.DECOMPOSITION, 1.0


def _fixed(eng, p, args, t, mode, level, opts):
    if level < 0 or level > MAX_LAYER + 400:
        raise DomainError(f"fixed truncation level out of range: {level}")
    smax = min(level, MAX_LAYER) if t != 0 else 0
    g = _t_weights(p.a, t, smax, opts.rel_tol)
    if mode == "raw":
        g = g * (-1.0) ** np.arange(smax + 1)
    by_level = np.zeros(level + 1)
    for s in range(smax + 1):
        if g[s] == 0.0:
            continue
        l, m, n = _simplex_range(0, level - s)
        by_level[s:] += g[s] * np.bincount(l + m + n, weights=eng.block(s, l, m, n), minlength=level - s + 1)
    path, pre = _path_prefactor(p, args, mode)
    value = pre * math.fsum(by_level)
    if not math.isfinite(value):
        raise ConvergenceError("expansion overflowed")
    return EvalResult(value, level, abs(pre * by_level[-1]), path)
