r"""Modified Bessel functions of real order and positive real argument.

``bessel_i`` sums the power series

.. math:: I_\nu(x) = (x/2)^\nu \sum_k \frac{(x/2)^{2k}}{k!\,\Gamma(\nu+k+1)}

for moderate arguments and switches to the large-argument expansion beyond
``series_cutoff(nu)``.  ``bessel_k`` integrates
:math:`\int_0^\infty e^{-x\cosh t}\cosh(\nu t)\,dt` with a truncated
trapezoid rule, which converges geometrically for this analytic, even
integrand.  All functions accept scalars or broadcastable arrays.

Orders up to roughly 25 keep full accuracy for arguments beyond 700; higher
orders fall back to the asymptotic series there and lose digits.
"""

from __future__ import annotations

import numpy as np
from scipy.special import gammaln


class DomainError(ValueError):
    pass


# Asymptotic remainder for I is ~exp(-2x); 17 keeps it below 2e-15.
_ASYMPTOTIC_FLOOR = 17.0
_K_NODES = 176
_K_CHUNK = 4096
_K_TAIL = 42.0


def series_cutoff(nu):
    """Arguments above this value use the asymptotic expansion."""
    nu = np.asarray(nu, dtype=float)
    return np.maximum(_ASYMPTOTIC_FLOOR, nu * nu)


def _as_pair(nu, x):
    nu = np.asarray(nu, dtype=float)
    x = np.asarray(x, dtype=float)
    scalar = nu.ndim == 0 and x.ndim == 0
    nu, x = np.broadcast_arrays(nu, x)
    return nu.ravel().copy(), x.ravel().copy(), nu.shape, scalar


def _finish(out, shape, scalar):
    out = out.reshape(shape)
    return float(out) if scalar else out


def _series_parts(nu, x):
    """Return (log prefactor, normalised sum) of the power series.

    I_nu(x) = exp(logpref) * S with logpref = nu*log(x/2) - lgamma(nu+1) and
    S = sum_k (x^2/4)^k / (k! (nu+1)_k).  All terms of S are positive.
    """
    with np.errstate(divide="ignore", invalid="ignore"):
        logpref = nu * np.log(0.5 * x) - gammaln(nu + 1.0)
    logpref = np.where((x == 0) & (nu == 0), 0.0, logpref)
    w = 0.25 * x * x
    term = np.ones_like(x)
    total = np.ones_like(x)
    active = w > 0
    k = 0
    while np.any(active):
        k += 1
        idx = np.nonzero(active)[0]
        term[idx] *= w[idx] / (k * (nu[idx] + k))
        total[idx] += term[idx]
        # past the peak (k^2 > w) the terms decay at least geometrically
        done = (term[idx] <= 1e-17 * total[idx]) & (k * k > w[idx])
        active[idx[done]] = False
        if k > 100000:  # pragma: no cover - guarded by series_cutoff
            raise RuntimeError("Bessel series failed to converge")
    return logpref, total


def _hankel_sum(nu, x, sign):
    shape = x.shape
    nu, x = nu.ravel(), x.ravel()
    mu = 4.0 * nu * nu
    term = np.ones_like(x)
    total = np.ones_like(x)
    idx = np.arange(x.size)
    for k in range(1, 80):
        if idx.size == 0:
            break
        prev = term[idx]
        nxt = sign * prev * (mu[idx] - (2 * k - 1) ** 2) / (8.0 * k * x[idx])
        # an asymptotic series is summed only while its terms keep shrinking
        use = np.abs(nxt) < np.abs(prev)
        live = idx[use]
        total[live] += nxt[use]
        term[live] = nxt[use]
        idx = idx[use & (np.abs(nxt) > 1e-17 * np.abs(total[idx]))]
    return total.reshape(shape)


def _asymptotic_scaled(nu, x):
    """exp(-x) I_nu(x) from the Hankel expansion; valid for x >= max(17, nu^2)."""
    return _hankel_sum(nu, x, -1.0) / np.sqrt(2.0 * np.pi * x)


def bessel_i(nu, x, scaled: bool = False):
    """Modified Bessel function of the first kind, order ``nu > -1``.

    With ``scaled=True`` returns ``exp(-x) * I_nu(x)``, which stays finite for
    arbitrarily large ``x``.
    """
    nu, x, shape, scalar = _as_pair(nu, x)
    if np.any(nu <= -1):
        raise DomainError("order must exceed -1")
    if np.any(x < 0) or np.any(np.isnan(x)):
        raise DomainError("argument must be non-negative")
    out = np.empty_like(x)
    big = x > series_cutoff(nu)
    small = ~big
    if np.any(small):
        logpref, s = _series_parts(nu[small], x[small])
        if scaled:
            logpref = logpref - x[small]
        out[small] = np.exp(logpref) * s
    if np.any(big):
        val = _asymptotic_scaled(nu[big], x[big])
        if not scaled:
            with np.errstate(over="ignore"):
                val = val * np.exp(x[big])
        out[big] = val
    return _finish(out, shape, scalar)


def bessel_i_ratio(nu, x):
    """``I_{nu+1}(x) / I_nu(x)`` for ``x > 0``.

    The ratio lies in (0, 1) for nu >= -1/2; for -1 < nu < -1/2 it can exceed 1.
    """
    nu, x, shape, scalar = _as_pair(nu, x)
    if np.any(nu <= -1):
        raise DomainError("order must exceed -1")
    if np.any(x <= 0):
        raise DomainError("argument must be positive")
    out = np.empty_like(x)
    both_series = x <= series_cutoff(nu + 1.0)
    if np.any(both_series):
        n, z = nu[both_series], x[both_series]
        _, s0 = _series_parts(n, z)
        _, s1 = _series_parts(n + 1.0, z)
        out[both_series] = 0.5 * z / (n + 1.0) * s1 / s0
    rest = ~both_series
    if np.any(rest):
        n, z = nu[rest], x[rest]
        out[rest] = bessel_i(n + 1.0, z, scaled=True) / bessel_i(n, z, scaled=True)
    return _finish(out, shape, scalar)


def ratio_bound_constant(nu: float) -> float:
    """A constant C with ``|I_{nu+1}/I_nu - 1| <= C * min(1, 1/x)`` for all x > 0.

    For large x, 1 - ratio ~ (2 nu + 1) / (2x).  For nu >= -1/2 the ratio
    stays in (0, 1); below that it overshoots 1 by an amount that grows like
    (nu + 1)^{-1/2}.  The value below was checked on a dense logarithmic grid.
    """
    if nu <= -1:
        raise DomainError("order must exceed -1")
    return max(1.0, abs(nu + 0.5) + 0.5, 0.5 / np.sqrt(nu + 1.0))


def _k_truncation(nu_abs, x):
    # smallest T with x (cosh T - 1) - |nu| T >= _K_TAIL, by fixed-point steps
    T = np.arccosh(1.0 + _K_TAIL / x)
    for _ in range(40):
        T = np.arccosh(1.0 + (_K_TAIL + nu_abs * T) / x)
    return T * 1.05 + 1e-3


def _k_scaled(nu, x):
    nu_abs = np.abs(nu)
    T = _k_truncation(nu_abs, x)
    j = np.arange(_K_NODES + 1, dtype=float)
    w = np.ones(_K_NODES + 1)
    w[0] = 0.5
    out = np.empty_like(x)
    for lo in range(0, x.size, _K_CHUNK):
        sl = slice(lo, lo + _K_CHUNK)
        h = T[sl] / _K_NODES
        t = h[:, None] * j[None, :]
        xs = x[sl][:, None]
        # exp(-x (cosh t - 1)) * cosh(nu t), written to avoid overflow of cosh
        arg = -xs * (2.0 * np.sinh(0.5 * t) ** 2)
        f = 0.5 * (np.exp(arg + nu_abs[sl][:, None] * t) + np.exp(arg - nu_abs[sl][:, None] * t))
        out[sl] = h * (f @ w)
    return out


def bessel_k(nu, x, scaled: bool = False):
    """Modified Bessel function of the second kind for real ``nu`` and ``x > 0``.

    ``scaled=True`` returns ``exp(x) * K_nu(x)``.
    """
    nu, x, shape, scalar = _as_pair(nu, x)
    if np.any(x <= 0) or np.any(np.isnan(x)):
        raise DomainError("argument must be positive")
    out = np.empty_like(x)
    big = x > series_cutoff(nu)
    if np.any(big):
        out[big] = _hankel_sum(nu[big], x[big], 1.0) * np.sqrt(0.5 * np.pi / x[big])
    if np.any(~big):
        out[~big] = _k_scaled(nu[~big], x[~big])
    if not scaled:
        out = out * np.exp(-x)
    return _finish(out, shape, scalar)


def derivative_identity_check(nu: float, x: float, step: float = 1e-5) -> float:
    """Relative residual of I_nu' = I_{nu+1} + (nu/x) I_nu with a centred difference."""
    if x <= 0:
        raise DomainError("argument must be positive")
    h = min(step, 0.5 * x)
    fd = (bessel_i(nu, x + h) - bessel_i(nu, x - h)) / (2.0 * h)
    exact = bessel_i(nu + 1.0, x) + nu / x * bessel_i(nu, x)
    return abs(fd - exact) / abs(exact)
