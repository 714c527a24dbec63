"""Numerical checks of boundary traces in weighted W^{1,p}_m on the half-line.

Test functions are u(y) = P(y) exp(-y²) with a random cubic P, so u and u'
are known in closed form and the checks only involve quadrature in y.
"""

from __future__ import annotations

import math

import numpy as np

from .params import SpaceParams
from .quadrature import log_panel_rule
from .report import ProbeReport


class _Poly:
    def __init__(self, coeffs):
        self.c = np.asarray(coeffs, dtype=float)

    def u(self, y):
        return np.polyval(self.c[::-1], y) * np.exp(-y * y)

    def du(self, y):
        P = np.polyval(self.c[::-1], y)
        dP = np.polyval((self.c[1:] * np.arange(1, self.c.size))[::-1], y)
        return (dP - 2 * y * P) * np.exp(-y * y)


def _integral(func, a, b, m):
    x, w = log_panel_rule(a, b, per_decade=10, order=10)
    return float(np.sum(w * func(x) * x ** m))


def _smooth_step(s):
    """C^1 step: 0 for s <= 0, 1 for s >= 1; returns (phi, phi')."""
    s = np.clip(s, 0.0, 1.0)
    return s * s * (3 - 2 * s), 6 * s * (1 - s)


def holder_trace_ratio(u: _Poly, sp: SpaceParams, y) -> np.ndarray:
    """|u(y) - u(0)|^p / (C y^{p-1-m} ∫_0^y |u'|^p s^m ds), which must stay <= 1 for q < 1."""
    p, m = sp.p, sp.m
    C = ((p - 1.0) / (p - 1.0 - m)) ** (p - 1.0)
    out = []
    for yy in np.atleast_1d(y):
        lhs = abs(u.u(yy) - u.u(0.0)) ** p
        rhs = C * yy ** (p - 1 - m) * _integral(lambda s: np.abs(u.du(s)) ** p, yy * 1e-14, yy, m)
        out.append(lhs / rhs if rhs > 0 else 0.0)
    return np.array(out)


def linear_cutoff_error(u: _Poly, sp: SpaceParams, n: float) -> float:
    """||n φ'(n y) u||_{L^p_m}: the extra gradient term of the cutoff u_n = φ(n y) u."""
    p, m = sp.p, sp.m
    lo, hi = 1.0 / n, 2.0 / n
    f = lambda y: np.abs(n * _smooth_step(n * y - 1.0)[1] * u.u(y)) ** p
    return _integral(f, lo, hi, m) ** (1.0 / p)


def log_cutoff_error(u: _Poly, sp: SpaceParams, n: float) -> float:
    """Extra gradient term of φ(y^{1/n}) u with φ stepping on [1/4, 1/2]."""
    p, m = sp.p, sp.m
    lo, hi = 0.25 ** n, 0.5 ** n

    def f(y):
        s = y ** (1.0 / n)
        dphi = _smooth_step((s - 0.25) / 0.25)[1] / 0.25
        return np.abs(dphi * s / (n * y) * u.u(y)) ** p

    return _integral(f, lo, hi, m) ** (1.0 / p)


def _slope(ns, vals) -> float:
    return float(np.polyfit(np.log(ns[-3:]), np.log(vals[-3:]), 1)[0])


def trace_limit_probe(sp: SpaceParams, seed: int = 0, n_funcs: int = 6) -> ProbeReport:
    rng = np.random.default_rng(seed)
    p, m, q = sp.p, sp.m, sp.q
    rep = ProbeReport("trace-limit", config={"m": m, "p": p, "seed": seed})
    funcs = [_Poly(rng.uniform(-1, 1, 4) + np.array([1.5, 0, 0, 0])) for _ in range(n_funcs)]
    # lowest vanishing order k with u, u' in L^p_m near 0: (k - 1) p + m > -1
    k = max(1, int(math.floor(1.0 - q)) + 1)
    vanishing = [_Poly(np.concatenate([np.zeros(k), [1.0], f.c[1:]])) for f in funcs]
    ns = 2.0 ** np.arange(4, 21, 4)
    if q < 1:
        ys = 2.0 ** -np.arange(0, 17, 2)
        pool = funcs if m > -1 else vanishing
        worst = max(float(holder_trace_ratio(f, sp, ys).max()) for f in pool)
        rep.add("holder_trace_bound", worst, worst <= 1.0 + 1e-6, expected="<= 1")
        target = 1.0 - k - q
        slopes = [_slope(ns, [linear_cutoff_error(f, sp, n) for n in ns]) for f in vanishing]
        bad = max(abs(sl - target) for sl in slopes)
        rep.add("cutoff_vanishes_when_trace_zero", max(slopes), bad < 0.05 and target < 0, expected=target, tolerance=0.05)
        if m > -1:
            slopes = [_slope(ns, [linear_cutoff_error(f, sp, n) for n in ns]) for f in funcs]
            bad = max(abs(sl - (1.0 - q)) for sl in slopes)
            rep.add("cutoff_blows_up_when_trace_nonzero", min(slopes), bad < 0.05, expected=1.0 - q, tolerance=0.05)
    else:
        ks = np.array([2.0, 4.0, 8.0, 16.0, 32.0])
        errs = [[log_cutoff_error(f, sp, kk) for kk in ks] for f in funcs]
        ok = all(np.all(np.diff(e) < 0) and e[-1] < 0.5 * e[0] for e in errs)
        rep.add("log_cutoff_vanishes", max(e[-1] / e[0] for e in errs), ok, expected="< 0.5")
        if q > 1:
            a = 0.5 * (1.0 + q)
            eps = 2.0 ** -np.arange(4, 41, 4)
            grads = [(abs(1 - a) ** p) * _integral(lambda y: y ** (-a * p), e, 1.0, m) for e in eps]
            inc = np.diff(grads)
            converging = bool(np.all(inc[1:] < inc[:-1])) and inc[-1] < 1e-2 * grads[-1]
            unbounded = eps[-1] ** (1 - a) > 100 * eps[0] ** (1 - a)
            rep.add("unbounded_example_has_finite_gradient", float(inc[-1] / grads[-1]), converging and unbounded)
    if not math.isclose(q, 1.0):
        C = 1.0 / abs(1.0 - q)
        pool = vanishing if q < 1 else funcs
        worst = 0.0
        for f in pool:
            num = _integral(lambda y: np.abs(f.u(y) / y) ** p, 1e-12, 40.0, m) ** (1 / p)
            den = _integral(lambda y: np.abs(f.du(y)) ** p, 1e-12, 40.0, m) ** (1 / p)
            worst = max(worst, num / den)
        rep.add("hardy_gradient_bound", worst / C, worst <= 1.02 * C, expected="<= 1.02", tolerance=0.02)
    return rep
