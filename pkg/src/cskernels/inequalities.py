"""Sampled checks of the elementary kernel inequalities and the weighted maximal bound.

Each check fits the smallest constant on a base sample and then confirms the
same constant (plus a small allowance) still works on a much wider sample.
"""

from __future__ import annotations

import numpy as np

from .halfline_ops import GridFunction, ap_constant_estimate, maximal_function
from .params import muckenhoupt_radial
from .report import ProbeReport


def _log_grid(lo, hi, n):
    return np.geomspace(lo, hi, n)


def min_product_constant(eps: float, lo: float = 1e-3, hi: float = 1e3, n: int = 100) -> tuple[float, float]:
    """Worst lower and upper quotients for (1∧r)(1∧s) <= 1∧rs <= C(1∧r)(1∧s)e^{ε|r-s|²}.

    Returns (max lower quotient, fitted C).  The first must be <= 1.
    """
    r = _log_grid(lo, hi, n)[:, None]
    s = _log_grid(lo, hi, n)[None, :]
    prod = np.minimum(1.0, r) * np.minimum(1.0, s)
    mid = np.minimum(1.0, r * s)
    lower = float(np.max(prod / mid))
    log_upper = np.log(mid) - np.log(prod) - eps * (r - s) ** 2
    return lower, float(np.exp(log_upper.max()))


def weight_ratio_constant(g1: float, g2: float, eps: float, lo: float, hi: float, n: int = 160) -> float:
    """Fitted C in |y|^g1/|z|^g2 <= C (|y|∧1)^g1/(|z|∧1)^g2 e^{ε|y-z|²} over a log grid."""
    y = _log_grid(lo, hi, n)[:, None]
    z = _log_grid(lo, hi, n)[None, :]
    lhs = g1 * np.log(y) - g2 * np.log(z)
    rhs = g1 * np.log(np.minimum(y, 1.0)) - g2 * np.log(np.minimum(z, 1.0)) + eps * (y - z) ** 2
    return float(np.exp((lhs - rhs).max()))


def domination_constant(
    g1: float,
    g2: float,
    kappa: float = 4.0,
    kappa_out: float = 4.5,
    t_range=(1e-3, 1e3),
    yz_range=(1e-4, 1e4),
    n: int = 40,
    t_exponent: float | None = None,
) -> float:
    """Largest ratio of the weighted kernel to t^e times the shifted S-kernel (M = 1).

    Weighted kernel: t^{-1/2}(|y|/√t∧1)^{-α}|y|^{g1}|z|^{-g2}(|z|/√t∧1)^{-β}e^{-|y-z|²/κt}.
    Comparison:      t^e · t^{-1/2}(|y|/√t∧1)^{-α+g1}(|z|/√t∧1)^{-β-g2}e^{-|y-z|²/κ't},
    with e = (g1 - g2)/2 unless ``t_exponent`` overrides it.  α and β cancel.
    """
    e = 0.5 * (g1 - g2) if t_exponent is None else t_exponent
    t = _log_grid(*t_range, n)[:, None, None]
    y = _log_grid(*yz_range, n)[None, :, None]
    z = _log_grid(*yz_range, n)[None, None, :]
    st = np.sqrt(t)
    log_ratio = (
        g1 * np.log(y)
        - g2 * np.log(z)
        - g1 * np.log(np.minimum(y / st, 1.0))
        + g2 * np.log(np.minimum(z / st, 1.0))
        - (y - z) ** 2 / t * (1.0 / kappa - 1.0 / kappa_out)
        - e * np.log(t)
    )
    return float(np.exp(log_ratio.max()))


def inequality_probe(eps: float = 0.1, pairs=((0.0, 0.5), (-0.5, 0.3), (0.4, 1.2), (1.0, 1.0))) -> ProbeReport:
    rep = ProbeReport("domination", config={"eps": eps, "pairs": [list(p) for p in pairs]})
    lower, C = min_product_constant(eps)
    _, C_wide = min_product_constant(eps, 1e-6, 1e6, 200)
    rep.add("min_product_lower", lower, lower <= 1.0 + 1e-15, expected="<= 1")
    rep.add("min_product_constant_stable", C_wide / C, C_wide <= 1.05 * C, params={"C": C}, tolerance=0.05)
    for g1, g2 in pairs:
        c0 = weight_ratio_constant(g1, g2, eps, 1e-3, 1e3)
        c1 = weight_ratio_constant(g1, g2, eps, 1e-6, 1e6, 240)
        rep.add("weight_ratio_constant_stable", c1 / c0, c1 <= 1.05 * c0, params={"g1": g1, "g2": g2, "C": c0}, tolerance=0.05)
        d0 = domination_constant(g1, g2)
        d1 = domination_constant(g1, g2, t_range=(1e-6, 1e6), yz_range=(1e-7, 1e7), n=60)
        rep.add("domination_constant_stable", d1 / d0, d1 <= 1.05 * d0, params={"g1": g1, "g2": g2, "C": d0}, tolerance=0.05)
    return rep


def maximal_weight_check(k: float, p: float, m: float = 0.0, n: int = 240, seed: int = 0, n_funcs: int = 4) -> ProbeReport:
    """Pointwise M f <= A^{1/p} (M_w |f|^p)^{1/p} on a grid, w = |y|^k in A_p."""
    if not muckenhoupt_radial(1, m, k, p).in_Ap:
        raise ValueError("weight is not in A_p")
    A = ap_constant_estimate(k, 1, m, p, 96, 1e-12)
    rng = np.random.default_rng(seed)
    g = np.geomspace(1e-4, 10.0, n)
    rep = ProbeReport("maximal", config={"k": k, "p": p, "m": m, "A": A, "seed": seed})
    worst = 0.0
    for _ in range(n_funcs):
        centres = np.exp(rng.uniform(np.log(1e-3), np.log(5.0), 3))
        vals = sum(np.exp(-((np.log(g / c)) ** 2) / 0.5) * rng.uniform(0.2, 1.0) for c in centres)
        lhs = maximal_function(GridFunction(g, vals, m)).values
        rhs = maximal_function(GridFunction(g, vals ** p, m), weight=lambda y: y ** k).values ** (1.0 / p)
        worst = max(worst, float(np.max(lhs / (A ** (1.0 / p) * rhs))))
    rep.add("pointwise_bound", worst, worst <= 1.02, expected="<= 1", tolerance=0.02)
    return rep
