"""Composite Gauss rules on half-line panels.

Small building blocks shared by the operator code: Gauss-Legendre panels,
a Gauss-Jacobi panel for integrands that behave like ρ^e near ρ = 0, and
panel refinement.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from scipy.special import roots_jacobi


@lru_cache(maxsize=None)
def _legendre01(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (x + 1.0), 0.5 * w


@lru_cache(maxsize=256)
def _jacobi01(n: int, beta: float):
    # weight (1 + x)^beta on [-1, 1]  ->  u^beta on [0, 1]
    x, w = roots_jacobi(n, 0.0, beta)
    u = 0.5 * (x + 1.0)
    return u, w * 2.0 ** (-beta - 1.0)


def refine(edges, max_width) -> np.ndarray:
    """Split every panel wider than ``max_width`` into equal pieces."""
    edges = np.unique(np.asarray(edges, dtype=float))
    if edges.size < 2:
        return edges
    widths = np.diff(edges)
    pieces = np.maximum(1, np.ceil(widths / max_width).astype(int))
    if np.all(pieces == 1):
        return edges
    parts = [edges[:1]]
    for a, w, k in zip(edges[:-1], widths, pieces):
        parts.append(a + w * np.arange(1, k + 1) / k)
    return np.concatenate(parts)


def grade(edges, ratio: float = 2.0) -> np.ndarray:
    """Insert geometric points into panels [a, b] with 0 < a and b > ratio * a.

    Keeps every panel's width comparable to its distance from the origin,
    which is what power-type behaviour at ρ = 0 needs.
    """
    edges = np.unique(np.asarray(edges, dtype=float))
    a, b = edges[:-1], edges[1:]
    bad = (a > 0) & (b > ratio * a)
    if not np.any(bad):
        return edges
    extra = [np.geomspace(lo, hi, int(np.ceil(np.log(hi / lo) / np.log(ratio))) + 1)[1:-1] for lo, hi in zip(a[bad], b[bad])]
    return np.unique(np.concatenate([edges, *extra]))


def panel_rule(edges, order: int = 8, zero_exponent: float | None = None):
    """Nodes and weights of a composite rule over consecutive ``edges``.

    If ``edges[0] == 0`` and ``zero_exponent`` is given, the first panel uses a
    Gauss-Jacobi rule that is exact for ρ^e times a polynomial, which keeps
    integrable power singularities at the origin accurate.
    """
    edges = np.asarray(edges, dtype=float)
    if edges.size < 2:
        return np.empty(0), np.empty(0)
    a = edges[:-1]
    h = np.diff(edges)
    u, w = _legendre01(order)
    nodes = (a[:, None] + h[:, None] * u[None, :]).ravel()
    weights = (h[:, None] * w[None, :]).ravel()
    if zero_exponent is not None and edges[0] == 0.0 and zero_exponent != 0.0:
        uj, wj = _jacobi01(order, float(zero_exponent))
        h0 = h[0]
        x0 = h0 * uj
        # integrand f = x^e g(x): sum W g(x) = sum (W / x^e) f(x)
        nodes[:order] = x0
        weights[:order] = h0 * wj / uj ** zero_exponent
    return nodes, weights


def log_panel_rule(a: float, b: float, per_decade: int = 12, order: int = 8):
    """Rule on [a, b] with 0 < a < b using panels equally spaced in log ρ."""
    n = max(1, int(np.ceil(per_decade * np.log10(b / a))))
    return panel_rule(np.geomspace(a, b, n + 1), order)
