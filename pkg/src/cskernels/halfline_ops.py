"""Weighted half-line numerics.

Functions on (0, inf) are either sampled on a grid (``GridFunction``,
piecewise linear, zero outside the grid) or given as a callable with a
support interval (``Profile``).  The operators below turn either kind into
values on an output grid.
"""

from __future__ import annotations

import csv
import io
import math
from functools import lru_cache
import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

import numpy as np
from scipy.special import betainc, gamma

from .kernels import KernelSpec, green_function, heat_kernel
from .params import BoundaryCondition, Realization, muckenhoupt_radial
from .quadrature import grade, log_panel_rule, panel_rule, refine
from .report import ProbeReport
from .specfun import bessel_i, bessel_k


class EmptyGrid(ValueError):
    pass


class QuadratureFailure(RuntimeError):
    def __init__(self, msg, worst_node=None):
        super().__init__(msg)
        self.worst_node = worst_node


# exp(-40) relative to the Gaussian peak
GAUSS_CUTOFF = 40.0


def default_grid(
    n_geo: int = 512,
    n_uni: int = 512,
    y_min: float = 1e-6,
    y_split: float = 1.0,
    y_max: float = 50.0,
) -> np.ndarray:
    """Geometric nodes on [y_min, y_split] followed by uniform nodes up to y_max."""
    geo = np.geomspace(y_min, y_split, n_geo)
    uni = np.linspace(y_split, y_max, n_uni + 1)[1:]
    return np.concatenate([geo, uni])


@dataclass
class GridFunction:
    grid: np.ndarray
    values: np.ndarray
    m: float = 0.0

    def __post_init__(self):
        self.grid = np.asarray(self.grid, dtype=float)
        self.values = np.asarray(self.values)
        if self.grid.size == 0:
            raise EmptyGrid("grid has no nodes")
        if self.grid.ndim != 1 or self.values.shape[-1] != self.grid.size:
            raise ValueError("values must match the grid along the last axis")
        if np.any(self.grid <= 0) or np.any(np.diff(self.grid) <= 0):
            raise ValueError("grid must be strictly increasing and positive")

    @classmethod
    def from_callable(cls, grid, func: Callable, m: float = 0.0) -> "GridFunction":
        grid = np.asarray(grid, dtype=float)
        return cls(grid, np.asarray(func(grid), dtype=float), m)

    def __call__(self, x):
        return np.interp(x, self.grid, self.values, left=0.0, right=0.0)

    def with_values(self, values) -> "GridFunction":
        return GridFunction(self.grid, values, self.m)

    # -- serialisation ---------------------------------------------------
    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("y,value\n")
        for y, v in zip(self.grid, self.values):
            buf.write(f"{y:.17g},{float(v):.17g}\n")
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, m: float = 0.0) -> "GridFunction":
        rows = list(csv.reader(io.StringIO(text)))
        if not rows or [h.strip() for h in rows[0]] != ["y", "value"]:
            raise ValueError("expected header 'y,value'")
        data = np.array([[float(a), float(b)] for a, b in rows[1:]])
        if data.size == 0:
            raise EmptyGrid("no rows")
        return cls(data[:, 0], data[:, 1], m)


@dataclass(frozen=True)
class Profile:
    """A function given in closed form on ``support``; zero elsewhere.

    ``exponent_at_zero`` describes f ~ ρ^e near 0 when the support starts at 0.
    """

    func: Callable
    support: tuple = (0.0, math.inf)
    breaks: tuple = ()
    exponent_at_zero: float = 0.0

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        a, b = self.support
        inside = (x >= a) & (x <= b)
        out = np.zeros_like(x)
        if np.any(inside):
            out[inside] = self.func(x[inside])
        return out


Source = Union[GridFunction, Profile]


def _source_edges(f: Source, lo: float, hi: float) -> np.ndarray:
    """Breakpoints of the source inside [lo, hi] (including lo and hi)."""
    if isinstance(f, GridFunction):
        g = f.grid
        inner = g[(g > lo) & (g < hi)]
    else:
        a, b = f.support
        pts = [a, b, *f.breaks]
        if a > 0 and math.isfinite(b) and b / a > 4:
            pts.extend(np.geomspace(a, b, int(np.ceil(8 * np.log2(b / a))) + 1))
        inner = np.array([p for p in pts if lo < p < hi], dtype=float)
    return np.unique(np.concatenate([[lo, hi], inner]))


def _source_range(f: Source) -> tuple[float, float]:
    if isinstance(f, GridFunction):
        return float(f.grid[0]), float(f.grid[-1])
    return float(f.support[0]), float(f.support[1])


def _evaluate_source(f: Source, x):
    return f(x)


# ---------------------------------------------------------------------------
# norms


def _trapezoid(y, x):
    return float(np.sum(0.5 * (y[1:] + y[:-1]) * np.diff(x)))


def weighted_norm(f: GridFunction, p: float, lo: float | None = None, hi: float | None = None) -> float:
    """Trapezoid approximation of (∫ |f|^p y^m dy)^{1/p} over the grid (or [lo, hi])."""
    if f.grid.size == 0:
        raise EmptyGrid("empty grid")
    g, v = f.grid, np.abs(np.asarray(f.values, dtype=float))
    if lo is not None or hi is not None:
        mask = np.ones(g.size, dtype=bool)
        if lo is not None:
            mask &= g >= lo
        if hi is not None:
            mask &= g <= hi
        g, v = g[mask], v[mask]
        if g.size == 0:
            return 0.0
    if math.isinf(p):
        return float(v.max())
    if p < 1:
        raise ValueError("p must be >= 1")
    return _trapezoid(v ** p * g ** f.m, g) ** (1.0 / p)


def dilate(f: GridFunction, s: float) -> GridFunction:
    """I_s f(y) = f(s y), represented on the grid grid/s."""
    return GridFunction(f.grid / s, f.values, f.m)


# ---------------------------------------------------------------------------
# semigroup


def _gauss_window(t: float) -> float:
    return math.sqrt(4.0 * t * GAUSS_CUTOFF)


def _semigroup_panels(spec: KernelSpec, t: float, y: float, f: Source, order: int):
    a, b = _source_range(f)
    w = _gauss_window(t)
    lo, hi = max(a, y - w), min(b, y + w)
    if not lo < hi:
        return np.empty(0), np.empty(0)
    edges = _source_edges(f, lo, hi)
    if lo < y < hi:
        edges = np.union1d(edges, [y])
    edges = grade(refine(edges, 0.25 * math.sqrt(t)))
    zexp = None
    if lo == 0.0:
        fz = f.exponent_at_zero if isinstance(f, Profile) else 0.0
        zexp = spec.rho_exponent_at_zero + fz
    return panel_rule(edges, order, zexp)


def semigroup_matrix(spec: KernelSpec, t: float, grid, y_out=None, order: int = 8) -> np.ndarray:
    """Matrix S with (S @ values)[i] ≈ ∫ p(t, y_i, ρ) f(ρ) dρ for piecewise-linear f on ``grid``."""
    if t <= 0:
        raise ValueError("t must be positive")
    grid = np.asarray(grid, dtype=float)
    y_out = grid if y_out is None else np.asarray(y_out, dtype=float)
    probe = GridFunction(grid, np.zeros_like(grid))
    n = grid.size
    rows, pts, wts = [], [], []
    for i, y in enumerate(y_out):
        x, w = _semigroup_panels(spec, t, float(y), probe, order)
        rows.append(np.full(x.size, i))
        pts.append(x)
        wts.append(w)
    rows = np.concatenate(rows)
    pts = np.concatenate(pts)
    wts = np.concatenate(wts)
    mat = np.zeros((y_out.size, n))
    if pts.size == 0:
        return mat
    kern = heat_kernel(spec, t, y_out[rows], pts) * wts
    j = np.clip(np.searchsorted(grid, pts, side="right") - 1, 0, n - 2)
    frac = (pts - grid[j]) / (grid[j + 1] - grid[j])
    flat = mat.ravel()
    np.add.at(flat, rows * n + j, kern * (1.0 - frac))
    np.add.at(flat, rows * n + j + 1, kern * frac)
    return mat


def apply_semigroup(spec: KernelSpec, t: float, f: Source, y=None, order: int = 8) -> GridFunction:
    """[e^{tA} f](y) = ∫ p(t, y, ρ) f(ρ) dρ at the output nodes ``y`` (default: f's grid)."""
    if t <= 0:
        raise ValueError("t must be positive")
    if y is None:
        if not isinstance(f, GridFunction):
            raise ValueError("output nodes are required for a Profile source")
        y = f.grid
    y = np.asarray(y, dtype=float)
    m = f.m if isinstance(f, GridFunction) else 0.0
    if isinstance(f, GridFunction):
        vals = semigroup_matrix(spec, t, f.grid, y, order) @ f.values
        return GridFunction(y, vals, m)
    out = np.zeros(y.size)
    for i, yi in enumerate(y):
        x, w = _semigroup_panels(spec, t, float(yi), f, order)
        if x.size:
            out[i] = np.sum(w * heat_kernel(spec, t, yi, x) * f(x))
    if not np.all(np.isfinite(out)):
        bad = int(np.argmax(~np.isfinite(out)))
        raise QuadratureFailure("non-finite semigroup value", worst_node=float(y[bad]))
    return GridFunction(y, out, m)


def kernel_mass(spec: KernelSpec, t: float, y, order: int = 10) -> np.ndarray:
    """∫_0^∞ p(t, y, ρ) dρ for each y (equals 1 for conservative kernels)."""
    one = Profile(lambda x: np.ones_like(x), (0.0, math.inf))
    return apply_semigroup(spec, t, one, np.atleast_1d(np.asarray(y, dtype=float)), order).values


# ---------------------------------------------------------------------------
# resolvent


def _resolvent_sweep(spec: KernelSpec, lam: float, edges: np.ndarray, fvals_at, order: int):
    """Semi-separable evaluation of ∫ G(λ, y, ρ) f(ρ) dρ at every edge.

    G factorises as y^a K(s y) ρ^b I(s ρ) for ρ < y and y^a I(s y) ρ^b K(s ρ) for
    ρ > y (s = √λ), so two exponentially damped running integrals suffice.
    """
    spec.check()
    nu = spec.order
    s = math.sqrt(lam)
    a_pow, b_pow = spec.y_power, spec.rho_power
    zexp = spec.rho_exponent_at_zero if edges[0] == 0.0 else None
    x, w = panel_rule(edges, order, zexp)
    fx = fvals_at(x)
    npan = edges.size - 1
    x = x.reshape(npan, order)
    w = w.reshape(npan, order)
    fx = fx.reshape(fx.shape[:-1] + (npan, order))
    right = edges[1:]
    left = edges[:-1]
    rb = x ** b_pow
    gi = rb * bessel_i(nu, s * x, scaled=True) * np.exp(-s * (right[:, None] - x))
    gk = rb * bessel_k(abs(nu), s * x, scaled=True) * np.exp(-s * (x - left[:, None]))
    p1 = np.sum(w * gi * fx, axis=-1)
    p2 = np.sum(w * gk * fx, axis=-1)
    decay = np.exp(-s * np.diff(edges))
    c1 = np.zeros(fx.shape[:-2] + (edges.size,))
    c2 = np.zeros_like(c1)
    for j in range(npan):
        c1[..., j + 1] = decay[j] * c1[..., j] + p1[..., j]
    for j in range(npan - 1, -1, -1):
        c2[..., j] = decay[j] * c2[..., j + 1] + p2[..., j]
    e = edges.copy()
    safe = np.where(e > 0, e, 1.0)
    ik = bessel_i(nu, s * safe, scaled=True)
    kk = bessel_k(abs(nu), s * safe, scaled=True)
    u = safe ** a_pow * (kk * c1 + ik * c2)
    return u


def _resolvent_edges(lam, y_out, f: Source):
    a, b = _source_range(f)
    if math.isinf(b):
        b = max(float(np.max(y_out)), 1.0) + 45.0 / math.sqrt(lam)
    lo = min(a, float(np.min(y_out)))
    hi = max(b, float(np.max(y_out)))
    edges = np.union1d(_source_edges(f, a, b), y_out)
    edges = np.union1d(edges, [lo, hi])
    return refine(edges, 0.5 / math.sqrt(lam))


def apply_resolvent(spec: KernelSpec, lam: float, f: Source, y=None, order: int = 8) -> GridFunction:
    """(λ - A)^{-1} f at the output nodes, λ > 0."""
    if lam <= 0:
        raise ValueError("lambda must be positive")
    if y is None:
        if not isinstance(f, GridFunction):
            raise ValueError("output nodes are required for a Profile source")
        y = f.grid
    y = np.asarray(y, dtype=float)
    edges = _resolvent_edges(lam, y, f)
    u = _resolvent_sweep(spec, lam, edges, f, order)
    idx = np.searchsorted(edges, y)
    vals = u[idx]
    if not np.all(np.isfinite(vals)):
        bad = int(np.argmax(~np.isfinite(vals)))
        raise QuadratureFailure("non-finite resolvent value", worst_node=float(y[bad]))
    m = f.m if isinstance(f, GridFunction) else 0.0
    return GridFunction(y, vals, m)


def apply_resolvent_many(spec: KernelSpec, lam: float, grid, values) -> np.ndarray:
    """Resolvent of several piecewise-linear profiles sharing one grid.

    ``values`` has shape (k, n); returns an array of the same shape.
    """
    grid = np.asarray(grid, dtype=float)
    values = np.atleast_2d(np.asarray(values, dtype=float))
    edges = refine(grid, 0.5 / math.sqrt(lam))

    def fvals(x):
        return np.stack([np.interp(x, grid, v, left=0.0, right=0.0) for v in values])

    u = _resolvent_sweep(spec, lam, edges, fvals, 8)
    idx = np.searchsorted(edges, grid)
    return u[:, idx]


def fd_weights(x0: float, xs, k: int) -> np.ndarray:
    """Finite-difference weights for the k-th derivative at x0 on nodes xs (Fornberg)."""
    xs = np.asarray(xs, dtype=float)
    n = xs.size
    c = np.zeros((n, k + 1))
    c1, c4 = 1.0, xs[0] - x0
    c[0, 0] = 1.0
    for i in range(1, n):
        mn = min(i, k)
        c2, c5 = 1.0, c4
        c4 = xs[i] - x0
        for j in range(i):
            c3 = xs[i] - xs[j]
            c2 *= c3
            if j == i - 1:
                for s in range(mn, 0, -1):
                    c[i, s] = c1 * (s * c[i - 1, s - 1] - c5 * c[i - 1, s]) / c2
                c[i, 0] = -c1 * c5 * c[i - 1, 0] / c2
            for s in range(mn, 0, -1):
                c[j, s] = (c4 * c[j, s] - s * c[j, s - 1]) / c3
            c[j, 0] = c4 * c[j, 0] / c3
        c1 = c2
    return c[:, k]


def derivative_matrices(grid, width: int = 5):
    """Sparse-free dense matrices for d/dy and d²/dy² (5-point stencils, 4th order inside)."""
    grid = np.asarray(grid, dtype=float)
    n = grid.size
    half = width // 2
    d1 = np.zeros((n, n))
    d2 = np.zeros((n, n))
    for i in range(n):
        lo = min(max(i - half, 0), n - width)
        idx = np.arange(lo, lo + width)
        d1[i, idx] = fd_weights(grid[i], grid[idx], 1)
        d2[i, idx] = fd_weights(grid[i], grid[idx], 2)
    return d1, d2


def apply_operator_fd(spec: KernelSpec, u: GridFunction) -> np.ndarray:
    """A u = u'' + (c/y) u' - (b/y²) u by finite differences on u's grid."""
    d1, d2 = derivative_matrices(u.grid)
    y = u.grid
    b, c = spec.op.b, spec.op.c
    return d2 @ u.values + (c / y) * (d1 @ u.values) - (b / y ** 2) * u.values


def resolvent_residual(spec: KernelSpec, lam: float, f: GridFunction, u: GridFunction, trim: int = 3) -> float:
    """Relative max residual of λu - Au - f at interior nodes."""
    au = apply_operator_fd(spec, u)
    r = lam * u.values - au - f(u.grid)
    sl = slice(trim, u.grid.size - trim)
    scale = np.max(np.abs(f(u.grid)[sl])) + 1e-300
    return float(np.max(np.abs(r[sl])) / scale)


def boundary_limit_probe(spec: KernelSpec, lam: float = 1.0, j_max: int = 16, tail: int = 6) -> ProbeReport:
    """Boundary behaviour of u = (λ - A)^{-1} f, f a bump on [1, 2], along y = 2^{-j}.

    Neumann kernels: y^c u'(y) -> 0.  Otherwise: y^{s2} u(y) -> 0.  Below the
    support u(y) = const · y^a I_ν(√λ y), so u' follows from the Bessel ratio
    without differencing.
    """
    from .params import indicial_roots
    from .specfun import bessel_i_ratio

    if spec.bc is Realization.ALTERNATE:
        raise ValueError("the alternate realization does not satisfy y^{s2} u -> 0")
    src = Profile(lambda r: np.sin(np.pi * (r - 1.0)) ** 2, (1.0, 2.0))
    j = np.arange(j_max, 0, -1)
    y = 2.0 ** -j.astype(float)
    u = apply_resolvent(spec, lam, src, y).values
    # order the samples from y = 1/2 towards the boundary
    y, u = y[::-1], u[::-1]
    s = math.sqrt(lam)
    _, s1, s2 = indicial_roots(spec.op)
    if spec.bc is BoundaryCondition.NEUMANN:
        nu = spec.order
        du = u * ((spec.y_power + nu) / y + s * bessel_i_ratio(nu, s * y))
        Q = np.abs(y ** spec.op.c * du)
        kind, expected = "flux", 1.0 + spec.op.c
    else:
        Q = np.abs(y ** s2 * u)
        kind, expected = "value", s2 - s1
    rate = float(np.polyfit(np.log(y[-tail:]), np.log(Q[-tail:]), 1)[0])
    rep = ProbeReport("domain-limit", config={"spec": spec.describe(), "lam": lam, "j_max": j_max})
    rep.info.update({"kind": kind, "y": y, "quantity": Q})
    rep.add(f"{kind}_monotone_tail", float(Q[-1]), bool(np.all(np.diff(Q[-tail:]) < 0)))
    rep.add(f"{kind}_decay_rate", rate, rate > 0 and abs(rate - expected) < 0.05, expected=expected, tolerance=0.05)
    return rep


# ---------------------------------------------------------------------------
# Hardy operators


def _cumtrapz(y, x):
    out = np.zeros_like(y, dtype=float)
    out[1:] = np.cumsum(0.5 * (y[1:] + y[:-1]) * np.diff(x))
    return out


def hardy_apply(which: str, c: float, f: GridFunction) -> GridFunction:
    """H1 f(y) = y^{-c-1} ∫_0^y f s^c ds, H2 f(y) = y^{-c-1} ∫_y^∞ f s^c ds.

    f is taken to vanish outside its grid.
    """
    g = f.grid
    integrand = np.asarray(f.values, dtype=float) * g ** c
    which = which.upper()
    if which == "H1":
        vals = g ** (-c - 1.0) * _cumtrapz(integrand, g)
    elif which == "H2":
        # accumulate from the right; cum[-1] - cum would cancel badly
        tail = _cumtrapz(integrand[::-1], -g[::-1])[::-1]
        vals = g ** (-c - 1.0) * tail
    else:
        raise ValueError(f"unknown Hardy operator {which!r}")
    return GridFunction(g, vals, f.m)


def hardy_probe(c: float, sp, which: str, decades: float = 60.0, n_random: int = 24, seed: int = 0) -> ProbeReport:
    """Measured Hardy ratios against the closed-form bound.

    Near-extremal family: y^{-q} on [1, 10^decades] (H2) or on
    [10^-decades, 1] (H1).  Its ratio approaches the bound from below like
    1 - O(1/log n).  Random smooth bumps must never beat the bound.
    """
    from .params import hardy_constant

    C = hardy_constant(c, sp, which)
    p, m, q = sp.p, sp.m, sp.q
    which = which.upper()
    per_decade = 120
    if which == "H1":
        g = np.geomspace(10.0 ** -decades, 10.0 ** 8, int((decades + 8) * per_decade) + 1)
        f = np.where(g <= 1.0, g ** -q, 0.0)
    else:
        g = np.geomspace(10.0 ** -8, 10.0 ** decades, int((decades + 8) * per_decade) + 1)
        f = np.where(g >= 1.0, g ** -q, 0.0)
    src = GridFunction(g, f, m)
    extremal = weighted_norm(hardy_apply(which, c, src), p) / weighted_norm(src, p)
    rep = ProbeReport("hardy", config={"which": which, "c": c, "m": m, "p": p, "bound": C})
    rep.add("extremal_reaches_95pct", extremal / C, extremal >= 0.95 * C, expected=">= 0.95")
    rng = np.random.default_rng(seed)
    grid = np.geomspace(1e-8, 1e8, 16 * per_decade + 1)
    worst = 0.0
    for _ in range(n_random):
        a = float(np.exp(rng.uniform(np.log(1e-3), np.log(1e3))))
        w = float(rng.uniform(0.2, 3.0))
        vals = np.exp(-((np.log(grid / a)) ** 2) / (2 * w * w)) * grid ** -q
        rf = GridFunction(grid, vals, m)
        worst = max(worst, weighted_norm(hardy_apply(which, c, rf), p) / weighted_norm(rf, p))
    rep.add("random_within_bound", worst / C, worst <= 1.02 * C, expected="<= 1.02")
    return rep


# ---------------------------------------------------------------------------
# the S^{alpha,beta}(t) family


@dataclass(frozen=True)
class SabSpec:
    alpha: float
    beta: float
    M: int = 1
    m: float = 0.0
    kappa: float = 4.0
    theta: float = 0.0

    def admissible(self, p: float) -> bool:
        h = (self.M + self.m) / p
        return self.alpha < h < self.M - self.beta


def _sphere_average_factor(M: int, a):
    """∫_{S^{M-1}} exp(a cos θ) dσ times exp(-a), for a >= 0."""
    a = np.asarray(a, dtype=float)
    order = M / 2.0 - 1.0
    tiny = a < 1e-300
    safe = np.where(tiny, 1.0, a)
    val = (2.0 * np.pi) ** (M / 2.0) * safe ** (-order) * bessel_i(order, safe, scaled=True)
    area = 2.0 * np.pi ** (M / 2.0) / gamma(M / 2.0)
    return np.where(tiny, area, val)


def sab_apply(spec: SabSpec, t: float, f: Source, y=None, order: int = 8) -> GridFunction:
    """S^{α,β}(t) applied to a radial profile on R^M, evaluated at radii ``y``.

    The angular integral is done in closed form, leaving
    t^{-M/2} (|y|/√t ∧ 1)^{-α} ∫ (r/√t ∧ 1)^{-β} f(r) r^{M-1} Φ(y, r) dr
    with Φ(y, r) = ∫_{S^{M-1}} exp(-|y - rσ|²/κt) dσ.
    """
    if t <= 0:
        raise ValueError("t must be positive")
    if y is None:
        if not isinstance(f, GridFunction):
            raise ValueError("output nodes are required for a Profile source")
        y = f.grid
    y = np.asarray(y, dtype=float)
    st = math.sqrt(t)
    kt = spec.kappa * t
    w = math.sqrt(kt * GAUSS_CUTOFF)
    a_src, b_src = _source_range(f)
    out = np.zeros(y.size)
    for i, yi in enumerate(y):
        lo, hi = max(a_src, yi - w), min(b_src, yi + w)
        if not lo < hi:
            continue
        edges = _source_edges(f, lo, hi)
        extra = [p for p in (yi, st) if lo < p < hi]
        edges = refine(np.union1d(edges, extra), 0.25 * math.sqrt(kt))
        if edges[0] > 0 and edges[-1] / edges[0] > 2:
            # resolve power-law sources near the origin on log panels
            edges = np.union1d(edges, np.geomspace(edges[0], edges[-1], int(8 * np.log2(edges[-1] / edges[0])) + 2))
        x, wq = panel_rule(edges, order)
        ang = _sphere_average_factor(spec.M, 2.0 * yi * x / kt)
        integrand = (
            np.minimum(x / st, 1.0) ** (-spec.beta)
            * f(x)
            * x ** (spec.M - 1)
            * np.exp(-((yi - x) ** 2) / kt)
            * ang
        )
        out[i] = np.sum(wq * integrand)
    out *= t ** (-spec.M / 2.0) * np.minimum(y / st, 1.0) ** (-spec.alpha)
    m = f.m if isinstance(f, GridFunction) else spec.m
    return GridFunction(y, out, m)


def radial_norm(f: GridFunction, p: float, M: int, m: float, lo=None, hi=None) -> float:
    """L^p(|y|^m dy) norm on R^M of a radial profile, up to the sphere constant."""
    return weighted_norm(GridFunction(f.grid, f.values, m + M - 1), p, lo, hi)


def _decade_increments(y, integrand, k_max):
    """∫ over [10^{-k-1}, 10^{-k}] for k = 0..k_max-1 (trapezoid in log y)."""
    logy = np.log(y)
    out = []
    for k in range(k_max):
        a, b = 10.0 ** (-k - 1), 10.0 ** (-k)
        sel = (y >= a * (1 - 1e-12)) & (y <= b * (1 + 1e-12))
        out.append(_trapezoid(integrand[sel] * y[sel], logy[sel]))
    return np.array(out)


@lru_cache(maxsize=512)
def _sab_alpha_side(alpha, M, m, p, kappa, k_max, per_decade):
    """Per-decade pieces of ||S f0||^p on [10^-k_max, 1] for f0 = 1 on [1, 2]."""
    spec = SabSpec(alpha, 0.0, M, m, kappa)
    y = np.geomspace(10.0 ** (-k_max), 1.0, per_decade * k_max + 1)
    out = sab_apply(spec, 1.0, Profile(lambda r: np.ones_like(r), (1.0, 2.0)), y)
    return tuple(_decade_increments(y, np.abs(out.values) ** p * y ** (m + M - 1), k_max))


@lru_cache(maxsize=512)
def _sab_beta_side(beta, M, m, p, kappa, k_max, per_decade):
    """(||S f_n|| / ||f_n||)^{p'} for f_n = r^{-(β+m)/(p-1)} on [10^-k, 1], k = 1..k_max."""
    spec = SabSpec(0.0, beta, M, m, kappa)
    mu = m + M - 1
    pc = p / (p - 1.0)
    power = -(beta + m) / (p - 1.0)
    y_far = np.concatenate([np.linspace(1.0, 4.0, 49), np.linspace(4.0, 12.0, 33)[1:]])
    # S is linear, so accumulate the output decade by decade
    acc = np.zeros(y_far.size)
    den_p = 0.0
    vals = []
    for k in range(1, k_max + 1):
        lo, hi = 10.0 ** (-k), 10.0 ** (1 - k)
        src = Profile(lambda r, a=power: r ** a, (lo, hi))
        acc = acc + sab_apply(spec, 1.0, src, y_far).values
        rr, ww = log_panel_rule(lo, hi, per_decade=per_decade)
        den_p += float(np.sum(ww * (rr ** power) ** p * rr ** mu))
        num = radial_norm(GridFunction(y_far, acc, m), p, M, m)
        vals.append((num / den_p ** (1.0 / p)) ** pc)
    return tuple(vals)


def sab_threshold_probe(
    spec: SabSpec,
    p: float,
    n_max: float = 1e12,
    per_decade: int = 16,
    ratio_cut: float = 0.9,
) -> ProbeReport:
    """Numerical boundedness verdict for S^{α,β}(1) on radial L^p_m(R^M).

    Two families are pushed towards the origin over the scales 1/n, n = 10..n_max:

    * concentrating output: ||S f0||^p on [1/n, 1] for a fixed bump f0 on [1, 2];
    * concentrating input: the ratio ||S f_n|| / ||f_n|| with the dual extremal
      f_n = r^{-(β+m)/(p-1)} on [1/n, 1], measured on [1, ∞) and raised to p'.

    Each quantity is a sum of per-decade contributions.  For a bounded operator
    the contributions shrink geometrically; otherwise they stay level or grow.
    The verdict compares the mean ratio of consecutive contributions over the
    last decades with ``ratio_cut``.
    """
    k_max = int(round(math.log10(n_max)))
    M, m = spec.M, spec.m
    rep = ProbeReport(
        "sab-threshold",
        config={"alpha": spec.alpha, "beta": spec.beta, "M": M, "m": m, "p": p, "kappa": spec.kappa},
    )
    # the output side only sees r >= 1 in the source, where the β factor is 1,
    # and the input side is measured on y >= 1, where the α factor is 1
    inc_a = np.array(_sab_alpha_side(spec.alpha, M, m, p, spec.kappa, k_max, per_decade))
    vals = np.array(_sab_beta_side(spec.beta, M, m, p, spec.kappa, k_max, per_decade))
    inc_b = np.diff(np.concatenate([[0.0], vals]))

    def verdict(inc):
        tail = inc[-4:]
        if np.all(np.abs(tail) <= 1e-11 * np.abs(inc).sum()):
            # the sum has converged to rounding level
            return 0.0, True
        with np.errstate(divide="ignore", invalid="ignore"):
            r = tail[1:] / tail[:-1]
        mean = float(np.mean(r))
        return mean, mean < ratio_cut

    ra, ok_a = verdict(inc_a)
    rb, ok_b = verdict(inc_b)
    bounded = ok_a and ok_b
    rep.info.update(
        {
            "alpha_side_ratio": ra,
            "beta_side_ratio": rb,
            "beta_side_growth_10_to_1e4": float((vals[3] / vals[0]) ** (1.0 - 1.0 / p)) if vals.size > 3 else None,
            "verdict": "bounded" if bounded else "unbounded",
        }
    )
    expected = spec.admissible(p)
    rep.add("verdict_matches_condition", "bounded" if bounded else "unbounded", bounded == expected,
            expected="bounded" if expected else "unbounded")
    return rep


# ---------------------------------------------------------------------------
# maximal function and Muckenhoupt constants


def maximal_function(f: GridFunction, weight: Optional[Callable] = None) -> GridFunction:
    """Uncentred maximal function over grid intervals, averages w.r.t. y^m w(y) dy."""
    g = f.grid
    if g.size == 1:
        return GridFunction(g, np.abs(np.asarray(f.values, dtype=float)), f.m)
    dens = g ** f.m * (1.0 if weight is None else weight(g))
    F = _cumtrapz(np.abs(np.asarray(f.values, dtype=float)) * dens, g)
    W = _cumtrapz(dens, g)
    n = g.size
    with np.errstate(divide="ignore", invalid="ignore"):
        avg = (F[None, :] - F[:, None]) / (W[None, :] - W[:, None])
    iu = np.triu(np.ones((n, n), dtype=bool), 1)
    avg = np.where(iu, avg, -np.inf)
    # best[a, i] = max over b >= i of avg[a, b]
    best = np.maximum.accumulate(avg[:, ::-1], axis=1)[:, ::-1]
    # restrict to a <= i and take the max over a
    a_le_i = np.triu(np.ones((n, n), dtype=bool))
    out = np.where(a_le_i, best, -np.inf).max(axis=0)
    # shrinking intervals recover the point value (Lebesgue differentiation)
    out = np.maximum(out, np.abs(np.asarray(f.values, dtype=float)))
    return GridFunction(g, out, f.m)


def _power_integral(s, a, b):
    """∫_a^b r^s dr for 0 <= a < b (s > -1 when a = 0)."""
    if s == -1.0:
        return math.log(b / a)
    return (b ** (s + 1) - a ** (s + 1)) / (s + 1)


def _ball_power_integral(M: int, s: float, d: float, r: float) -> float:
    """∫_{B(x0, r)} |y|^s dy with |x0| = d > r (ball away from the origin)."""
    if M == 1:
        return _power_integral(s, d - r, d + r)
    from scipy.integrate import IntegrationWarning, quad

    area = 2.0 * math.pi ** (M / 2.0) / math.gamma(M / 2.0)

    def cap_fraction(rho):
        cos_t = (rho * rho + d * d - r * r) / (2.0 * rho * d)
        cos_t = min(1.0, max(-1.0, cos_t))
        sin2 = 1.0 - cos_t * cos_t
        half = 0.5 * betainc((M - 1) / 2.0, 0.5, sin2)
        return half if cos_t >= 0 else 1.0 - half

    # geometric panels from the near edge resolve the power behaviour when the
    # ball almost touches the origin
    lo, hi = d - r, d + r
    edges = np.geomspace(lo, hi, max(2, int(np.ceil(2 * np.log10(hi / lo)))) + 1)
    val = 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        for a, b in zip(edges[:-1], edges[1:]):
            part, _ = quad(lambda rho: rho ** (s + M - 1) * cap_fraction(rho), a, b, limit=100, epsabs=0, epsrel=1e-11)
            val += part
    return area * val


def ap_ball_constant(k: float, M: int, m: float, p: float, d: float, r: float = 1.0) -> float:
    """(avg w)(avg w^{1-p'})^{p-1} on one ball B(x0, r), |x0| = d > r, w = |y|^k, measure |y|^m dy."""
    pc = p / (p - 1.0)
    mass = _ball_power_integral(M, m, d, r)
    avg_w = _ball_power_integral(M, k + m, d, r) / mass
    avg_dual = _ball_power_integral(M, k * (1.0 - pc) + m, d, r) / mass
    return avg_w * avg_dual ** (p - 1.0)


def ap_constant_estimate(k: float, M: int, m: float, p: float, n_balls: int = 64, r_min: float = 1e-4) -> float:
    """Max of the A_p quotient over ``n_balls`` balls approaching the origin.

    Power weights are dilation invariant, so the balls have unit radius and
    their distance to the origin (the gap) runs geometrically from 10 down to
    ``r_min``.  The quotient is bounded in the gap exactly when w is in A_p.
    """
    gaps = np.geomspace(10.0, r_min, n_balls)
    return float(max(ap_ball_constant(k, M, m, p, 1.0 + g) for g in gaps))


def muckenhoupt_probe(
    k: float, M: int, m: float, p: float, r_min: float = 1e-4, n_balls: int = 64, decades: int = 10
) -> ProbeReport:
    """Compare the empirical A_p estimate with the closed-form classifier.

    The estimate is tracked as the gap shrinks decade by decade.  In the class
    the per-decade increments shrink geometrically; outside they do not.
    """
    inside = muckenhoupt_radial(M, m, k, p).in_Ap
    fine = ap_constant_estimate(k, M, m, p, n_balls, r_min)
    coarse = ap_constant_estimate(k, M, m, p, n_balls // 2, r_min)
    path = np.maximum.accumulate([ap_constant_estimate(k, M, m, p, 8, 10.0 ** -j) for j in range(decades + 1)])
    inc = np.diff(path)
    tail = inc[-5:]
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = tail[1:] / tail[:-1]
    # an increment below 1e-12 of the running value means the path has converged
    live = tail[:-1] > 1e-12 * path[-len(tail):-1]
    ratio = float(np.mean(ratios)) if np.all(live) else 0.0
    converging = ratio < 1.0
    rep = ProbeReport("muckenhoupt", config={"k": k, "M": M, "m": m, "p": p, "r_min": r_min, "n_balls": n_balls})
    rep.info.update({
        "estimate": fine,
        "estimate_half_balls": coarse,
        "decade_path": path,
        "increment_ratio": ratio,
        "in_Ap": inside,
    })
    rep.add("n_balls_stable", fine / coarse - 1.0, abs(fine / coarse - 1.0) < 0.05, tolerance=0.05)
    rep.add("verdict_matches_class", ratio, converging == inside, expected="< 1" if inside else ">= 1")
    return rep
