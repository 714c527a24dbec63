"""Verification suites: each one is a function ``cfg -> ProbeReport``.

Suites run their independent checks on a thread pool whose size is capped by
the ``CSK_THREADS`` environment variable.  All randomness comes from
``numpy.random.default_rng(cfg["seed"])`` and results are assembled in
submission order, so a report depends only on its configuration.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import halfline_ops as ho
from . import inequalities, tensor_solver, traces
from .kernels import (
    KernelSpec,
    envelope_check,
    green_function,
    heat_kernel,
    heat_kernel_dy,
)
from .params import (
    NegativeDiscriminant,
    OperatorParams,
    SpaceParams,
    classify_realization,
    generation_interval,
    indicial_roots,
    muckenhoupt_radial,
    rellich_gamma,
    similarity_shift,
)
from .quadrature import grade, panel_rule, refine
from .report import ProbeReport
from .specfun import bessel_i, bessel_k


class UnknownSuite(KeyError):
    pass


def thread_count() -> int:
    raw = os.environ.get("CSK_THREADS", "")
    try:
        n = int(raw)
    except ValueError:
        n = os.cpu_count() or 1
    return max(1, n)


def run_parallel(fn: Callable, items) -> list:
    """``[fn(x) for x in items]`` on a capped thread pool, order preserved."""
    items = list(items)
    n = min(thread_count(), len(items)) or 1
    if n == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


def standard_kernels() -> list:
    """One representative per kernel family, none of them closed-form."""
    return [KernelSpec.neumann(0.5), KernelSpec.dirichlet(-0.3), KernelSpec.operator(1.0, 0.0)]


def _spec_from(cfg: dict) -> KernelSpec:
    kind = cfg.get("kernel", "operator")
    c = float(cfg.get("c", 0.0))
    if kind == "neumann":
        return KernelSpec.neumann(c)
    if kind == "dirichlet":
        return KernelSpec.dirichlet(c)
    return KernelSpec.operator(float(cfg.get("b", 0.0)), c, bool(cfg.get("alternate", False)))


def _rel(a, b):
    return abs(a - b) / abs(b)


# ---------------------------------------------------------------------------
# params


def suite_params(cfg: dict) -> ProbeReport:
    rng = np.random.default_rng(cfg.get("seed", 0))
    n = int(cfg.get("samples", 1000))
    rep = ProbeReport("params", config={"samples": n})
    c = rng.uniform(-3, 5, n)
    b = rng.uniform(-2, 6, n)
    keep = b + ((c - 1) / 2) ** 2 >= 0
    vieta = 0.0
    shift = 0.0
    for bi, ci in zip(b[keep], c[keep]):
        op = OperatorParams(bi, ci)
        _, s1, s2 = indicial_roots(op)
        vieta = max(vieta, abs(s1 + s2 - (ci - 1)), abs(s1 * s2 + bi))
        k = rng.uniform(-2, 2)
        op2, _ = similarity_shift(op, SpaceParams(0.0, 2.0), k)
        _, t1, t2 = indicial_roots(op2)
        shift = max(shift, abs(op2.D - op.D), abs(t1 - s1 - k), abs(t2 - s2 - k))
    rep.add("root_sum_and_product", vieta, vieta < 1e-12 * 50, tolerance=1e-12)
    rep.add("similarity_shift", shift, shift < 1e-10, tolerance=1e-10)

    # D >= 1: the maximal and minimal windows cover the generation window
    miss = 0
    for _ in range(n):
        bc = rng.uniform(-1, 4)
        D = rng.uniform(1.0, 6.0)
        op = OperatorParams(D - ((bc - 1) / 2) ** 2, bc)
        lo, hi = generation_interval(op)
        q = rng.uniform(lo, hi)
        p = rng.uniform(1.1, 4.0)
        cls = classify_realization(op, SpaceParams(q * p - 1.0, p))
        miss += not (cls.unique and (cls.maximal or cls.minimal))
    rep.add("window_covered_when_D_ge_1", miss, miss == 0, expected=0)

    worst = 0.0
    for _ in range(n):
        p = rng.uniform(1.05, 5.0)
        op = OperatorParams(rng.uniform(-1, 5), rng.uniform(-2, 4))
        if op.D < 0:
            continue
        _, s1, s2 = indicial_roots(op)
        lhs = op.b + rellich_gamma(op.c, p)
        rhs = (1 / p - s1 - 2) * (s2 + 2 - 1 / p)
        worst = max(worst, abs(lhs - rhs) / max(1.0, abs(rhs)))
    rep.add("rellich_identity", worst, worst < 1e-12, tolerance=1e-12)

    bad = 0
    for _ in range(n):
        M = int(rng.integers(1, 4))
        m = rng.uniform(-0.9, 3)
        k = rng.uniform(-5, 10)
        p1 = rng.uniform(1.0, 4.0)
        p2 = p1 + rng.uniform(0, 3)
        if muckenhoupt_radial(M, m, k, p1).in_Ap and not muckenhoupt_radial(M, m, k, p2).in_Ap:
            bad += 1
    rep.add("ap_monotone_in_p", bad, bad == 0, expected=0)

    try:
        OperatorParams(-1.0, 1.0).D
        indicial_roots(OperatorParams(-1.0, 1.0))
        raised = False
    except NegativeDiscriminant:
        raised = True
    rep.add("negative_discriminant_rejected", raised, raised)
    return rep


# ---------------------------------------------------------------------------
# special functions


def suite_specfun(cfg: dict) -> ProbeReport:
    orders = cfg.get("orders", [-0.75, -0.5, 0.0, 0.5, 1.5, 3.0, 7.25])
    rep = ProbeReport("specfun", config={"orders": orders})
    x = np.geomspace(1e-6, 1e4, 2000)
    x_wide = np.geomspace(1e-10, 1e6, 3000)
    for nu in orders:
        def quotient(xx):
            return bessel_i(nu, xx, scaled=True) * np.sqrt(xx) / np.minimum(1.0, xx) ** (nu + 0.5)

        qv = quotient(x)
        c1, c2 = float(qv.min()), float(qv.max())
        qw = quotient(x_wide)
        ok = 0 < c1 <= c2 < np.inf and qw.min() >= 0.95 * c1 and qw.max() <= 1.05 * c2
        rep.add("two_sided_envelope", [c1, c2], ok, params={"nu": nu})
        wr = x * (bessel_k(abs(nu), x, scaled=True) * bessel_i(abs(nu) + 1, x, scaled=True)
                  + bessel_k(abs(nu) + 1, x, scaled=True) * bessel_i(abs(nu), x, scaled=True))
        err = float(np.max(np.abs(wr - 1.0)))
        rep.add("wronskian", err, err < 1e-9, params={"nu": abs(nu)}, tolerance=1e-9)
        iv = bessel_i(nu, x) if nu >= 0 else None
        if iv is not None:
            rep.add("i_increasing", bool(np.all(np.diff(iv[x < 700]) > 0)), bool(np.all(np.diff(iv[x < 700]) > 0)), params={"nu": nu})
        kv = bessel_k(nu, x)
        rep.add("k_decreasing", bool(np.all(np.diff(kv[kv > 0]) < 0)), bool(np.all(np.diff(kv[kv > 0]) < 0)), params={"nu": nu})
    return rep


# ---------------------------------------------------------------------------
# kernels


def _gaussians(t, y, r, sign):
    g = (4 * np.pi * t) ** -0.5 * np.exp(-((y - r) ** 2) / (4 * t))
    if sign > 0:
        return g * (1.0 + np.exp(-y * r / t))
    return -g * np.expm1(-y * r / t)


def suite_closed_form(cfg: dict) -> ProbeReport:
    n = int(cfg.get("n_per_axis", 10))
    tol = float(cfg.get("tol", 1e-10))
    t, y, r = np.meshgrid(np.geomspace(1e-2, 10, n), np.geomspace(1e-2, 10, n), np.geomspace(1e-2, 10, n), indexing="ij")
    t, y, r = t.ravel(), y.ravel(), r.ravel()
    rep = ProbeReport("closed-form", config={"points": int(t.size), "tol": tol})
    for spec, sign in ((KernelSpec.neumann(0.0), 1), (KernelSpec.dirichlet(0.0), -1)):
        ref = _gaussians(t, y, r, sign)
        got = heat_kernel(spec, t, y, r)
        live = ref > 1e-280
        err = float(np.max(np.abs(got[live] / ref[live] - 1)))
        rep.add(f"{spec.bc.value}_heat_kernel", err, err < tol, params={"compared": int(live.sum())}, tolerance=tol)
        lam = np.array([0.5, 1.0, 4.0])[:, None]
        yy, rr = y[:200][None, :], r[:200][None, :]
        s = np.sqrt(lam)
        gref = (np.exp(-s * np.abs(yy - rr)) + sign * np.exp(-s * (yy + rr))) / (2 * s)
        gerr = float(np.max(np.abs(green_function(spec, lam, yy, rr) / gref - 1)))
        rep.add(f"{spec.bc.value}_green_function", gerr, gerr < tol, tolerance=tol)
    return rep


def suite_conservation(cfg: dict) -> ProbeReport:
    rng = np.random.default_rng(cfg.get("seed", 0))
    cs = cfg.get("c_values", [-0.5, 0.0, 1.0, 3.0])
    n = int(cfg.get("n_triples", 50))
    tol = float(cfg.get("tol", 1e-8))
    rep = ProbeReport("conservation", config={"c_values": cs, "n_triples": n, "tol": tol})
    triples = [(float(10 ** rng.uniform(-3, 2)), float(10 ** rng.uniform(-3, 1.5)), cs[i % len(cs)]) for i in range(n)]

    def one(tr):
        t, y, c = tr
        return float(ho.kernel_mass(KernelSpec.neumann(c), t, np.array([y]))[0])

    masses = run_parallel(one, triples)
    err = max(abs(mv - 1.0) for mv in masses)
    rep.add("mass_equals_one", err, err < tol, tolerance=tol)
    return rep


def chapman_kolmogorov_integral(spec: KernelSpec, t: float, s: float, y: float, w: float, order: int = 10) -> float:
    """∫_0^∞ p(t, y, ρ) p(s, ρ, w) dρ by graded Gauss panels."""
    W = math.sqrt(160.0 * max(t, s))
    lo = max(0.0, min(y, w) - W)
    hi = max(y, w) + W
    edges = refine([lo, y, w, hi], 0.25 * math.sqrt(min(t, s)))
    edges = grade(edges)
    zexp = spec.rho_exponent_at_zero + spec.y_exponent_at_zero if lo == 0.0 else None
    x, wq = panel_rule(edges, order, zexp)
    return float(np.sum(wq * heat_kernel(spec, t, y, x) * heat_kernel(spec, s, x, w)))


def suite_chapman_kolmogorov(cfg: dict) -> ProbeReport:
    rng = np.random.default_rng(cfg.get("seed", 0))
    n = int(cfg.get("n_tuples", 20))
    tol = float(cfg.get("tol", 1e-6))
    rep = ProbeReport("chapman-kolmogorov", config={"n_tuples": n, "tol": tol})
    jobs = []
    for spec in standard_kernels():
        for _ in range(n):
            t, s = 10 ** rng.uniform(-2, 1, 2)
            y, w = 10 ** rng.uniform(-2, 0.7, 2)
            jobs.append((spec, float(t), float(s), float(y), float(w)))

    def one(job):
        spec, t, s, y, w = job
        return _rel(chapman_kolmogorov_integral(spec, t, s, y, w), heat_kernel(spec, t + s, y, w))

    errs = run_parallel(one, jobs)
    for k, spec in enumerate(standard_kernels()):
        e = max(errs[k * n:(k + 1) * n])
        rep.add("semigroup_law", e, e < tol, params=spec.describe(), tolerance=tol)
    return rep


def laplace_transform(spec: KernelSpec, lam: float, y: float, rho: float, width: float = 0.2, order: int = 10) -> float:
    """∫_0^∞ e^{-λt} p(t, y, ρ) dt, in the variable u = log t."""
    u_lo = -80.0 + 2.0 * math.log(min(1.0, y, rho))
    u_hi = math.log(60.0 / lam)
    edges = np.linspace(u_lo, u_hi, int(math.ceil((u_hi - u_lo) / width)) + 1)
    u, w = panel_rule(edges, order)
    t = np.exp(u)
    with np.errstate(under="ignore"):
        vals = t * np.exp(-lam * t) * heat_kernel(spec, t, y, rho)
    return float(np.sum(w * vals))


def suite_laplace(cfg: dict) -> ProbeReport:
    lams = cfg.get("lams", [0.5, 1.0, 4.0])
    tol = float(cfg.get("tol", 1e-6))
    pairs = [(0.3, 0.7), (1.0, 1.0), (1.0, 2.5), (0.05, 0.2), (2.0, 0.4), (3.0, 3.1)]
    rep = ProbeReport("laplace", config={"lams": lams, "tol": tol, "pairs": pairs})
    for spec in standard_kernels():
        jobs = [(lam, y, r) for lam in lams for (y, r) in pairs]
        errs = run_parallel(lambda j, spec=spec: _rel(laplace_transform(spec, *j), green_function(spec, *j)), jobs)
        for lam in lams:
            e = max(err for err, j in zip(errs, jobs) if j[0] == lam)
            rep.add("laplace_equals_green", e, e < tol, params={**spec.describe(), "lam": lam}, tolerance=tol)
    return rep


def pde_residual(spec: KernelSpec, t, y, r, h: float) -> float:
    """Sum over points of |∂_t p - A_y p| / scale with centred differences of relative step h."""
    b, c = spec.op.b, spec.op.c
    ht, hy = h * t, h * y
    pt = (heat_kernel(spec, t + ht, y, r) - heat_kernel(spec, t - ht, y, r)) / (2 * ht)
    p0 = heat_kernel(spec, t, y, r)
    pp, pm = heat_kernel(spec, t, y + hy, r), heat_kernel(spec, t, y - hy, r)
    py = (pp - pm) / (2 * hy)
    pyy = (pp - 2 * p0 + pm) / hy ** 2
    res = np.abs(pt - (pyy + c / y * py - b / y ** 2 * p0))
    scale = np.abs(pt) + np.abs(pyy) + np.abs(c * py / y) + np.abs(b * p0 / y ** 2)
    return float(np.sum(res / scale))


def suite_pde_residual(cfg: dict) -> ProbeReport:
    rng = np.random.default_rng(cfg.get("seed", 0))
    n = int(cfg.get("n_points", 20))
    steps = cfg.get("steps", [0.04, 0.02, 0.01])
    rep = ProbeReport("pde-residual", config={"n_points": n, "steps": steps})
    for spec in standard_kernels():
        t = 10 ** rng.uniform(-1, 1, n)
        y = 10 ** rng.uniform(-1, 0.5, n)
        r = y * 10 ** rng.uniform(-0.3, 0.3, n)
        res = [pde_residual(spec, t, y, r, h) for h in steps]
        orders = [math.log2(res[i] / res[i + 1]) for i in range(len(res) - 1)]
        rep.add("observed_order", min(orders), min(orders) >= 1.8, params={**spec.describe(), "residuals": res}, expected=2.0)
    return rep


def suite_gradient(cfg: dict) -> ProbeReport:
    rng = np.random.default_rng(cfg.get("seed", 0))
    n = int(cfg.get("n_tuples", 100))
    tol = float(cfg.get("tol", 1e-6))
    rep = ProbeReport("gradient", config={"n_tuples": n, "tol": tol})
    specs = standard_kernels() + [KernelSpec.neumann(0.0), KernelSpec.dirichlet(0.5), KernelSpec.operator(0.1, 0.5)]
    worst = 0.0
    count = 0
    while count < n:
        spec = specs[count % len(specs)]
        t = 10 ** rng.uniform(-2, 2)
        y, r = 10 ** rng.uniform(-2, 1, 2)
        if (y - r) ** 2 / (4 * t) > 200:
            continue  # kernel underflows; nothing to compare
        h = 1e-3 * min(y, math.sqrt(t))
        f = [heat_kernel(spec, t, y + k * h, r) for k in (-2, -1, 1, 2)]
        fd = (f[0] - 8 * f[1] + 8 * f[2] - f[3]) / (12 * h)
        an = heat_kernel_dy(spec, t, y, r)
        worst = max(worst, abs(fd - an) / abs(an))
        count += 1
    rep.add("gradient_vs_finite_difference", worst, worst < tol, tolerance=tol)
    return rep


def suite_symmetry(cfg: dict) -> ProbeReport:
    rng = np.random.default_rng(cfg.get("seed", 0))
    n = int(cfg.get("n_points", 200))
    rep = ProbeReport("symmetry", config={"n_points": n})
    t = 10 ** rng.uniform(-2, 2, n)
    y = 10 ** rng.uniform(-2, 1, n)
    r = y * 10 ** rng.uniform(-0.5, 0.5, n)
    for spec in standard_kernels() + [KernelSpec.operator(0.5, 2.0), KernelSpec.operator(-0.05, 0.5, alternate=True)]:
        c = spec.op.c
        lhs = y ** c * heat_kernel(spec, t, y, r)
        rhs = r ** c * heat_kernel(spec, t, r, y)
        live = rhs > 1e-250
        e = float(np.max(np.abs(lhs[live] / rhs[live] - 1)))
        rep.add("weighted_symmetry", e, e < 1e-12, params=spec.describe(), tolerance=1e-12)
        s = 10 ** rng.uniform(-1, 1, n)
        sc = s * heat_kernel(spec, s * s * t, s * y, s * r)
        base = heat_kernel(spec, t, y, r)
        live = base > 1e-250
        e = float(np.max(np.abs(sc[live] / base[live] - 1)))
        rep.add("parabolic_scaling", e, e < 1e-12, params=spec.describe(), tolerance=1e-12)
    return rep


def suite_envelope(cfg: dict) -> ProbeReport:
    n = int(cfg.get("n_samples", 20000))
    seed = int(cfg.get("seed", 0))
    rep = ProbeReport("envelope", config={"n_samples": n, "seed": seed})
    specs = standard_kernels() + [KernelSpec.neumann(0.0), KernelSpec.dirichlet(0.0)]
    jobs = [(s, g) for s in specs for g in (False, True)]
    subs = run_parallel(lambda j: envelope_check(j[0], n_samples=n, gradient=j[1], seed=seed), jobs)
    for (spec, grad), sub in zip(jobs, subs):
        rep.extend(sub, prefix=f"{spec.bc.value}(b={spec.op.b},c={spec.op.c}){'_grad' if grad else ''}/")
    return rep


def suite_domain_limit(cfg: dict) -> ProbeReport:
    rep = ProbeReport("domain-limit", config={})
    specs = [KernelSpec.neumann(0.0), KernelSpec.neumann(-0.5), KernelSpec.neumann(2.0), KernelSpec.dirichlet(0.0),
             KernelSpec.dirichlet(-0.5), KernelSpec.operator(1.0, 0.0), KernelSpec.operator(0.1, 0.5)]
    for spec in specs:
        rep.extend(ho.boundary_limit_probe(spec, j_max=int(cfg.get("j_max", 16))),
                   prefix=f"{spec.bc.value}(b={spec.op.b},c={spec.op.c})/")
    return rep


# ---------------------------------------------------------------------------
# half-line operators


HARDY_TRIPLES = [
    (0.0, 0.0, 2.0, "H1"), (1.0, 0.0, 2.0, "H1"), (0.0, 3.0, 2.0, "H2"), (0.5, 1.0, 3.0, "H1"),
    (-0.5, 2.0, 1.5, "H2"), (2.0, 0.0, 4.0, "H1"), (0.0, 2.0, 2.0, "H2"), (1.0, 5.0, 2.0, "H2"),
    (0.2, -0.5, 2.0, "H1"), (-0.4, 0.0, 3.0, "H1"),
]


def suite_hardy(cfg: dict) -> ProbeReport:
    triples = cfg.get("triples", HARDY_TRIPLES)
    rep = ProbeReport("hardy", config={"triples": [list(t) for t in triples]})
    subs = run_parallel(lambda tr: ho.hardy_probe(tr[0], SpaceParams(tr[1], tr[2]), tr[3]), triples)
    for tr, sub in zip(triples, subs):
        rep.extend(sub, prefix=f"{tr[3]}(c={tr[0]},m={tr[1]},p={tr[2]})/")
    return rep


def sab_grid(ps=(1.5, 2.0, 3.0), M: int = 1, m: float = 0.0, offsets=(-0.8, -0.3, -0.1, 0.1, 0.4)):
    """(α, β, p) points around the two thresholds α* = (M+m)/p and β* = M - (M+m)/p."""
    out = []
    for p in ps:
        a_star = (M + m) / p
        b_star = M - a_star
        for da in offsets:
            for db in offsets:
                out.append((round(a_star + da, 12), round(b_star + db, 12), p))
    return out


def suite_sab_threshold(cfg: dict) -> ProbeReport:
    M = int(cfg.get("M", 1))
    m = float(cfg.get("m", 0.0))
    kappas = cfg.get("kappas", [4.0, 8.0])
    grid = sab_grid(tuple(cfg.get("ps", (1.5, 2.0, 3.0))), M, m)
    rep = ProbeReport("sab-threshold", config={"M": M, "m": m, "kappas": kappas, "points": len(grid)})
    jobs = [(a, b, p, k) for (a, b, p) in grid for k in kappas]
    subs = run_parallel(lambda j: ho.sab_threshold_probe(ho.SabSpec(j[0], j[1], M, m, j[3]), j[2]), jobs)
    verdicts: dict = {}
    for j, sub in zip(jobs, subs):
        verdicts.setdefault(j[:3], []).append(sub.info["verdict"])
        rep.extend(sub, prefix=f"a={j[0]},b={j[1]},p={j[2]},kappa={j[3]}/")
    stable = all(len(set(v)) == 1 for v in verdicts.values())
    rep.add("verdict_independent_of_kappa", stable, stable)
    return rep


MUCKENHOUPT_SAMPLES = [
    # (k, M, m, p): in-class points, then points at least one unit outside
    (0.9, 1, 0.0, 2.0), (-0.9, 1, 0.0, 2.0), (0.5, 1, 0.5, 3.0), (0.0, 1, 0.0, 1.5),
    (2.4, 2, 0.5, 2.0), (6.5, 3, 0.5, 3.0),
    (3.0, 1, 0.0, 2.0), (-2.5, 1, 0.0, 2.0), (2.5, 1, 0.5, 1.5), (4.5, 3, 0.0, 2.0),
    (-4.0, 2, 0.5, 2.0), (7.5, 2, 0.0, 3.0),
]


def suite_muckenhoupt(cfg: dict) -> ProbeReport:
    samples = cfg.get("samples", MUCKENHOUPT_SAMPLES)
    r_min = float(cfg.get("r_min", 1e-4))
    rep = ProbeReport("muckenhoupt", config={"samples": [list(s) for s in samples], "r_min": r_min})
    subs = run_parallel(lambda s: ho.muckenhoupt_probe(s[0], s[1], s[2], s[3], r_min), samples)
    for s, sub in zip(samples, subs):
        tag = f"k={s[0]},M={s[1]},m={s[2]},p={s[3]}/"
        rep.extend(sub, prefix=tag)
        if not sub.info["in_Ap"]:
            est = sub.info["estimate"]
            rep.add(tag + "exceeds_1e3", est, est > 1e3, expected=1e3)
    return rep


def suite_domination(cfg: dict) -> ProbeReport:
    return inequalities.inequality_probe(float(cfg.get("eps", 0.1)))


def suite_maximal(cfg: dict) -> ProbeReport:
    rep = ProbeReport("maximal", config={})
    for k, p, m in cfg.get("weights", [(0.5, 2.0, 0.0), (-0.5, 2.0, 0.0), (1.2, 3.0, 0.0), (0.4, 2.0, 0.5)]):
        rep.extend(inequalities.maximal_weight_check(k, p, m, seed=int(cfg.get("seed", 0))), prefix=f"k={k},p={p},m={m}/")
    return rep


# ---------------------------------------------------------------------------
# half-space solver


CLOSEDNESS_POINTS = [
    # (kernel, b, c, m, p)
    ("dirichlet", 0.0, 0.0, 0.0, 2.0),
    ("operator", 1.0, 0.0, 0.0, 2.0),
    ("neumann", 0.0, 0.5, 0.2, 3.0),
]


def suite_closedness(cfg: dict) -> ProbeReport:
    points = cfg.get("points", CLOSEDNESS_POINTS)
    bad = cfg.get("inadmissible", [("dirichlet", 0.0, 0.0, 5.0, 2.0)])
    ccfg = tensor_solver.ClosednessConfig(N=int(cfg.get("N", 1)), n_bumps=int(cfg.get("n_bumps", 6)), seed=int(cfg.get("seed", 0)))
    rep = ProbeReport("closedness", config={"points": [list(p) for p in points], "inadmissible": [list(p) for p in bad],
                                            "N": ccfg.N, "n_bumps": ccfg.n_bumps})
    allp = list(points) + list(bad)

    def one(pt):
        kind, b, c, m, p = pt
        spec = _spec_from({"kernel": kind, "b": b, "c": c})
        return tensor_solver.closedness_probe(spec, SpaceParams(m, p), ccfg)

    for pt, sub in zip(allp, run_parallel(one, allp)):
        rep.extend(sub, prefix=f"{pt[0]}(b={pt[1]},c={pt[2]},m={pt[3]},p={pt[4]})/")
    return rep


def suite_rademacher(cfg: dict) -> ProbeReport:
    ps = cfg.get("ps", [1.5, 2.0, 3.0])
    spec = _spec_from({"kernel": cfg.get("kernel", "operator"), "b": cfg.get("b", 1.0), "c": cfg.get("c", 0.0)})
    m = float(cfg.get("m", 0.0))
    seed = int(cfg.get("seed", 0))
    rep = ProbeReport("rademacher", config={"ps": ps, "spec": spec.describe(), "m": m, "seed": seed})
    jobs = [(p, mode) for p in ps for mode in ("semigroup", "resolvent")]
    subs = run_parallel(lambda j: tensor_solver.rademacher_probe(spec, SpaceParams(m, j[0]), mode=j[1], seed=seed), jobs)
    for j, sub in zip(jobs, subs):
        rep.extend(sub, prefix=f"p={j[0]},{j[1]}/")
    lo, hi = generation_interval(spec.op)
    q_bad = hi + 1.0
    out = tensor_solver.rademacher_probe(spec, SpaceParams(q_bad * 2.0 - 1.0, 2.0), seed=seed)
    rep.extend(out, prefix="inadmissible/")
    return rep


def suite_multiplier(cfg: dict) -> ProbeReport:
    rep = ProbeReport("multiplier-decay", config={})
    for kind, b, c, m, p in cfg.get("points", CLOSEDNESS_POINTS):
        spec = _spec_from({"kernel": kind, "b": b, "c": c})
        rep.extend(tensor_solver.multiplier_decay_probe(spec, SpaceParams(m, p)), prefix=f"{kind}(b={b},c={c})/")
    return rep


def suite_energy(cfg: dict) -> ProbeReport:
    tol = float(cfg.get("tol", 1e-3))
    rep = ProbeReport("energy", config={"tol": tol})
    y = np.concatenate([np.geomspace(1e-6, 1, 300, endpoint=False), np.linspace(1, 14, 400)])
    for spec in standard_kernels() + [KernelSpec.neumann(-0.5)]:
        f = tensor_solver.HalfSpaceField.separable((16.0,), (32,), y, lambda x: np.exp(-x ** 2),
                                                   tensor_solver._bump(1.0, 3.0), spec.op.c)
        e = tensor_solver.energy_identity(spec, 1.0, f)
        rep.add("energy_identity", e["rel_diff"], e["rel_diff"] < tol, params={**spec.describe(), **e}, tolerance=tol)
    return rep


# ---------------------------------------------------------------------------
# traces and Rellich


def suite_trace_limit(cfg: dict) -> ProbeReport:
    rep = ProbeReport("trace-limit", config={})
    for m, p in cfg.get("spaces", [(0.0, 2.0), (-0.5, 2.0), (0.5, 3.0), (-1.5, 2.0), (1.0, 2.0), (2.0, 2.0), (3.0, 1.5)]):
        rep.extend(traces.trace_limit_probe(SpaceParams(m, p), seed=int(cfg.get("seed", 0))), prefix=f"m={m},p={p}/")
    return rep


def suite_rellich(cfg: dict) -> ProbeReport:
    b = float(cfg.get("b", 1.0))
    c = float(cfg.get("c", 0.0))
    p = float(cfg.get("p", 2.0))
    Ns = cfg.get("N", [0, 1])
    Ns = [Ns] if isinstance(Ns, int) else list(Ns)
    op = OperatorParams(b, c)
    rep = ProbeReport("rellich", config={"b": b, "c": c, "p": p, "N": Ns})
    subs = run_parallel(lambda N: tensor_solver.rellich_probe(op, p, N, seed=int(cfg.get("seed", 0))), Ns)
    for N, sub in zip(Ns, subs):
        rep.extend(sub, prefix=f"N={N}/")
        rep.info[f"N={N}"] = sub.info
    return rep


@dataclass(frozen=True)
class Suite:
    name: str
    run: Callable[[dict], ProbeReport]
    summary: str


SUITES = {s.name: s for s in [
    Suite("params", suite_params, "root identities, similarity shift, uniqueness coverage, Rellich identity, A_p monotonicity"),
    Suite("specfun", suite_specfun, "Bessel two-sided envelope, Wronskian, monotonicity"),
    Suite("closed-form", suite_closed_form, "c = 0 kernels against reflected Gaussians"),
    Suite("conservation", suite_conservation, "Neumann kernels integrate to one"),
    Suite("chapman-kolmogorov", suite_chapman_kolmogorov, "semigroup law by quadrature"),
    Suite("laplace", suite_laplace, "Laplace transform of the heat kernel equals the Green function"),
    Suite("pde-residual", suite_pde_residual, "heat equation residual converges at second order"),
    Suite("gradient", suite_gradient, "analytic y-derivative against finite differences"),
    Suite("symmetry", suite_symmetry, "weighted symmetry and parabolic scaling"),
    Suite("envelope", suite_envelope, "Gaussian envelope bounds for kernels and gradients"),
    Suite("domain-limit", suite_domain_limit, "boundary limits of resolvent solutions"),
    Suite("hardy", suite_hardy, "Hardy operator norms against closed-form constants"),
    Suite("sab-threshold", suite_sab_threshold, "boundedness threshold of the S(alpha, beta) family"),
    Suite("muckenhoupt", suite_muckenhoupt, "empirical A_p constants of power weights"),
    Suite("domination", suite_domination, "elementary kernel inequalities with fitted constants"),
    Suite("maximal", suite_maximal, "weighted maximal function bound"),
    Suite("closedness", suite_closedness, "closedness ratios of the half-space operator"),
    Suite("rademacher", suite_rademacher, "square-function growth of semigroup and resolvent families"),
    Suite("multiplier-decay", suite_multiplier, "frequency-uniform bound for the mixed derivative multiplier"),
    Suite("energy", suite_energy, "p = 2 energy identity of the elliptic solver"),
    Suite("trace-limit", suite_trace_limit, "boundary traces in weighted Sobolev spaces"),
    Suite("rellich", suite_rellich, "Rellich ratios against the best constant"),
]}


def run_suite(name: str, cfg: dict | None = None) -> ProbeReport:
    try:
        suite = SUITES[name]
    except KeyError:
        raise UnknownSuite(name) from None
    cfg = dict(cfg or {})
    cfg.setdefault("seed", 0)
    rep = suite.run(cfg)
    rep.config = {**cfg, **rep.config}
    return rep
