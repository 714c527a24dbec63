import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cskernels import halfline_ops as ho
from cskernels.kernels import KernelSpec
from cskernels.params import SpaceParams, hardy_constant

SPECS = [KernelSpec.neumann(0.5), KernelSpec.dirichlet(-0.3), KernelSpec.operator(1.0, 0.0)]


def bump_profile():
    """sin^4 bump on [1, 2] with its first two derivatives."""
    k = math.pi

    def f(y):
        return np.sin(k * (y - 1)) ** 4

    def d1(y):
        s, c = np.sin(k * (y - 1)), np.cos(k * (y - 1))
        return 4 * k * s ** 3 * c

    def d2(y):
        s, c = np.sin(k * (y - 1)), np.cos(k * (y - 1))
        return 4 * k * k * (3 * s * s * c * c - s ** 4)

    return f, d1, d2


def test_weighted_norm_examples():
    g = np.linspace(0.01, 1, 500)
    assert ho.weighted_norm(ho.GridFunction(g, np.ones_like(g)), 1) == pytest.approx(0.99, rel=1e-12)
    g = np.linspace(1e-6, 1, 2001)
    assert ho.weighted_norm(ho.GridFunction(g, g), 2) == pytest.approx(1 / math.sqrt(3), rel=1e-6)


def test_grid_function_validation_and_csv():
    with pytest.raises(ho.EmptyGrid):
        ho.GridFunction(np.array([]), np.array([]))
    with pytest.raises(ValueError):
        ho.GridFunction(np.array([1.0, 0.5]), np.array([1.0, 2.0]))
    f = ho.GridFunction(np.array([0.1, 0.2, 0.7]), np.array([1.0, -2.5, 1e-300]), 0.5)
    back = ho.GridFunction.from_csv(f.to_csv(), m=0.5)
    np.testing.assert_array_equal(back.grid, f.grid)
    np.testing.assert_array_equal(back.values, f.values)


def test_semigroup_preserves_constants_for_neumann():
    one = ho.Profile(lambda x: np.ones_like(x))
    y = np.array([1e-5, 0.01, 0.5, 3.0, 20.0])
    for c in (-0.5, 0.0, 1.0, 3.0):
        out = ho.apply_semigroup(KernelSpec.neumann(c), 0.7, one, y)
        np.testing.assert_allclose(out.values, 1.0, atol=1e-7)


@pytest.mark.parametrize("spec", SPECS)
def test_strong_continuity(spec):
    f, _, _ = bump_profile()
    src = ho.Profile(f, (1.0, 2.0))
    y = np.linspace(0.9, 2.1, 241)
    out = ho.apply_semigroup(spec, 1e-6, src, y)
    fy = src(y)
    gf = ho.GridFunction(y, out.values - fy)
    assert ho.weighted_norm(gf, 2) < 0.01 * ho.weighted_norm(ho.GridFunction(y, fy), 2)


def test_resolvent_dirichlet_indicator():
    chi = ho.Profile(lambda x: np.ones_like(x), (1.0, 2.0))
    u = ho.apply_resolvent(KernelSpec.dirichlet(0.0), 1.0, chi, np.array([0.5])).values[0]
    assert u == pytest.approx(math.sinh(0.5) * (math.exp(-1) - math.exp(-2)), rel=1e-10)
    assert u == pytest.approx(0.12117767, abs=1e-8)


@pytest.mark.parametrize("spec", SPECS + [KernelSpec.operator(0.3, 2.0)])
def test_resolvent_inverts_operator_on_core(spec):
    f, d1, d2 = bump_profile()
    b, c, lam = spec.op.b, spec.op.c, 1.5

    def g(y):
        return lam * f(y) - (d2(y) + c / y * d1(y) - b / y ** 2 * f(y))

    y = np.linspace(0.5, 2.5, 81)
    u = ho.apply_resolvent(spec, lam, ho.Profile(g, (1.0, 2.0)), y)
    np.testing.assert_allclose(u.values, ho.Profile(f, (1.0, 2.0))(y), atol=1e-4)


@pytest.mark.parametrize("spec", SPECS)
def test_resolvent_is_laplace_transform_of_semigroup(spec):
    f, _, _ = bump_profile()
    src = ho.Profile(f, (1.0, 2.0))
    y = np.array([0.3, 1.4, 3.0])
    lam = 1.0
    from cskernels.quadrature import panel_rule

    u_nodes, w = panel_rule(np.linspace(math.log(1e-5), math.log(60.0), 60), 10)
    acc = np.zeros(y.size)
    for uu, ww in zip(u_nodes, w):
        t = math.exp(uu)
        acc += ww * t * math.exp(-lam * t) * ho.apply_semigroup(spec, t, src, y).values
    ref = ho.apply_resolvent(spec, lam, src, y).values
    np.testing.assert_allclose(acc, ref, atol=1e-4)


def test_resolvent_many_matches_single():
    spec = KernelSpec.operator(1.0, 0.0)
    g = ho.default_grid(64, 64, 1e-4, 1.0, 12.0)
    rng = np.random.default_rng(0)
    vals = np.stack([np.exp(-((g - c) ** 2)) for c in rng.uniform(1, 4, 3)])
    many = ho.apply_resolvent_many(spec, 2.0, g, vals)
    for row, v in zip(many, vals):
        single = ho.apply_resolvent(spec, 2.0, ho.GridFunction(g, v), g).values
        np.testing.assert_allclose(row, single, rtol=1e-6, atol=1e-10 * np.abs(single).max())


def test_hardy_apply_examples():
    g = np.linspace(1e-4, 3, 3000)
    one = ho.hardy_apply("H1", 0.0, ho.GridFunction(g, np.ones_like(g)))
    np.testing.assert_allclose(one.values, 1 - 1e-4 / g, rtol=1e-12)
    lin = ho.hardy_apply("H1", 0.0, ho.GridFunction(g, g))
    np.testing.assert_allclose(lin.values[100:], g[100:] / 2, rtol=1e-6)
    with pytest.raises(ValueError):
        ho.hardy_apply("H3", 0.0, lin)


def test_hardy_extremal_family_approaches_from_below():
    c, sp = 0.0, SpaceParams(0.0, 2.0)
    C = hardy_constant(c, sp, "H1")
    ratios = []
    for n in (1e2, 1e4, 1e8):
        g = np.geomspace(1 / n, 1, int(400 * math.log10(n)))
        f = ho.GridFunction(g, g ** -sp.q, sp.m)
        ratios.append(ho.weighted_norm(ho.hardy_apply("H1", c, f), 2) / ho.weighted_norm(f, 2))
    assert all(r < C for r in ratios)
    assert ratios[0] < ratios[1] < ratios[2]
    assert ratios[-1] > 0.88 * C


@pytest.mark.parametrize("c, m, p, which", [(0.0, 0.0, 2.0, "H1"), (0.0, 3.0, 2.0, "H2"), (0.5, 1.0, 3.0, "H1")])
def test_hardy_probe(c, m, p, which):
    rep = ho.hardy_probe(c, SpaceParams(m, p), which)
    assert rep.passed, [r.to_dict() for r in rep.failures()]


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10_000), m=st.floats(-0.5, 2), p=st.floats(1.3, 4))
def test_hardy_bound_random_functions(seed, m, p):
    sp = SpaceParams(m, p)
    c = sp.q + 0.5  # H1 bounded with margin
    rng = np.random.default_rng(seed)
    g = np.geomspace(1e-6, 1e3, 3000)
    vals = sum(rng.uniform(0, 1) * np.exp(-np.log(g / rng.uniform(1e-4, 10)) ** 2) for _ in range(3))
    f = ho.GridFunction(g, vals, m)
    ratio = ho.weighted_norm(ho.hardy_apply("H1", c, f), p) / ho.weighted_norm(f, p)
    assert ratio <= 1.02 * hardy_constant(c, sp, "H1")


def test_sab_gaussian_normalisation():
    spec = ho.SabSpec(0.0, 0.0, 1, 0.0, 4.0)
    one = ho.Profile(lambda x: np.ones_like(x), (0.0, 200.0))
    out = ho.sab_apply(spec, 1.0, one, np.array([20.0, 50.0]))
    # radial profile on R^1 counts both half-lines, so ∫ e^{-u²/4} du over R
    np.testing.assert_allclose(out.values, 2 * math.sqrt(math.pi), rtol=1e-10)


@pytest.mark.parametrize("alpha, beta", [(0.0, 0.0), (0.3, 0.2), (-0.4, 0.5)])
@pytest.mark.parametrize("s", [0.5, 3.0])
def test_sab_dilation_identity(alpha, beta, s):
    spec = ho.SabSpec(alpha, beta, 1, 0.0, 4.0)
    f, _, _ = bump_profile()
    y = np.array([0.1, 0.4, 1.0, 2.5])
    t = 0.8
    scaled_src = ho.Profile(lambda x: f(s * x), (1.0 / s, 2.0 / s))
    lhs = ho.sab_apply(spec, t, scaled_src, y).values
    rhs = ho.sab_apply(spec, s * s * t, ho.Profile(f, (1.0, 2.0)), s * y).values
    np.testing.assert_allclose(lhs, rhs, rtol=1e-6)


@pytest.mark.parametrize("m, p", [(0.0, 2.0), (0.5, 3.0)])
def test_sab_norm_ratio_dilation_invariant(m, p):
    # S(s²) I_{1/s} = I_{1/s} S(1), so ||S(s²) g|| / ||g|| is unchanged for g = f(·/s)
    spec = ho.SabSpec(0.2, 0.1, 1, m, 4.0)
    f, _, _ = bump_profile()
    s = 3.0

    def ratio(t, src, lo, hi, y):
        xs = np.linspace(lo, hi, 4001)
        num = ho.weighted_norm(ho.sab_apply(spec, t, src, y), p)
        den = ho.weighted_norm(ho.GridFunction(xs, src(xs), m), p)
        return num / den

    y = np.geomspace(1e-3, 12, 1500)
    r1 = ratio(1.0, ho.Profile(f, (1.0, 2.0)), 1.0, 2.0, y)
    r2 = ratio(s * s, ho.Profile(lambda x: f(x / s), (s, 2 * s)), s, 2 * s, s * y)
    assert r2 == pytest.approx(r1, rel=1e-4)


@pytest.mark.parametrize(
    "alpha, beta, verdict",
    [(0.0, 0.0, "bounded"), (0.8, 0.0, "unbounded"), (0.0, 0.8, "unbounded")],
)
def test_sab_threshold_examples(alpha, beta, verdict):
    rep = ho.sab_threshold_probe(ho.SabSpec(alpha, beta, 1, 0.0, 4.0), 2.0)
    assert rep.info["verdict"] == verdict
    assert rep.passed


def test_maximal_function_of_constant():
    g = np.geomspace(1e-3, 10, 200)
    out = ho.maximal_function(ho.GridFunction(g, np.ones_like(g)))
    np.testing.assert_allclose(out.values, 1.0, rtol=1e-12)


def test_maximal_function_dominates():
    g = np.geomspace(1e-3, 10, 300)
    vals = np.exp(-((g - 2) ** 2))
    out = ho.maximal_function(ho.GridFunction(g, vals))
    assert np.all(out.values >= vals - 1e-12)


@pytest.mark.parametrize("p", [1.5, 2.0, 4.0])
def test_ap_constant_for_constant_weight(p):
    assert ho.ap_constant_estimate(0.0, 1, 0.0, p, 16, 1e-6) == pytest.approx(1.0, rel=1e-6)


@pytest.mark.parametrize("k", [0.9, 1.1, -0.9, -1.5])
def test_muckenhoupt_probe_verdict(k):
    rep = ho.muckenhoupt_probe(k, 1, 0.0, 2.0)
    assert rep.passed, [r.to_dict() for r in rep.failures()]


def test_muckenhoupt_far_outside_exceeds_threshold():
    rep = ho.muckenhoupt_probe(3.0, 1, 0.0, 2.0, 1e-4)
    assert rep.info["estimate"] > 1e3


@pytest.mark.parametrize(
    "spec",
    [KernelSpec.neumann(0.0), KernelSpec.neumann(2.0), KernelSpec.dirichlet(-0.5), KernelSpec.operator(1.0, 0.0)],
)
def test_boundary_limits(spec):
    rep = ho.boundary_limit_probe(spec)
    assert rep.passed, [r.to_dict() for r in rep.failures()]


def test_boundary_limits_reject_alternate():
    with pytest.raises(ValueError):
        ho.boundary_limit_probe(KernelSpec.operator(-0.05, 0.5, alternate=True))
