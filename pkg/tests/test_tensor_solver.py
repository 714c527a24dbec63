import math

import numpy as np
import pytest

from cskernels import halfline_ops as ho
from cskernels import tensor_solver as ts
from cskernels.kernels import KernelSpec
from cskernels.params import OperatorParams, SpaceParams

SPECS = [KernelSpec.neumann(0.5), KernelSpec.dirichlet(-0.3), KernelSpec.operator(1.0, 0.0)]
Y = ts.probe_y_grid(96, 192)
BUMP = ts._bump(1.0, 3.0)


def gaussian_field(spec, N=1, nx=32, y=Y):
    return ts.HalfSpaceField.separable((16.0,) * N, (nx,) * N, y, lambda *xs: np.exp(-sum(x * x for x in xs)), BUMP,
                                       spec.op.c)


def test_field_validation():
    with pytest.raises(ValueError):
        ts.HalfSpaceField((16.0,), (8,), Y, np.zeros((7, Y.size)))
    with pytest.raises(ValueError):
        ts.HalfSpaceField((16.0,), (8, 8), Y, np.zeros((8, Y.size)))


def test_bytes_roundtrip_and_layout():
    f = gaussian_field(SPECS[0], N=2, nx=4, y=Y[:10])
    data = f.to_bytes()
    assert data[:4] == (2).to_bytes(4, "little")
    g = ts.HalfSpaceField.from_bytes(data)
    assert g.nx == f.nx and g.box == f.box and g.m == f.m
    np.testing.assert_array_equal(g.values, f.values)
    np.testing.assert_array_equal(g.y, f.y)


def test_csv_shape():
    f = gaussian_field(SPECS[0], N=1, nx=4, y=Y[:5])
    lines = f.to_csv().splitlines()
    assert lines[0] == "x1,y,value"
    assert len(lines) == 1 + 4 * 5


@pytest.mark.parametrize("spec", SPECS)
def test_elliptic_n0_reduces_to_resolvent(spec):
    f = ts.HalfSpaceField.separable((), (), Y, None, BUMP, spec.op.c)
    u = ts.elliptic_solve(spec, 1.0, f)
    ref = ho.apply_resolvent(spec, 1.0, ho.GridFunction(Y, BUMP(Y)), Y[::8]).values
    np.testing.assert_allclose(u.values[::8], ref, rtol=1e-6, atol=1e-9 * np.abs(ref).max())


@pytest.mark.parametrize("spec", SPECS)
def test_elliptic_separable_frequency(spec):
    L, n, k = 16.0, 32, 3
    xi0 = 2 * np.pi * k / L
    f = ts.HalfSpaceField.separable((L,), (n,), Y, lambda x: np.cos(xi0 * x), BUMP, spec.op.c)
    u = ts.elliptic_solve(spec, 1.0, f)
    prof = ho.apply_resolvent_many(spec, 1.0 + xi0 ** 2, Y, BUMP(Y)[None, :])[0]
    x = f.x_nodes()[0]
    np.testing.assert_allclose(u.values, np.outer(np.cos(xi0 * x), prof), atol=1e-6 * np.abs(prof).max())


def test_elliptic_self_adjoint_neumann():
    spec = KernelSpec.neumann(0.5)
    y = ts.probe_y_grid(800, 1600)
    f1 = ts.HalfSpaceField.separable((), (), y, None, ts._bump(0.5, 2.0), 0.5)
    f2 = ts.HalfSpaceField.separable((), (), y, None, ts._bump(1.0, 4.0), 0.5)
    u1, u2 = ts.elliptic_solve(spec, 1.0, f1), ts.elliptic_solve(spec, 1.0, f2)
    lhs = f1.norm(1.0, u1.values * f2.values)
    rhs = f1.norm(1.0, f1.values * u2.values)
    assert abs(lhs - rhs) <= 1e-5 * abs(lhs)


def test_elliptic_self_adjoint_with_x_direction():
    spec = KernelSpec.neumann(0.5)
    y = ts.probe_y_grid(200, 400)
    f1 = ts.HalfSpaceField.separable((16.0,), (16,), y, lambda x: np.exp(-x * x), ts._bump(0.5, 2.0), 0.5)
    f2 = ts.HalfSpaceField.separable((16.0,), (16,), y, lambda x: np.exp(-((x - 1) ** 2)), ts._bump(1.0, 4.0), 0.5)
    u1, u2 = ts.elliptic_solve(spec, 1.0, f1), ts.elliptic_solve(spec, 1.0, f2)
    lhs = f1.norm(1.0, u1.values * f2.values)
    rhs = f1.norm(1.0, f1.values * u2.values)
    # y-discretisation error is O(h^2); see the N = 0 case for the fine grid
    assert abs(lhs - rhs) <= 2e-4 * abs(lhs)


def test_elliptic_errors():
    f = ts.HalfSpaceField.separable((), (), Y, None, BUMP, 0.0)
    with pytest.raises(ValueError):
        ts.elliptic_solve(SPECS[0], -1.0, f)
    with pytest.raises(ts.SingularFrequency):
        ts.elliptic_solve(SPECS[0], 0.0, f)


@pytest.mark.parametrize("spec", SPECS)
def test_elliptic_residual_small(spec):
    y = ts.probe_y_grid(96, 384)
    f = gaussian_field(spec, y=y)
    u = ts.elliptic_solve(spec, 1.0, f)
    assert ts.elliptic_residual(spec, 1.0, f, u) < 1e-3


def test_parabolic_keeps_constants_for_neumann():
    spec = KernelSpec.neumann(0.0)
    y = ts.probe_y_grid(120, 192, y_min=1e-8)
    f = ts.HalfSpaceField.separable((16.0,), (8,), y, lambda x: np.ones_like(x), lambda v: np.ones_like(v), 0.0)
    u = ts.parabolic_step(spec, 0.1, f)
    inner = y < 6.0
    np.testing.assert_allclose(u.values[:, inner], 1.0, atol=1e-6)


def _split_error(spec, n):
    y = np.concatenate([np.geomspace(1e-4, 1, n // 4), np.linspace(1, 14, n)[1:]])
    f = ts.HalfSpaceField.separable((), (), y, None, BUMP, spec.op.c)
    one = ts.parabolic_step(spec, 0.5, f)
    two = ts.parabolic_step(spec, 0.3, ts.parabolic_step(spec, 0.2, f))
    return np.abs(one.values - two.values).max() / np.abs(one.values).max()


def test_parabolic_semigroup_law():
    # the composed step interpolates an intermediate grid function, so the
    # split error is O(h^2); check the order and the extrapolated level
    spec = KernelSpec.operator(1.0, 0.0)
    coarse, fine = _split_error(spec, 300), _split_error(spec, 600)
    order = np.log2(coarse / fine)
    assert order >= 1.8
    assert fine < 4e-5
    assert fine / 2 ** order < 1e-5


def test_parabolic_x_marginal_is_heat_flow():
    spec = KernelSpec.dirichlet(0.0)
    f = gaussian_field(spec, nx=64)
    t = 0.4
    u = ts.parabolic_step(spec, t, f)
    x = f.x_nodes()[0]
    gauss = (1 + 4 * t) ** -0.5 * np.exp(-x * x / (1 + 4 * t))
    yprof = ts.parabolic_step(spec, t, ts.HalfSpaceField.separable((), (), Y, None, BUMP, 0.0)).values
    np.testing.assert_allclose(u.values, np.outer(gauss, yprof), atol=1e-6 * np.abs(yprof).max())


def test_closedness_small_config():
    cfg = ts.ClosednessConfig(N=1, n_bumps=3, nx=32, box=16.0)
    rep = ts.closedness_probe(KernelSpec.operator(1.0, 0.0), SpaceParams(0.0, 2.0), cfg)
    assert rep.passed, [r.to_dict() for r in rep.failures()]


def test_laplace_ratio_bounded():
    # |ξ|²/(λ+|ξ|²) <= 1: Δ_x u never exceeds f in L²
    spec = KernelSpec.operator(1.0, 0.0)
    f = gaussian_field(spec)
    for lam in (5.0, 50.0):
        u = ts.elliptic_solve(spec, lam, f)
        assert f.norm(2.0, ts.laplacian_x(u)) <= f.norm(2.0) * (1 + 1e-9)


def test_concentration_growth_inadmissible():
    spec = KernelSpec.dirichlet(0.0)
    g = ts.concentration_growth(spec, SpaceParams(5.0, 2.0))
    assert g["growth"] >= 10


@pytest.mark.parametrize("mode", ["semigroup", "resolvent"])
@pytest.mark.parametrize("p", [1.5, 3.0])
def test_rademacher_growth(mode, p):
    rep = ts.rademacher_probe(KernelSpec.operator(1.0, 0.0), SpaceParams(0.0, p), mode=mode)
    assert rep.passed, [r.to_dict() for r in rep.failures()]


def test_rellich_probe_n0():
    rep = ts.rellich_probe(OperatorParams(1.0, 0.0), 2.0, 0)
    assert rep.passed
    assert rep.info["best_constant"] == pytest.approx(4.0)


def test_rellich_ratio_below_constant():
    op = OperatorParams(1.0, 0.0)
    r = ts.rellich_ratio(op, 2.0, 1.5, 0.0, 1.0, 4.0)
    assert 0 < r <= 4.0 * 1.05


def test_multiplier_decay():
    rep = ts.multiplier_decay_probe(KernelSpec.neumann(0.5), SpaceParams(0.2, 3.0), n_xi=12)
    assert rep.passed


@pytest.mark.parametrize("spec", SPECS)
def test_energy_identity(spec):
    y = np.concatenate([np.geomspace(1e-6, 1, 300, endpoint=False), np.linspace(1, 14, 400)])
    f = ts.HalfSpaceField.separable((16.0,), (32,), y, lambda x: np.exp(-x * x), BUMP, spec.op.c)
    e = ts.energy_identity(spec, 1.0, f)
    assert e["rel_diff"] < 1e-3
    assert math.isfinite(e["lhs"]) and e["lhs"] > 0


@pytest.mark.parametrize("mode", ["semigroup", "resolvent"])
def test_rademacher_hilbert_case_matches_operator_norm(mode):
    # in L² the square-function constant is the supremum of the operator norms
    spec = KernelSpec.operator(1.0, 0.0)
    y = ts.probe_y_grid(80, 80)
    w = np.zeros_like(y)
    w[:-1] += np.diff(y) / 2
    w[1:] += np.diff(y) / 2
    s = np.sqrt(w)
    norms = []
    for v in (np.geomspace(0.05, 5.0, 9) if mode == "semigroup" else np.geomspace(0.2, 20.0, 9)):
        if mode == "semigroup":
            A = ts.semigroup_matrix(spec, float(v), y)
        else:
            A = float(v) * ho.apply_resolvent_many(spec, float(v), y, np.eye(y.size)).T
        norms.append(np.linalg.norm(s[:, None] * A / s[None, :], 2))
    sup = max(norms)
    rep = ts.rademacher_probe(spec, SpaceParams(0.0, 2.0), mode=mode, y=y)
    est = rep.info["max_ratio_by_size"]["16"]
    assert est <= sup * (1 + 1e-12)
    assert est >= 0.95 * sup
