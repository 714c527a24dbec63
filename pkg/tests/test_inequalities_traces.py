import numpy as np
import pytest

from cskernels import inequalities as iq
from cskernels import traces
from cskernels.params import SpaceParams


def test_min_product_lower_bound_is_one():
    lower, C = iq.min_product_constant(0.1)
    # r = s <= 1 gives equality in the lower bound
    assert lower == pytest.approx(1.0, abs=1e-12)
    assert C >= 1.0


@pytest.mark.parametrize("eps", [0.05, 0.1, 0.5])
def test_min_product_constant_does_not_grow(eps):
    _, C = iq.min_product_constant(eps)
    _, C_wide = iq.min_product_constant(eps, 1e-6, 1e6, 200)
    assert C_wide <= 1.05 * C


def test_weight_ratio_trivial_case():
    # g1 = g2 = 0: both sides are 1 and e^{ε|y-z|²} >= 1
    assert iq.weight_ratio_constant(0.0, 0.0, 0.1, 1e-3, 1e3) == pytest.approx(1.0)


@pytest.mark.parametrize("g1, g2", [(0.0, 0.5), (0.4, 1.2), (1.0, 1.0)])
def test_domination_constant_is_finite_and_stable(g1, g2):
    d0 = iq.domination_constant(g1, g2)
    d1 = iq.domination_constant(g1, g2, t_range=(1e-6, 1e6), yz_range=(1e-7, 1e7), n=60)
    assert np.isfinite(d0)
    assert d1 <= 1.05 * d0


def test_inequality_probe_passes():
    rep = iq.inequality_probe()
    assert rep.passed, [r.to_dict() for r in rep.failures()]


@pytest.mark.parametrize("k, p", [(0.0, 2.0), (0.5, 2.0), (-0.5, 3.0)])
def test_maximal_weight_check(k, p):
    rep = iq.maximal_weight_check(k, p, n_funcs=2)
    assert rep.passed, [r.to_dict() for r in rep.failures()]


def test_maximal_weight_check_rejects_outside_class():
    with pytest.raises(ValueError):
        iq.maximal_weight_check(1.5, 2.0)


def test_holder_trace_ratio_bounded():
    u = traces._Poly([1.0, 0.5, -0.2, 0.1])
    sp = SpaceParams(-0.5, 2.0)
    ratio = traces.holder_trace_ratio(u, sp, 2.0 ** -np.arange(0, 17, 2))
    assert np.all(ratio <= 1.0 + 1e-6)


@pytest.mark.parametrize("m, p", [(0.0, 2.0), (-0.5, 2.0), (0.5, 3.0), (2.0, 2.0), (3.0, 2.0)])
def test_trace_limit_probe(m, p):
    rep = traces.trace_limit_probe(SpaceParams(m, p), n_funcs=3)
    assert rep.passed, [r.to_dict() for r in rep.failures()]
