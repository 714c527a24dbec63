import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special

from cskernels.specfun import (
    DomainError,
    bessel_i,
    bessel_i_ratio,
    bessel_k,
    derivative_identity_check,
    ratio_bound_constant,
    series_cutoff,
)

ORDERS = [-0.9, -0.5, -0.25, 0.0, 0.3, 0.5, 1.0, 1.5, 2.75, 6.0, 11.5]


def test_closed_form_values():
    assert bessel_i(0.0, 0.0) == 1.0
    # sqrt(2/(pi x)) sinh x and cosh x at x = 1
    np.testing.assert_allclose(bessel_i(0.5, 1.0), 0.9376748882454876, rtol=1e-14)
    np.testing.assert_allclose(bessel_i(-0.5, 1.0), 1.2312002145929675, rtol=1e-14)
    np.testing.assert_allclose(bessel_k(0.5, 1.0), 0.46106850444789454, rtol=1e-13)


def test_k0_log_behaviour():
    assert bessel_k(0.0, 1e-6) / -math.log(1e-6) == pytest.approx(1.0, rel=0.02)


@pytest.mark.parametrize("nu", [0.3, 0.5, 0.9])
def test_k_even_in_order(nu):
    assert bessel_k(nu, 1.0) == pytest.approx(bessel_k(-nu, 1.0), rel=1e-12)


@pytest.mark.parametrize("nu", ORDERS)
def test_i_matches_reference(nu):
    x = np.geomspace(1e-8, 650, 400)
    np.testing.assert_allclose(bessel_i(nu, x, scaled=True), special.ive(nu, x), rtol=1e-12)


@pytest.mark.parametrize("nu", ORDERS)
def test_k_matches_reference(nu):
    x = np.geomspace(1e-10, 2000, 400)
    np.testing.assert_allclose(bessel_k(nu, x, scaled=True), special.kve(nu, x), rtol=1e-11)


@pytest.mark.parametrize("nu, x", [(0.5, 1.0), (-0.75, 3.3), (2.0, 0.01), (3.5, 40.0), (0.0, 1e-5)])
def test_against_extended_precision(nu, x):
    mpmath.mp.dps = 40
    assert bessel_i(nu, x) == pytest.approx(float(mpmath.besseli(nu, x)), rel=1e-13)
    assert bessel_k(nu, x) == pytest.approx(float(mpmath.besselk(nu, x)), rel=1e-12)


def test_switchover_is_continuous():
    for nu in (0.0, 2.5, 5.0):
        xc = float(series_cutoff(nu))
        for x in (xc * (1 - 1e-9), xc * (1 + 1e-9)):
            assert bessel_i(nu, x, scaled=True) == pytest.approx(special.ive(nu, x), rel=1e-13)


def test_large_argument_scaled_finite():
    v = bessel_i(1.0, 1e4, scaled=True)
    assert np.isfinite(v)
    assert v == pytest.approx(special.ive(1.0, 1e4), rel=1e-13)


def test_ratio_overshoots_below_minus_half():
    assert bessel_i_ratio(-0.75, 1.0) == pytest.approx(special.iv(0.25, 1.0) / special.iv(-0.75, 1.0), rel=1e-13)
    assert bessel_i_ratio(-0.75, 1.0) > 1


def test_ratio_examples():
    assert bessel_i_ratio(-0.5, 1.0) == pytest.approx(math.tanh(1.0), rel=1e-14)
    assert abs(bessel_i_ratio(0.0, 1e4) - 1) < 1e-3
    assert bessel_i_ratio(0.0, 1e-4) == pytest.approx(5e-5, rel=0.01)


@settings(max_examples=200, deadline=None)
@given(nu=st.floats(-0.999, 8), lx=st.floats(-6, 4))
def test_ratio_bound(nu, lx):
    x = 10.0 ** lx
    r = bessel_i_ratio(nu, x)
    assert r > 0
    if nu >= -0.5:
        assert r < 1
    assert abs(r - 1) <= ratio_bound_constant(nu) * min(1.0, 1.0 / x)


@pytest.mark.parametrize("nu, x, tol", [(0.5, 1.0, 1e-8), (0.0, 10.0, 1e-8), (-0.9, 0.1, 1e-6)])
def test_derivative_identity(nu, x, tol):
    assert derivative_identity_check(nu, x) < tol


@pytest.mark.parametrize("nu", [0.0, 0.4, 1.0, 3.5])
def test_wronskian(nu):
    x = np.geomspace(1e-6, 500, 300)
    w = x * (bessel_k(nu, x, scaled=True) * bessel_i(nu + 1, x, scaled=True)
             + bessel_k(nu + 1, x, scaled=True) * bessel_i(nu, x, scaled=True))
    np.testing.assert_allclose(w, 1.0, rtol=1e-9)


@pytest.mark.parametrize("nu", [-0.5, 0.0, 1.5, 4.0])
def test_monotone(nu):
    x = np.geomspace(1e-4, 600, 500)
    i = bessel_i(nu, x)
    k = bessel_k(nu, x)
    if nu >= 0:
        assert np.all(np.diff(i) > 0)
    assert np.all(np.diff(k) < 0)


def test_domain_errors():
    with pytest.raises(DomainError):
        bessel_k(0.5, 0.0)
    with pytest.raises(DomainError):
        bessel_i_ratio(-1.0, 1.0)
    with pytest.raises(DomainError):
        derivative_identity_check(0.0, -1.0)


def test_array_broadcast():
    out = bessel_i(np.array([0.0, 1.0])[:, None], np.array([0.5, 1.0, 2.0])[None, :])
    assert out.shape == (2, 3)
    np.testing.assert_allclose(out, special.iv([[0.0], [1.0]], [[0.5, 1.0, 2.0]]), rtol=1e-13)
