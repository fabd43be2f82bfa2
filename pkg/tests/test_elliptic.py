import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
import mpmath
from scipy import integrate, special

from cnoidal.elliptic import carlson_rf, complete_K, invert_elliptic_integral, jacobi_sn_cn_dn

params = st.floats(min_value=1e-6, max_value=1 - 1e-6)
args = st.floats(min_value=-50.0, max_value=50.0)


def quad_K(m):
    val, _ = integrate.quad(lambda s: 1.0 / np.sqrt(1.0 - m * np.sin(s) ** 2), 0.0, np.pi / 2, epsabs=1e-15, epsrel=1e-13)
    return val


def test_K_at_zero():
    assert complete_K(0.0) == pytest.approx(1.5707963267948966, rel=1e-16)


def test_K_half_matches_quadrature():
    assert complete_K(0.5) == pytest.approx(quad_K(0.5), rel=1e-14)
    assert complete_K(0.5) == pytest.approx(1.854074677, abs=1e-9)


def test_K_diverges():
    assert complete_K(0.999999) > 7
    with pytest.raises(ValueError):
        complete_K(1.0)
    with pytest.raises(ValueError):
        complete_K(-0.1)


@given(st.floats(min_value=0.0, max_value=0.99))
def test_K_against_quadrature(m):
    assert complete_K(m) == pytest.approx(quad_K(m), rel=1e-13)


@settings(max_examples=50)
@given(params)
def test_K_against_mpmath(m):
    # quad loses accuracy near the logarithmic endpoint behaviour at m -> 1; mpmath does not
    assert complete_K(m) == pytest.approx(float(mpmath.ellipk(m)), rel=1e-14)


@given(params, params)
def test_K_monotone(a, b):
    lo, hi = sorted((a, b))
    assert complete_K(lo) <= complete_K(hi)


def test_special_points():
    for m in (0.0, 0.3, 0.9, 1.0):
        v = jacobi_sn_cn_dn(0.0, m)
        assert (v.sn, v.cn, v.dn) == (0.0, 1.0, 1.0)
    v = jacobi_sn_cn_dn(complete_K(0.5), 0.5)
    assert v.sn == pytest.approx(1.0, abs=1e-15)
    assert v.cn == pytest.approx(0.0, abs=1e-15)


def test_m_one_is_sech():
    u = np.array([0.5, 1.0, 2.0])
    assert np.allclose(jacobi_sn_cn_dn(u, 1.0).cn, 1 / np.cosh(u), rtol=0, atol=1e-16)


def test_identities_bulk():
    rng = np.random.default_rng(1)
    for m in rng.uniform(0, 1, 100):
        u = rng.uniform(-30, 30, 100)
        v = jacobi_sn_cn_dn(u, m)
        assert np.max(np.abs(v.sn**2 + v.cn**2 - 1)) < 1e-13
        assert np.max(np.abs(v.dn**2 - (1 - m * v.sn**2))) < 1e-13


@given(args, params)
def test_against_scipy(u, m):
    sn, cn, dn, _ = special.ellipj(u, m)
    v = jacobi_sn_cn_dn(u, m)
    assert abs(v.sn - sn) < 1e-12 and abs(v.cn - cn) < 1e-12 and abs(v.dn - dn) < 1e-12


@given(args, params)
def test_parity_and_periods(u, m):
    a, b = jacobi_sn_cn_dn(u, m), jacobi_sn_cn_dn(-u, m)
    assert b.sn == pytest.approx(-a.sn, abs=1e-14)
    assert b.cn == pytest.approx(a.cn, abs=1e-14)
    assert b.dn == pytest.approx(a.dn, abs=1e-14)
    K = complete_K(m)
    shifted = jacobi_sn_cn_dn(u + 2 * K, m)
    assert abs(shifted.cn**2 - a.cn**2) < 1e-12
    assert shifted.cn == pytest.approx(-a.cn, abs=1e-11)
    assert jacobi_sn_cn_dn(u + 4 * K, m).sn == pytest.approx(a.sn, abs=1e-11)


def test_limits():
    u = np.linspace(-5, 5, 1001)
    assert np.max(np.abs(jacobi_sn_cn_dn(u, 1 - 1e-12).cn - 1 / np.cosh(u))) < 1e-5
    assert np.max(np.abs(jacobi_sn_cn_dn(u, 1e-12).cn - np.cos(u))) < 1e-5


def test_rejects_bad_input():
    with pytest.raises(ValueError):
        jacobi_sn_cn_dn(np.nan, 0.5)
    with pytest.raises(ValueError):
        jacobi_sn_cn_dn(1.0, 1.5)


def test_incomplete_integral_values():
    assert invert_elliptic_integral(0.0, 0.3) == 0.0
    assert invert_elliptic_integral(np.pi / 2, 0.5) == pytest.approx(complete_K(0.5), rel=1e-14)
    ref, _ = integrate.quad(lambda s: 1 / np.sqrt(1 - 0.3 * np.sin(s) ** 2), 0, np.pi / 4, epsabs=1e-15, epsrel=1e-13)
    assert abs(invert_elliptic_integral(np.pi / 4, 0.3) - ref) < 1e-12


@given(st.floats(min_value=0.0, max_value=1.0), params)
def test_round_trip(frac, m):
    K = complete_K(m)
    u = frac * K
    v = jacobi_sn_cn_dn(u, m)
    psi = np.arctan2(v.sn, v.cn)
    assert abs(invert_elliptic_integral(psi, m) - u) < 1e-11


def test_carlson_symmetric():
    assert carlson_rf(1.0, 2.0, 3.0) == pytest.approx(carlson_rf(3.0, 1.0, 2.0), rel=1e-15)
    # R_F(x, x, x) = x^-1/2
    assert carlson_rf(4.0, 4.0, 4.0) == pytest.approx(0.5, rel=1e-15)
