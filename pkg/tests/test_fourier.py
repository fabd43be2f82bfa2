import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from cnoidal.fourier import (
    MultiplierSymbol, PeriodicGrid, PeriodicProfile, analyze, apply_multiplier, h1_norm, multiplier_gap,
    one_minus_sinc2, sinc, symbol_p0, symbol_p_eps, synthesize, wave_speed_squared,
)

sizes = st.sampled_from([64, 128, 256])
halfperiods = st.floats(min_value=0.5, max_value=20.0)


def test_grid_validation():
    with pytest.raises(ValueError):
        PeriodicGrid(1.0, 100)
    with pytest.raises(ValueError):
        PeriodicGrid(1.0, 32)
    with pytest.raises(ValueError):
        PeriodicGrid(-1.0, 64)
    g = PeriodicGrid(2.0, 64)
    assert g.dx == pytest.approx(4.0 / 64)
    with pytest.raises(ValueError):
        analyze(np.ones(10))


def test_simple_coefficients():
    g = PeriodicGrid(3.0, 64)
    c = analyze(np.ones(64))
    assert c[0] == pytest.approx(1.0) and np.max(np.abs(c[1:])) < 1e-16
    c = analyze(np.cos(np.pi * g.nodes / g.L))
    assert c[1] == pytest.approx(0.5) and c[-1] == pytest.approx(0.5)
    assert np.abs(c[2:-1]).max() < 1e-15


@given(sizes, st.integers(0, 2**31))
def test_round_trip_even(n, seed):
    v = np.random.default_rng(seed).standard_normal(n)
    v = 0.5 * (v + np.roll(v[::-1], 1))  # even about x = 0
    c = analyze(v)
    assert np.max(np.abs(synthesize(c) - v)) < 1e-13
    assert np.max(np.abs(c.imag)) < 1e-12 * np.max(np.abs(c))
    assert np.allclose(c[1:], np.conj(c[1:][::-1]), atol=1e-15)


def test_h1_norm_against_quadrature():
    L = 2.5
    g = PeriodicGrid(L, 128)
    f = lambda x: 1 + np.cos(np.pi * x / L) + 0.3 * np.sin(3 * np.pi * x / L)
    df = lambda x: -np.pi / L * np.sin(np.pi * x / L) + 0.9 * np.pi / L * np.cos(3 * np.pi * x / L)
    ref, _ = integrate.quad(lambda x: f(x) ** 2 + df(x) ** 2, 0, 2 * L, limit=200, epsrel=1e-13)
    got = PeriodicProfile.from_function(f, g).h1_norm()
    assert got**2 == pytest.approx(ref, rel=1e-10)


def test_profile_interpolant_and_derivative():
    L = 3.0
    g = PeriodicGrid(L, 64)
    f = PeriodicProfile.from_function(lambda x: np.cos(2 * np.pi * x / L) + np.sin(np.pi * x / L), g)
    x = np.linspace(-1, 7, 50)
    assert np.allclose(f(x), np.cos(2 * np.pi * x / L) + np.sin(np.pi * x / L), atol=1e-13)
    d = f.derivative()
    assert np.allclose(d.values, -2 * np.pi / L * np.sin(2 * np.pi * g.nodes / L) + np.pi / L * np.cos(np.pi * g.nodes / L), atol=1e-12)
    assert f.odd_content() > 0.1
    assert PeriodicProfile.from_function(np.cos, PeriodicGrid(np.pi, 64)).odd_content() < 1e-15
    with pytest.raises(ValueError):
        PeriodicProfile(g, np.zeros(10))
    with pytest.raises(ValueError):
        f.h1_distance(PeriodicProfile.from_function(np.cos, PeriodicGrid(np.pi, 64)))


@given(st.floats(min_value=-2.0, max_value=2.0))
def test_sinc_branches(x):
    with mpmath.workdps(50):
        xm = mpmath.mpf(x)
        ref = mpmath.sin(xm) / xm if x != 0 else mpmath.mpf(1)
        # direct subtraction loses everything for tiny x; use the series there
        ref2 = float(1 - ref**2) if abs(x) > 1e-8 else float(xm**2 / 3 - 2 * xm**4 / 45)
    assert sinc(x) == pytest.approx(float(ref), rel=2e-16, abs=1e-16)
    assert one_minus_sinc2(x) == pytest.approx(ref2, rel=1e-13, abs=1e-300)


def test_one_minus_sinc2_small():
    x = 1e-6
    assert one_minus_sinc2(x) == pytest.approx(x * x / 3, rel=1e-9)


def test_symbol_special_values():
    eps = 0.1
    sym = MultiplierSymbol.lattice(eps, 1.0)
    assert sym(0.0) == pytest.approx(eps**2 / (sym.c2 - 1.0), rel=1e-15)
    assert sym(2 * np.pi / eps) == pytest.approx(0.0, abs=1e-25)
    p0 = MultiplierSymbol.continuum(1.0)
    assert p0(0.0) == 12.0
    assert p0(1.0) == 6.0
    assert p0(1e6) == pytest.approx(12e-12, rel=1e-9)
    assert abs(sym(1.0) - p0(1.0)) < 1.0 * eps**2


def test_symbol_validation():
    with pytest.raises(ValueError):
        MultiplierSymbol("eps", 0.1, 0.9, 1.0)
    with pytest.raises(ValueError):
        MultiplierSymbol("bogus", 0.1, 1.1, 1.0)
    with pytest.raises(ValueError):
        symbol_p_eps(1.0, MultiplierSymbol.continuum(1.0))
    with pytest.raises(ValueError):
        wave_speed_squared(0.1, 1.0, form="cubic")
    assert MultiplierSymbol.lattice(0.0, 1.0).kind == "zero"


@given(st.floats(min_value=0.01, max_value=0.5), st.floats(min_value=-200, max_value=200))
def test_symbol_positive_even(eps, s):
    sym = MultiplierSymbol.lattice(eps, 1.3, 0.8)
    assert sym(s) >= 0
    assert sym(s) == sym(-s)
    p0 = MultiplierSymbol.continuum(1.3, 0.8)
    assert symbol_p0(abs(s) + 1, p0) < symbol_p0(abs(s), p0)


def test_speed_forms_agree_to_fourth_order():
    for eps in (0.2, 0.1, 0.05):
        d = abs(wave_speed_squared(eps, 1.0, form="quadratic") - wave_speed_squared(eps, 1.0, form="linear"))
        assert d == pytest.approx(eps**4 / 576, rel=1e-6)


def test_apply_multiplier():
    L = 3.0
    g = PeriodicGrid(L, 64)
    f = PeriodicProfile.from_function(lambda x: np.cos(np.pi * x / L), g)
    p0 = MultiplierSymbol.continuum(1.0, 1.0)
    out = apply_multiplier(p0, f)
    assert np.allclose(out.values, 12 / (1 + (np.pi / L) ** 2) * f.values, atol=1e-14)
    zero = PeriodicProfile(g, np.zeros(64))
    assert np.all(apply_multiplier(p0, zero).values == 0)


def test_p0_inverts_kdv_operator():
    # (c - d^2) P0 = 12/V2 on band-limited functions
    L = 4.0
    g = PeriodicGrid(L, 128)
    rng = np.random.default_rng(3)
    c = np.zeros(128, complex)
    c[1:10] = rng.standard_normal(9) + 1j * rng.standard_normal(9)
    c[-9:] = np.conj(c[1:10][::-1])
    f = PeriodicProfile.from_coeffs(c, g)
    p0 = MultiplierSymbol.continuum(2.0, 0.7)
    u = apply_multiplier(p0, f)
    back = 0.7 * u.values - u.derivative(2).values
    err = np.max(np.abs(back * 2.0 / 12 - f.values))
    assert err < 1e-13 * np.max(np.abs(f.values)) * (9 * np.pi / L) ** 2


def test_parity_commutes():
    L = 3.0
    g = PeriodicGrid(L, 64)
    v = np.random.default_rng(0).standard_normal(64)
    f = PeriodicProfile(g, v)
    even = lambda h: PeriodicProfile(g, 0.5 * (h.values + np.roll(h.values[::-1], 1)))
    sym = MultiplierSymbol.lattice(0.2, 1.0)
    assert np.allclose(even(apply_multiplier(sym, f)).values, apply_multiplier(sym, even(f)).values, atol=1e-14)


def test_operator_norm_identity():
    # dense matrix of a diagonal multiplier in the H^1 orthonormal basis
    g = PeriodicGrid(2.0, 64)
    sym = MultiplierSymbol.lattice(0.3, 1.0)
    p0 = MultiplierSymbol.continuum(1.0)
    s = g.wavenumbers
    n = 64
    F = np.fft.fft(np.eye(n), axis=0) / n
    Finv = np.fft.ifft(np.eye(n), axis=0) * n
    A = Finv @ np.diag(sym(s) - p0(s)) @ F  # acts on values
    w = np.sqrt(2 * g.L * (1 + s**2))
    W = np.diag(w) @ F  # values -> H^1-orthonormal coordinates
    dense = np.linalg.norm(W @ A @ np.linalg.inv(W), 2)
    assert dense == pytest.approx(multiplier_gap(0.3, g), rel=1e-10)


def test_multiplier_gap_order():
    g = PeriodicGrid(3.64, 256)
    eps = np.array([0.2, 0.1, 0.05, 0.025])
    gaps = np.array([multiplier_gap(e, g) for e in eps])
    slope = np.polyfit(np.log(eps), np.log(gaps), 1)[0]
    assert abs(slope - 2.0) < 0.15
    assert np.max(gaps / eps**2) < 1.0
    assert multiplier_gap(0.0, g) == 0.0


def test_h1_norm_function_matches_profile():
    g = PeriodicGrid(1.5, 64)
    f = PeriodicProfile.from_function(lambda x: np.exp(np.cos(np.pi * x / 1.5)), g)
    assert h1_norm(f.coeffs, 1.5) == f.h1_norm()
    assert (f - f).h1_norm() == 0.0
    assert (f + f).h1_norm() == pytest.approx(2 * f.h1_norm())
