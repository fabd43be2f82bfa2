import dataclasses

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cnoidal.fourier import PeriodicGrid, PeriodicProfile
from cnoidal.kdv import KdvCoefficients, eval_derivative, eval_profile, make_cnoidal, speed_one_half_period
from cnoidal.lame import (
    EDGE_CLASS, band_structure_sweep, build_linearization, eigenpairs, eigenvalue_transform_chain,
    even_spectral_gap, hill_spectrum_numeric, lame_band_edges_closed_form, linearization_profile,
    general_n_lame_eigenvalue, second_order_form_residual,
)

K2S = (0.3, 0.6, 0.9)


def _operator(k2, n=256, coeffs=None):
    L = speed_one_half_period(k2)
    w = make_cnoidal(k2, L, coeffs)
    return build_linearization(w, PeriodicGrid(L, n))


@pytest.fixture(scope="module", params=K2S)
def opr(request):
    return _operator(request.param)


def test_self_adjoint(opr):
    assert opr.h1_adjoint_defect() < 1e-10
    S = opr.symmetrized()
    assert np.max(np.abs(S - S.T)) < 1e-12


def test_eigenvalues_decay(opr):
    vals = np.sort(np.abs(np.linalg.eigvalsh(opr.symmetrized())))[::-1]
    assert vals[-1] < 1e-3 * vals[0]


def test_top_pairs(opr):
    pairs = eigenpairs(opr, 4)
    top, second = pairs[0], pairs[1]
    assert abs(top.value - 2.0) < 1e-6 and top.parity == "even"
    assert abs(second.value - 1.0) < 1e-6 and second.parity == "odd"
    assert top.alignment_phi > 1 - 1e-8
    assert second.alignment_dphi > 1 - 1e-8
    # simplicity: separation dwarfs the discretization error
    err = max(abs(top.value - 2.0), abs(second.value - 1.0), 1e-14)
    assert top.separation > 100 * err and second.separation > 100 * err


def test_eigenvector_identities():
    opr = _operator(0.6)
    phi = opr.coefficients(lambda x: eval_profile(opr.wave, x))
    dphi = opr.coefficients(lambda x: eval_derivative(opr.wave, x))
    assert np.max(np.abs(opr.apply(phi) - 2 * phi)) < 1e-8 * np.max(np.abs(phi))
    assert np.max(np.abs(opr.apply(dphi) - dphi)) < 1e-8 * np.max(np.abs(dphi))


def test_zero_wave_gives_zero_operator():
    L = speed_one_half_period(0.6)
    w = make_cnoidal(0.6, L)
    g = PeriodicGrid(L, 64)
    zero = dataclasses.replace(w, A=0.0, B=0.0)
    assert np.all(build_linearization(zero, g).matrix == 0)


def test_even_gap(opr):
    gap, vals = even_spectral_gap(opr)
    assert gap > 0.01
    assert np.max(vals) == pytest.approx(2.0, abs=1e-6)
    # 1 is not an even eigenvalue
    assert np.min(np.abs(vals - 1.0)) == gap


def test_count_validation():
    opr = _operator(0.6, n=64)
    with pytest.raises(ValueError):
        eigenpairs(opr, 100)
    with pytest.raises(ValueError):
        build_linearization(opr.wave, PeriodicGrid(1.0, 64))


def test_second_order_form(opr):
    pairs = eigenpairs(opr, 2)
    for p in pairs:
        prof = linearization_profile(opr, p)
        scale = np.max(np.abs(prof.values))
        assert second_order_form_residual(p.value, prof, opr.wave) < 1e-7 * scale
        # the sign-flipped form is not satisfied by eigenpairs of L
        assert second_order_form_residual(p.value, prof, opr.wave, flipped_signs=True) > 0.1 * scale


def test_second_order_negative_control():
    opr = _operator(0.6)
    g = opr.grid
    rng = np.random.default_rng(1)
    c = np.zeros(g.n, complex)
    c[1:6] = rng.standard_normal(5)
    c[-5:] = np.conj(c[1:6][::-1])
    psi = PeriodicProfile.from_coeffs(c, g)
    assert second_order_form_residual(1.0, psi, opr.wave) >= 1e-2 * np.max(np.abs(psi.values))
    with pytest.raises(ValueError):
        second_order_form_residual(0, psi, opr.wave)


def test_other_potential_ratio():
    # with V3/V2 != 1 the wave amplitude rescales and the spectrum is unchanged
    opr = _operator(0.6, coeffs=KdvCoefficients(2.0, 3.0))
    pairs = eigenpairs(opr, 2)
    assert [round(p.value, 8) for p in pairs] == [2.0, 1.0]


# --- Lame band edges ----------------------------------------------------------

def test_closed_form_examples():
    assert lame_band_edges_closed_form(3, 0.25).edges["E1+"] == 5.0
    assert lame_band_edges_closed_form(2, 0.5).edges["E0+"] == pytest.approx(3 - 2 * np.sqrt(0.75), abs=1e-15)
    assert lame_band_edges_closed_form(2, 1e-12).edges["E0+"] == pytest.approx(0.0, abs=1e-11)
    with pytest.raises(ValueError):
        lame_band_edges_closed_form(4, 0.5)
    with pytest.raises(ValueError):
        lame_band_edges_closed_form(2, 1.0)


@settings(max_examples=100, deadline=None)
@given(m=st.floats(1e-6, 1 - 1e-6), n=st.sampled_from([2, 3]))
def test_interlacing_and_band_count(m, n):
    bs = lame_band_edges_closed_form(n, m)
    # near m = 1 the bands shrink like exp(-K) and adjacent edges meet at roundoff
    assert bs.interlaced() if m <= 0.999 else bs.interlaced(tol=1e-12)
    assert len(bs.bands) == n + 1
    assert len(bs.periodic_eigs) + len(bs.semiperiodic_eigs) == 2 * n + 1


@pytest.mark.parametrize("n", [2, 3])
@pytest.mark.parametrize("m", [0.25, 0.5, 0.75])
def test_numeric_matches_tables(n, m):
    bs = lame_band_edges_closed_form(n, m)
    per = hill_spectrum_numeric(n, m, 64, "periodic")
    semi = hill_spectrum_numeric(n, m, 64, "semiperiodic")
    assert per.warning is None and semi.warning is None
    for name, value in bs.edges.items():
        period, parity = EDGE_CLASS[n][name]
        spec = per if period == "2K" else semi
        i = int(np.argmin(np.abs(spec.eigenvalues - value)))
        assert abs(spec.eigenvalues[i] - value) < 1e-6, name
        assert spec.parity[i] == parity, name
        assert all(i not in p for p in spec.degenerate_pairs), name
    # above the last edge every eigenvalue is double
    n_simple_per = len(bs.periodic_eigs)
    assert per.degenerate_pairs[0] == (n_simple_per, n_simple_per + 1)


def test_semiperiodic_example():
    semi = hill_spectrum_numeric(2, 0.5, 64, "semiperiodic")
    for v in (1.5, 3.0):
        assert np.min(np.abs(semi.eigenvalues - v)) < 1e-10


def test_free_limit():
    spec = hill_spectrum_numeric(2, 0.0, 32, "periodic", count=5)
    # on [0, 2K) with K = pi/2 the free operator has eigenvalues (2j)^2
    assert np.allclose(spec.eigenvalues, [0, 4, 4, 16, 16], atol=1e-12)
    spec = hill_spectrum_numeric(2, 1e-8, 32, "periodic", count=5)
    assert np.allclose(spec.eigenvalues, [0, 4, 4, 16, 16], atol=1e-6)


def test_underresolved_warns():
    with pytest.warns(RuntimeWarning, match="insufficient"):
        spec = hill_spectrum_numeric(3, 0.999, 8)
    assert spec.warning is not None


def test_transform_chain():
    assert eigenvalue_transform_chain(1, 0.25)[1] == pytest.approx(5.0, abs=1e-15)
    assert eigenvalue_transform_chain(2, 0.5)[1] == pytest.approx(3 - 2 * np.sqrt(0.75), abs=1e-15)
    assert eigenvalue_transform_chain(1, 0.0)[1] == 4.0
    for m in (0.25, 0.5, 0.75):
        assert eigenvalue_transform_chain(1, m)[1] == pytest.approx(lame_band_edges_closed_form(3, m).edges["E1+"], abs=1e-14)
        assert eigenvalue_transform_chain(2, m)[1] == pytest.approx(lame_band_edges_closed_form(2, m).edges["E0+"], abs=1e-14)
    with pytest.raises(ValueError):
        eigenvalue_transform_chain(3, 0.5)


def test_general_n_expression_disagrees():
    for m in (0.25, 0.5, 0.75):
        chain = eigenvalue_transform_chain(1, m)[1]
        general = general_n_lame_eigenvalue(3, m)
        print(f"n=3 k2={m}: chain {chain:.6f}  general-n formula {general:.6f}")
        assert abs(general - chain) > 1.0


def test_band_sweep():
    ms = np.linspace(0.01, 0.99, 50)
    rows = band_structure_sweep(3, ms)
    assert len(rows) == 7 * 50
    names = sorted({r[1] for r in rows})
    for name in names:
        vals = [r[2] for r in rows if r[1] == name]
        d = np.diff(vals)
        assert np.all(d > 0) or np.all(d < 0), name
    widths = [[hi - lo for lo, hi in lame_band_edges_closed_form(3, m).gaps] for m in ms]
    widths = np.array(widths)
    assert np.all(np.diff(widths, axis=0) > 0)


def test_gaps_close_at_zero():
    for n in (2, 3):
        bs = lame_band_edges_closed_form(n, 1e-10)
        assert max(hi - lo for lo, hi in bs.gaps) < 1e-8
