import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cnoidal.potentials import fpu_alpha, from_spec, lennard_jones, polynomial, toda

POTS = {
    "fpu": fpu_alpha(1.0, 1.0),
    "fpu2": fpu_alpha(2.0, 0.5),
    "toda": toda(1.0, -1.0),
    "lj": lennard_jones(1.0, 2.0),
    "quartic": polynomial([1.0, 2.0, 3.0]),
}


@pytest.mark.parametrize("name", POTS)
def test_normalization(name):
    pot = POTS[name]
    assert pot.vprime(np.array(0.0)) == 0.0
    assert pot.energy(np.array(0.0)) == 0.0
    # V'(+-h) ~ V2 h, so roundoff stays ~1e-16 V2 and h can be tiny
    h = 1e-7
    fd = (pot.vprime(np.array(h)) - pot.vprime(np.array(-h))) / (2 * h)
    assert abs(fd - pot.V2) < 1e-8
    h = 1e-5
    fd3 = (pot.vprime(np.array(h)) - 2 * pot.vprime(np.array(0.0)) + pot.vprime(np.array(-h))) / h**2
    assert fd3 == pytest.approx(pot.V3, rel=1e-4)
    assert pot.eta(0.0) == 0.0
    assert pot.V2 > 0 and pot.V3 > 0


@pytest.mark.parametrize("name", POTS)
@settings(max_examples=50, deadline=None)
@given(r=st.floats(-0.3, 0.3))
def test_split_consistent(name, r):
    pot = POTS[name]
    r = np.array(r)
    # the subtraction oracle carries roundoff of the size of the force terms
    direct = pot.vprime(r) - pot.V2 * r
    assert pot.nonlinear(r) == pytest.approx(direct, rel=1e-9, abs=1e-13 * pot.V2)
    h = 1e-3
    fd = (8 * (pot.nonlinear(r + h) - pot.nonlinear(r - h)) - pot.nonlinear(r + 2 * h) + pot.nonlinear(r - 2 * h)) / (12 * h)
    assert pot.nonlinear_prime(r) == pytest.approx(fd, rel=1e-6, abs=1e-6 * pot.V2)


def test_fpu_eta_vanishes():
    pot = fpu_alpha(1.0, 1.0)
    r = np.linspace(-1, 1, 11)
    assert np.all(pot.eta(r) == pytest.approx(0.0, abs=1e-15))
    phi = np.linspace(-2, 3, 7)
    for eps in (0.0, 0.1, 0.4):
        assert np.allclose(pot.N_eps(phi, eps), 0.5 * phi**2, rtol=1e-14, atol=0)


def test_small_eps_no_cancellation():
    # eps^-4 N(eps^2 phi) at tiny eps stays at the limiting value
    for pot in (toda(1.0, -1.0), lennard_jones()):
        phi = np.array([0.5, 1.0, 2.0])
        got = pot.N_eps(phi, 1e-6)
        assert np.allclose(got, 0.5 * pot.V3 * phi**2, rtol=1e-9)


def test_toda_orientation():
    with pytest.raises(ValueError):
        toda(1.0, 1.0)
    assert toda(1.0, -2.0).V3 == pytest.approx(8.0)


def test_lj_overlap():
    pot = lennard_jones()
    d = (2.0) ** (1 / 6)
    with pytest.raises(FloatingPointError):
        pot.vprime(np.array([0.0, d + 0.1]))
    with pytest.raises(FloatingPointError, match="sample 1"):
        pot.N_eps(np.array([0.0, 2e3]), 0.1)


def test_from_spec():
    assert from_spec({"kind": "toda", "alpha": 2.0, "beta": -1.0}).V2 == 2.0
    assert from_spec({"kind": "custom", "taylor": [1, 1, 1]}).V3 == 1.0
    with pytest.raises(ValueError, match="unknown potential"):
        from_spec({"kind": "morse"})
    with pytest.raises(ValueError, match="bad parameters"):
        from_spec({"kind": "fpu_alpha", "c": 1})
    with pytest.raises(ValueError):
        from_spec({"kind": "fpu_alpha", "a": 1.0, "b": -1.0})
