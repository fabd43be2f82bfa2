"""Nearest-neighbour interaction potentials.

A potential is normalized so that V(0) = V'(0) = 0, V''(0) > 0 and V'''(0) > 0.
The restoring force splits as

    V'(r) = V2 r + N(r),   N(r) = (1/2) V3 r^2 (1 + eta(r)),   eta(0) = 0,

and every potential supplies N and N' directly (not as V' - V2 r) so that the
eps^-4 N(eps^2 Phi) rescaling inside the solver does not lose digits.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import factorial
from typing import Callable

import numpy as np

__all__ = ["Potential", "fpu_alpha", "polynomial", "toda", "lennard_jones", "from_spec"]

# kernel codes understood by the compiled lattice integrator
KERNEL_POLYNOMIAL = 0
KERNEL_TODA = 1
KERNEL_LJ = 2


@dataclass(frozen=True, eq=False)
class Potential:
    kind: str
    params: dict
    V2: float
    V3: float
    energy: Callable
    vprime: Callable
    nonlinear: Callable
    nonlinear_prime: Callable
    kernel: tuple = field(repr=False)

    def __post_init__(self):
        if not (self.V2 > 0 and self.V3 > 0):
            raise ValueError(
                f"{self.kind}: need V''(0) > 0 and V'''(0) > 0, got V2={self.V2:g}, V3={self.V3:g}"
            )

    def vdoubleprime(self, r):
        return self.V2 + self.nonlinear_prime(r)

    def eta(self, r):
        """eta(r) from N(r) = (1/2) V3 r^2 (1 + eta(r)); eta(0) = 0."""
        r = np.asarray(r, dtype=float)
        out = np.zeros_like(r)
        nz = r != 0.0
        out[nz] = 2.0 * self.nonlinear(r[nz]) / (self.V3 * r[nz] ** 2) - 1.0
        return out if out.ndim else float(out)

    def N_eps(self, phi, eps):
        """eps^-4 N(eps^2 phi); equals (1/2) V3 phi^2 at eps = 0."""
        phi = np.asarray(phi, dtype=float)
        if eps**4 < np.finfo(float).tiny:  # eps^-4 would overflow; the eps -> 0 limit is exact here
            return 0.5 * self.V3 * phi * phi
        r = eps * eps * phi
        out = self.nonlinear(r) / eps**4
        if not np.all(np.isfinite(out)):
            bad = int(np.flatnonzero(~np.isfinite(out))[0])
            raise FloatingPointError(f"{self.kind}: nonlinearity not finite at sample {bad} (r={r[bad]:g})")
        return out

    def dN_eps(self, phi, eps):
        """d/dphi of N_eps, i.e. eps^-2 N'(eps^2 phi)."""
        phi = np.asarray(phi, dtype=float)
        if eps**4 < np.finfo(float).tiny:
            return self.V3 * phi
        return self.nonlinear_prime(eps * eps * phi) / eps**2

    def spec(self):
        return {"kind": self.kind, **self.params}


def _taylor_sum(coeffs, r, shift):
    # sum_k coeffs[k] r^(k + shift) / (k + shift)!  (Horner would obscure the indexing; sizes are tiny)
    out = np.zeros_like(r)
    for k, c in enumerate(coeffs):
        p = k + shift
        out = out + c * r**p / factorial(p)
    return out


def polynomial(taylor, kind="custom", params=None):
    """V(r) = sum_{k>=2} t_k r^k / k! with taylor = [V''(0), V'''(0), V''''(0), ...]."""
    t = [float(v) for v in taylor]
    if len(t) < 2:
        raise ValueError("need at least V''(0) and V'''(0)")
    higher = t[1:]

    def energy(r):
        return _taylor_sum(t, np.asarray(r, dtype=float), 2)

    def vprime(r):
        return _taylor_sum(t, np.asarray(r, dtype=float), 1)

    def nonlinear(r):
        return _taylor_sum(higher, np.asarray(r, dtype=float), 2)

    def nonlinear_prime(r):
        return _taylor_sum(higher, np.asarray(r, dtype=float), 1)

    return Potential(
        kind=kind, params=params if params is not None else {"taylor": t},
        V2=t[0], V3=t[1], energy=energy, vprime=vprime,
        nonlinear=nonlinear, nonlinear_prime=nonlinear_prime,
        kernel=(KERNEL_POLYNOMIAL, np.array(t)),
    )


def fpu_alpha(a=1.0, b=1.0):
    """Cubic FPU chain V(r) = a r^2/2 + b r^3/6 (eta vanishes identically)."""
    return polynomial([a, b], kind="fpu_alpha", params={"a": float(a), "b": float(b)})


def _exp_tail(x):
    """e^x - 1 - x, accurate for small |x|."""
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < 0.5
    series = np.zeros_like(x)
    term = x * x / 2.0
    for k in range(3, 22):
        series = series + term
        term = term * x / k
    return np.where(small, series, np.expm1(x) - x)


def toda(alpha=1.0, beta=-1.0):
    """Toda potential V(r) = alpha (exp(-beta r) + beta r - 1).

    V'''(0) = -alpha beta^3, so the sign convention r = q(j+1) - q(j) needs
    alpha > 0 and beta < 0 for V'''(0) > 0.
    """
    a, b = float(alpha), float(beta)

    def energy(r):
        return a * _exp_tail(-b * np.asarray(r, dtype=float))

    def vprime(r):
        return -a * b * np.expm1(-b * np.asarray(r, dtype=float))

    def nonlinear(r):
        return -a * b * _exp_tail(-b * np.asarray(r, dtype=float))

    def nonlinear_prime(r):
        return a * b * b * np.expm1(-b * np.asarray(r, dtype=float))

    return Potential(
        kind="toda", params={"alpha": a, "beta": b}, V2=a * b * b, V3=-a * b**3,
        energy=energy, vprime=vprime, nonlinear=nonlinear, nonlinear_prime=nonlinear_prime,
        kernel=(KERNEL_TODA, np.array([a, b])),
    )


def _rising(p, j):
    out = 1.0
    for i in range(j):
        out *= p + i
    return out


def lennard_jones(A=1.0, B=2.0):
    """Lennard-Jones (12,6) potential A x^-12 - B x^-6 about its minimum d = (2A/B)^(1/6).

    r measures compression, x = d - r, so that V'''(0) > 0; V(r) = U(d - r) - U(d).
    """
    A, B = float(A), float(B)
    if A <= 0 or B <= 0:
        raise ValueError("Lennard-Jones needs A, B > 0")
    d = (2.0 * A / B) ** (1.0 / 6.0)

    def U(x):
        return A * x**-12 - B * x**-6

    def Uprime(x):
        return -12.0 * A * x**-13 + 6.0 * B * x**-7

    def deriv_at_zero(j):
        # V^(j)(0) = (-1)^j U^(j)(d) and U^(j)(x) = (-1)^j [A (12)_j x^(-12-j) - B (6)_j x^(-6-j)]
        return A * _rising(12, j) * d ** (-12 - j) - B * _rising(6, j) * d ** (-6 - j)

    V2, V3 = deriv_at_zero(2), deriv_at_zero(3)
    n_series = 48
    taylor_nl = np.array([deriv_at_zero(j + 1) / factorial(j) for j in range(2, n_series)])
    taylor_nlp = np.array([deriv_at_zero(j + 2) / factorial(j) for j in range(1, n_series)])
    cutoff = 0.05 * d

    def _check(x):
        bad = np.flatnonzero(np.ravel(x) <= 0)
        if bad.size:
            raise FloatingPointError(f"Lennard-Jones: particles overlap (d - r <= 0) at sample {bad[0]}")

    def energy(r):
        r = np.asarray(r, dtype=float)
        _check(d - r)
        return U(d - r) - U(d)

    def vprime(r):
        r = np.asarray(r, dtype=float)
        _check(d - r)
        return -Uprime(d - r)

    def nonlinear(r):
        r = np.asarray(r, dtype=float)
        small = np.abs(r) < cutoff
        rs = np.where(small, r, 0.0)
        series = np.polynomial.polynomial.polyval(rs, np.r_[0.0, 0.0, taylor_nl])
        direct = np.where(small, 0.0, vprime(np.where(small, 0.0, r)) - V2 * np.where(small, 0.0, r))
        return np.where(small, series, direct)

    def nonlinear_prime(r):
        r = np.asarray(r, dtype=float)
        small = np.abs(r) < cutoff
        rs = np.where(small, r, 0.0)
        series = np.polynomial.polynomial.polyval(rs, np.r_[0.0, taylor_nlp])
        x = d - np.where(small, 0.0, r)
        _check(x)
        direct = 156.0 * A * x**-14 - 42.0 * B * x**-8 - V2
        return np.where(small, series, direct)

    return Potential(
        kind="lennard_jones", params={"A": A, "B": B}, V2=V2, V3=V3,
        energy=energy, vprime=vprime, nonlinear=nonlinear, nonlinear_prime=nonlinear_prime,
        kernel=(KERNEL_LJ, np.array([A, B, d])),
    )


def from_spec(spec):
    """Build a potential from a config mapping such as {"kind": "fpu_alpha", "a": 1, "b": 1}."""
    spec = dict(spec)
    kind = spec.pop("kind", "fpu_alpha")
    builders = {
        "fpu_alpha": fpu_alpha,
        "toda": toda,
        "lennard_jones": lennard_jones,
        "custom": lambda taylor: polynomial(taylor),
    }
    if kind not in builders:
        raise ValueError(f"unknown potential kind {kind!r}; expected one of {sorted(builders)}")
    try:
        return builders[kind](**spec)
    except TypeError as exc:
        raise ValueError(f"bad parameters for potential {kind!r}: {exc}") from None
