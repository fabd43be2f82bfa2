"""Closed-form KdV cnoidal waves and their limiting profiles.

The profile solves the integrated travelling-wave KdV equation

    -c_kdv * Phi + 6 (V3/V2) Phi^2 + Phi'' = 0

and is parameterized by the elliptic parameter m = k^2 and the half-period L:

    Phi(xi) = A + B cn^2(D xi; m),   D = K(m)/L.

The phase is fixed so that the crest sits at xi = 0 (Phi is even).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .elliptic import complete_K, jacobi_sn_cn_dn

__all__ = [
    "KdvCoefficients",
    "CnoidalWave",
    "make_cnoidal",
    "speed_one_half_period",
    "half_period_for_speed",
    "kdv_speed",
    "eval_profile",
    "eval_derivative",
    "integrated_kdv_residual",
    "kdv_residual",
    "second_integral_residual",
    "soliton_limit",
    "linear_limit",
    "shifted_ansatz_check",
    "cubic_roots",
]


@dataclass(frozen=True)
class KdvCoefficients:
    """V2 = V''(0) and V3 = V'''(0) of the lattice potential; both must be positive."""

    V2: float = 1.0
    V3: float = 1.0

    def __post_init__(self):
        if not (self.V2 > 0 and self.V3 > 0):
            raise ValueError(f"need V''(0) > 0 and V'''(0) > 0, got V2={self.V2}, V3={self.V3}")

    @property
    def ratio(self):
        """V3/V2, the coefficient that multiplies the KdV nonlinearity."""
        return self.V3 / self.V2


@dataclass(frozen=True)
class CnoidalWave:
    m: float
    L: float
    coeffs: KdvCoefficients
    K: float
    A: float
    B: float
    D: float
    E1: float
    E2: float
    E3: float
    c_kdv: float

    @property
    def period(self):
        return 2.0 * self.L

    @property
    def B_phi(self):
        """Second integration constant, read-only: E1 E2 E3 = (V2 / (2 V3)) B_phi."""
        return 2.0 * self.coeffs.ratio * self.E1 * self.E2 * self.E3

    def __call__(self, xi):
        return eval_profile(self, xi)


def kdv_speed(m, L):
    """c_kdv(m, L) = 4 K(m)^2 sqrt(1 - m + m^2) / L^2."""
    return 4.0 * complete_K(m) ** 2 * np.sqrt(1.0 - m + m * m) / L**2


def half_period_for_speed(m, c_kdv=1.0):
    """Half-period L at which the cnoidal wave with parameter m moves with speed c_kdv."""
    return 2.0 * complete_K(m) * (1.0 - m + m * m) ** 0.25 / np.sqrt(c_kdv)


def speed_one_half_period(m):
    """L0(m) with c_kdv(m, L0) = 1, i.e. 2 L0 = 4 K(m) (1 - m + m^2)^(1/4)."""
    return half_period_for_speed(m, 1.0)


def make_cnoidal(m, L, coeffs=None):
    """Build the cnoidal wave with parameter m = k^2 in (0, 1) and half-period L > 0."""
    m = float(m)
    if not (0.0 < m < 1.0):
        raise ValueError(f"cnoidal wave needs 0 < m < 1, got m={m!r}")
    if not L > 0:
        raise ValueError(f"half-period must be positive, got L={L!r}")
    coeffs = coeffs or KdvCoefficients()
    K = complete_K(m)
    root = np.sqrt(1.0 - m + m * m)
    scale = K * K / (L * L) / coeffs.ratio
    A = scale * (1.0 - 2.0 * m + root) / 3.0
    B = scale * m
    E1 = scale * (-2.0 + m + root) / 3.0
    E2 = A
    E3 = scale * (1.0 + m + root) / 3.0
    c_kdv = 4.0 * K * K * root / (L * L)
    return CnoidalWave(
        m=m, L=float(L), coeffs=coeffs, K=K, A=A, B=B, D=K / L,
        E1=E1, E2=E2, E3=E3, c_kdv=c_kdv,
    )


def eval_profile(w, xi):
    cn = jacobi_sn_cn_dn(w.D * np.asarray(xi, dtype=float), w.m).cn
    return w.A + w.B * cn * cn


def eval_derivative(w, xi):
    """Phi'(xi) from cn' = -sn dn."""
    v = jacobi_sn_cn_dn(w.D * np.asarray(xi, dtype=float), w.m)
    return -2.0 * w.B * w.D * v.sn * v.cn * v.dn


def _spectral_second_derivative(values, L):
    n = len(values)
    s = np.pi / L * np.fft.fftfreq(n, d=1.0 / n)
    return np.fft.ifft(-(s**2) * np.fft.fft(values)).real


def integrated_kdv_residual(values, L, c_kdv, ratio):
    """Sup-norm of -c Phi + 6 ratio Phi^2 + Phi'' for samples on a uniform [0, 2L) grid."""
    values = np.asarray(values, dtype=float)
    res = -c_kdv * values + 6.0 * ratio * values**2 + _spectral_second_derivative(values, L)
    return float(np.max(np.abs(res)))


def kdv_residual(w, grid_size=512):
    """Residual of the integrated KdV equation for ``w`` sampled on ``grid_size`` points."""
    if grid_size < 64 or grid_size & (grid_size - 1):
        raise ValueError(f"grid_size must be a power of two >= 64, got {grid_size}")
    x = np.arange(grid_size) * (2.0 * w.L / grid_size)
    return integrated_kdv_residual(eval_profile(w, x), w.L, w.c_kdv, w.coeffs.ratio)


def second_integral_residual(w, xi):
    """(Phi')^2 - 4 (V3/V2) F(Phi) with F(Phi) = -(Phi - E1)(Phi - E2)(Phi - E3)."""
    phi = eval_profile(w, xi)
    dphi = eval_derivative(w, xi)
    F = -(phi - w.E1) * (phi - w.E2) * (phi - w.E3)
    return dphi**2 - 4.0 * w.coeffs.ratio * F


def cubic_roots(w):
    """Roots of F(Phi) = -Phi^3 + (c_kdv/(4 ratio)) Phi^2 + B_phi/(2 ratio), sorted ascending.

    Numerical route through ``numpy.roots``; only used to cross-check the
    closed-form roots stored on the wave.
    """
    r = w.coeffs.ratio
    coeffs = [-1.0, w.c_kdv / (4.0 * r), 0.0, w.B_phi / (2.0 * r)]
    roots = np.roots(coeffs)
    return np.sort(roots.real)


def soliton_limit(w):
    """Standard KdV soliton attached to the roots of ``w``.

    Returns xi -> (V2/V3) (sqrt(beta)/2 sech(sqrt(beta) xi / 2))^2 with
    beta = 4 (V3/V2) (E3 - E1). This is the m -> 1 comparison target.
    """
    r = w.coeffs.ratio
    beta = 4.0 * r * (w.E3 - w.E1)
    if beta <= 0:
        raise ValueError("soliton limit needs beta > 0")
    half = 0.5 * np.sqrt(beta)

    def profile(xi):
        return (1.0 / r) * (half / np.cosh(half * np.asarray(xi, dtype=float))) ** 2

    return profile


def linear_limit(w):
    """Cosine approximation (E3 + E2)/2 + (E3 - E2)/2 cos(2 sqrt(ratio (E3 - E1)) xi), valid for m -> 0."""
    r = w.coeffs.ratio
    mean = 0.5 * (w.E3 + w.E2)
    amp = 0.5 * (w.E3 - w.E2)
    wavenumber = np.sqrt(4.0 * r * (w.E3 - w.E1))

    def profile(xi):
        return mean + amp * np.cos(wavenumber * np.asarray(xi, dtype=float))

    return profile


def shifted_ansatz_check(w, E2_shift=None, grid_size=512):
    """Galilean shift of the profile by a constant.

    With phi = Phi - a and c~ = c_kdv - 12 (V3/V2) a, phi solves
    -c~ phi + 6 (V3/V2) phi^2 + phi'' + A_phi = 0 with A_phi = 6 (V3/V2) a^2 - c_kdv a.
    Returns the sup-norm residual of that shifted equation. The default shift
    a = E2 puts the trough of phi at zero (e2 = 0).
    """
    a = w.E2 if E2_shift is None else float(E2_shift)
    r = w.coeffs.ratio
    x = np.arange(grid_size) * (2.0 * w.L / grid_size)
    phi = eval_profile(w, x) - a
    c_shift = w.c_kdv - 12.0 * r * a
    A_phi = 6.0 * r * a * a - w.c_kdv * a
    res = -c_shift * phi + 6.0 * r * phi**2 + _spectral_second_derivative(phi, w.L) + A_phi
    return float(np.max(np.abs(res)))
