"""Periodic profiles on [0, 2L), H^1 norms and the lattice/continuum multipliers.

Fourier coefficients follow the convention

    f(x) = sum_m f^(m) exp(i m pi x / L),   f^(m) = (1/2L) int_0^{2L} f(x) exp(-i m pi x / L) dx,

so ``analyze`` is ``fft(values) / n``. The H^1 norm is the weighted
coefficient sum 2L sum_m (1 + (m pi / L)^2) |f^(m)|^2 with no rescaling, which
keeps norms comparable across grid sizes.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

__all__ = [
    "PeriodicGrid",
    "PeriodicProfile",
    "MultiplierSymbol",
    "analyze",
    "synthesize",
    "h1_norm",
    "h1_weights",
    "sinc",
    "one_minus_sinc2",
    "wave_speed_squared",
    "symbol_p_eps",
    "symbol_p0",
    "apply_multiplier",
    "multiplier_gap",
]


def _check_pow2(n, minimum=2):
    n = int(n)
    if n < minimum or n & (n - 1):
        raise ValueError(f"grid size must be a power of two >= {minimum}, got {n}")
    return n


@dataclass(frozen=True)
class PeriodicGrid:
    L: float
    n: int = 256

    def __post_init__(self):
        _check_pow2(self.n, 64)
        if not self.L > 0:
            raise ValueError(f"half-period must be positive, got {self.L}")

    @property
    def dx(self):
        return 2.0 * self.L / self.n

    @cached_property
    def nodes(self):
        return np.arange(self.n) * self.dx

    @cached_property
    def wavenumbers(self):
        """s = m pi / L in FFT order."""
        return np.pi / self.L * np.fft.fftfreq(self.n, d=1.0 / self.n)


def analyze(values):
    values = np.asarray(values)
    _check_pow2(len(values))
    return np.fft.fft(values) / len(values)


def synthesize(coeffs, real=True):
    coeffs = np.asarray(coeffs)
    _check_pow2(len(coeffs))
    out = np.fft.ifft(coeffs * len(coeffs))
    return out.real if real else out


def h1_weights(s):
    return 1.0 + np.asarray(s) ** 2


def h1_norm(coeffs, L):
    """H^1_{2L} norm from FFT-ordered coefficients."""
    n = len(coeffs)
    s = np.pi / L * np.fft.fftfreq(n, d=1.0 / n)
    return float(np.sqrt(2.0 * L * np.sum(h1_weights(s) * np.abs(coeffs) ** 2)))


@dataclass(frozen=True, eq=False)
class PeriodicProfile:
    """Real 2L-periodic function given by its samples on a uniform grid."""

    grid: PeriodicGrid
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (self.grid.n,):
            raise ValueError(f"expected {self.grid.n} samples, got shape {v.shape}")
        object.__setattr__(self, "values", v)

    @classmethod
    def from_function(cls, f, grid):
        return cls(grid, f(grid.nodes))

    @classmethod
    def from_coeffs(cls, coeffs, grid):
        return cls(grid, synthesize(coeffs))

    @cached_property
    def coeffs(self):
        return analyze(self.values)

    def h1_norm(self):
        return h1_norm(self.coeffs, self.grid.L)

    def h1_distance(self, other):
        if other.grid != self.grid:
            raise ValueError("profiles live on different grids")
        return h1_norm(self.coeffs - other.coeffs, self.grid.L)

    def odd_content(self):
        """Relative size of the sine part, |Im f^| / |f^| in l2."""
        c = self.coeffs
        norm = np.linalg.norm(c)
        return float(np.linalg.norm(c.imag) / norm) if norm > 0 else 0.0

    def derivative(self, order=1):
        s = self.grid.wavenumbers
        return PeriodicProfile(self.grid, synthesize((1j * s) ** order * self.coeffs))

    def __call__(self, x):
        """Trigonometric interpolant at arbitrary points (Nyquist term as a cosine)."""
        x = np.asarray(x, dtype=float)
        n = self.grid.n
        c = self.coeffs.copy()
        nyq = c[n // 2]
        c[n // 2] = 0.0
        m = np.fft.fftfreq(n, d=1.0 / n)
        arg = np.pi / self.grid.L * x
        out = np.exp(1j * np.multiply.outer(arg, m)) @ c
        return out.real + nyq.real * np.cos(0.5 * n * arg)

    def __add__(self, other):
        return PeriodicProfile(self.grid, self.values + other.values)

    def __sub__(self, other):
        return PeriodicProfile(self.grid, self.values - other.values)


def sinc(x):
    """sin(x)/x with a series branch for |x| < 1e-4."""
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < 1e-4
    xs = np.where(small, 1.0, x)
    x2 = x * x
    return np.where(small, 1.0 - x2 / 6.0 + x2 * x2 / 120.0, np.sin(xs) / xs)


def one_minus_sinc2(x):
    """1 - sinc(x)^2 without cancellation near x = 0."""
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < 0.5
    x2 = x * x
    # 1 - sinc^2 = sum_{k>=2} (-1)^k 2^(2k-1) x^(2k-2) / (2k)!
    series = np.zeros_like(x)
    fact = 2.0  # (2k)! for k = 1
    for k in range(2, 13):
        fact *= (2 * k - 1) * (2 * k)
        term = (2.0 ** (2 * k - 1)) * x2 ** (k - 1) / fact
        series += ((-1) ** k) * term
    direct = 1.0 - sinc(x) ** 2
    return np.where(small, series, direct)


def wave_speed_squared(eps, V2, c_kdv=1.0, form="quadratic"):
    """Squared lattice wave speed for a given eps.

    ``quadratic``: c^2 = V2 (1 + eps^2 c_kdv / 12), the form used
    throughout the solver. ``linear``: c = sqrt(V2) (1 + eps^2 c_kdv / 24), the
    multiscale ansatz form; the two agree to O(eps^4).
    """
    if form == "quadratic":
        return V2 * (1.0 + eps * eps * c_kdv / 12.0)
    if form == "linear":
        return V2 * (1.0 + eps * eps * c_kdv / 24.0) ** 2
    raise ValueError(f"unknown speed form {form!r}")


@dataclass(frozen=True)
class MultiplierSymbol:
    """Symbol of P^(eps) (kind='eps') or of its limit P^(0) (kind='zero')."""

    kind: str
    eps: float
    c2: float
    V2: float
    c_kdv: float = 1.0

    def __post_init__(self):
        if self.kind not in ("eps", "zero"):
            raise ValueError(f"kind must be 'eps' or 'zero', got {self.kind!r}")
        if self.kind == "eps":
            if not self.eps > 0:
                raise ValueError("lattice symbol needs eps > 0; use kind='zero' for the limit")
            if not self.c2 > self.V2:
                raise ValueError(f"need supersonic speed c^2 > V''(0): c2={self.c2}, V2={self.V2}")

    @classmethod
    def lattice(cls, eps, V2, c_kdv=1.0, form="quadratic"):
        if eps == 0:
            return cls.continuum(V2, c_kdv)
        return cls("eps", float(eps), wave_speed_squared(eps, V2, c_kdv, form), float(V2), float(c_kdv))

    @classmethod
    def continuum(cls, V2, c_kdv=1.0):
        return cls("zero", 0.0, float(V2), float(V2), float(c_kdv))

    def __call__(self, s):
        if self.kind == "eps":
            return symbol_p_eps(s, self)
        return symbol_p0(s, self)


def symbol_p_eps(s, sym):
    """eps^2 sinc^2(eps s / 2) / (c^2 - V2 sinc^2(eps s / 2))."""
    if sym.kind != "eps":
        raise ValueError("symbol_p_eps needs a lattice symbol")
    if not sym.c2 > sym.V2:
        raise ValueError(f"need c^2 > V''(0): c2={sym.c2}, V2={sym.V2}")
    x = 0.5 * sym.eps * np.asarray(s, dtype=float)
    s2 = sinc(x) ** 2
    denom = (sym.c2 - sym.V2) + sym.V2 * one_minus_sinc2(x)
    return sym.eps**2 * s2 / denom


def symbol_p0(s, sym):
    """12 / (V2 (c_kdv + s^2))."""
    s = np.asarray(s, dtype=float)
    return 12.0 / (sym.V2 * (sym.c_kdv + s * s))


def apply_multiplier(sym, f):
    s = f.grid.wavenumbers
    return PeriodicProfile(f.grid, synthesize(sym(s) * f.coeffs))


def multiplier_gap(eps, grid, V2=1.0, c_kdv=1.0):
    """max over grid wavenumbers of |p^(eps)(s) - p^(0)(s)|.

    On H^1_{2L} this is exactly the operator norm of P^(eps) - P^(0), since a
    Fourier multiplier acts diagonally on the orthogonal exponentials.
    """
    if eps == 0:
        return 0.0
    s = grid.wavenumbers
    lat = MultiplierSymbol.lattice(eps, V2, c_kdv)
    cont = MultiplierSymbol.continuum(V2, c_kdv)
    return float(np.max(np.abs(lat(s) - cont(s))))
