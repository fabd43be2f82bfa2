"""Complete elliptic integrals and Jacobi elliptic functions.

Every routine here takes the *parameter* ``m = k**2`` rather than the modulus
``k``. ``cn(u, m)`` is what older texts write as ``cn(u; k^2)`` or ``cn(u | m)``.
Passing ``k`` where ``m`` is expected is the classic bug; don't.

K uses the arithmetic-geometric mean, sn/cn/dn use the descending Landen
sequence with backward recurrence for the amplitude, and the incomplete
integral F(psi | m) uses Carlson's R_F. The last one shares no code with the
first two so it can serve as a cross-check.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "EllipticValues",
    "complete_K",
    "jacobi_sn_cn_dn",
    "invert_elliptic_integral",
    "carlson_rf",
]

_MAX_AGM_STEPS = 64


@dataclass(frozen=True)
class EllipticValues:
    """Jacobi functions at argument ``u`` for parameter ``m`` (= k^2)."""

    u: np.ndarray | float
    m: float
    K: float
    sn: np.ndarray | float
    cn: np.ndarray | float
    dn: np.ndarray | float


def _check_parameter(m, lo_closed=True, hi_closed=False):
    m = float(m)
    if not np.isfinite(m):
        raise ValueError(f"elliptic parameter must be finite, got {m!r}")
    lo_ok = m >= 0.0 if lo_closed else m > 0.0
    hi_ok = m <= 1.0 if hi_closed else m < 1.0
    if not (lo_ok and hi_ok):
        raise ValueError(f"elliptic parameter m=k^2 out of range: {m!r}")
    return m


def _agm(a, b):
    for _ in range(_MAX_AGM_STEPS):
        a, b = 0.5 * (a + b), np.sqrt(a * b)
        if abs(a - b) <= 4e-16 * a:
            break
    return 0.5 * (a + b)


def complete_K(m):
    """Complete elliptic integral of the first kind, K(m) with m = k^2.

    Diverges logarithmically as m -> 1; m >= 1 raises ``ValueError``.
    """
    m = float(m)
    if not np.isfinite(m) or m < 0.0:
        raise ValueError(f"complete_K needs 0 <= m < 1, got {m!r}")
    if m >= 1.0:
        raise ValueError(f"complete_K diverges at m >= 1 (got m={m!r})")
    if m == 0.0:
        return 0.5 * np.pi
    return 0.5 * np.pi / _agm(1.0, np.sqrt(1.0 - m))


def _landen_amplitude(u, m):
    # Descending Landen / AGM sequence, backward recurrence for the amplitude.
    a = [1.0]
    c = [np.sqrt(m)]
    b = np.sqrt(1.0 - m)
    for _ in range(_MAX_AGM_STEPS):
        an = 0.5 * (a[-1] + b)
        cn = 0.5 * (a[-1] - b)
        b = np.sqrt(a[-1] * b)
        a.append(an)
        c.append(cn)
        if abs(cn) <= 1e-17 * an:
            break
    n = len(a) - 1
    phi = (2.0**n) * a[n] * u
    for j in range(n, 0, -1):
        phi = 0.5 * (phi + np.arcsin(c[j] / a[j] * np.sin(phi)))
    return phi


def jacobi_sn_cn_dn(u, m):
    """Evaluate sn, cn, dn at ``u`` (scalar or array) for parameter m = k^2.

    m = 0 and m = 1 use the trigonometric / hyperbolic closed forms. For
    0 < m < 1 the argument is first reduced modulo the real period 4K so the
    Landen recurrence never sees a large argument. dn is formed as
    sqrt((1 - m) + m cn^2), a sum of non-negative terms, which keeps it
    accurate near m -> 1 where dn is small.
    """
    m = _check_parameter(m, hi_closed=True)
    u_arr = np.asarray(u, dtype=float)
    if not np.all(np.isfinite(u_arr)):
        raise ValueError("jacobi_sn_cn_dn: non-finite argument")
    if m == 0.0:
        sn, cn, dn = np.sin(u_arr), np.cos(u_arr), np.ones_like(u_arr)
        K = 0.5 * np.pi
    elif m == 1.0:
        sn = np.tanh(u_arr)
        cn = 1.0 / np.cosh(u_arr)
        dn = cn.copy()
        K = np.inf
    else:
        K = complete_K(m)
        period = 4.0 * K
        ur = u_arr - period * np.round(u_arr / period)
        phi = _landen_amplitude(ur, m)
        sn, cn = np.sin(phi), np.cos(phi)
        dn = np.sqrt((1.0 - m) + m * cn * cn)
    if np.ndim(u) == 0:
        sn, cn, dn = float(sn), float(cn), float(dn)
    return EllipticValues(u=u, m=m, K=K, sn=sn, cn=cn, dn=dn)


def carlson_rf(x, y, z):
    """Carlson's symmetric integral R_F(x, y, z) by duplication."""
    x, y, z = (np.asarray(v, dtype=float) for v in (x, y, z))
    for _ in range(200):
        A = (x + y + z) / 3.0
        dx, dy, dz = 1.0 - x / A, 1.0 - y / A, 1.0 - z / A
        if np.max(np.abs([dx, dy, dz])) < 1e-4:
            break
        lam = np.sqrt(x * y) + np.sqrt(y * z) + np.sqrt(z * x)
        x, y, z = 0.25 * (x + lam), 0.25 * (y + lam), 0.25 * (z + lam)
    e2 = dx * dy - dz * dz
    e3 = dx * dy * dz
    # truncation error of this series is O(max|d|^6) ~ 1e-24
    return (1.0 - e2 / 10.0 + e3 / 14.0 + e2 * e2 / 24.0 - 3.0 * e2 * e3 / 44.0) / np.sqrt(A)


def invert_elliptic_integral(psi, m):
    """Incomplete integral of the first kind, F(psi | m) = int_0^psi ds / sqrt(1 - m sin^2 s).

    This is the map whose inverse defines sn (sn(F(psi|m)) = sin psi). It is
    computed through Carlson's R_F and the quasi-periodicity
    F(psi + j pi) = F(psi) + 2 j K, independently of the Landen code above.
    """
    m = _check_parameter(m, hi_closed=False)
    psi = np.asarray(psi, dtype=float)
    j = np.round(psi / np.pi)
    t = psi - j * np.pi
    s, c = np.sin(t), np.cos(t)
    # 1 - m s^2 written as (1 - m) + m c^2 to avoid cancellation near psi = pi/2, m -> 1
    val = s * carlson_rf(c * c, (1.0 - m) + m * c * c, 1.0)
    if np.any(j != 0):
        val = val + 2.0 * j * complete_K(m)
    return float(val) if val.ndim == 0 else val
