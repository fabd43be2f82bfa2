"""Spectrum of the linearization about the cnoidal wave and the Lame band edges.

The linearization is

    L psi = 12 (V3/V2) (c_kdv - d^2)^-1 (Phi_1 psi),

a compact operator that is self-adjoint for the inner product with weight
(c_kdv + s^2) on Fourier modes; for c_kdv = 1 that is exactly the H^1 inner
product. It is discretized on the complex Fourier modes -M+1..M-1 of the 2L
grid (the Nyquist mode is dropped so that the mode set is symmetric).

Its eigenproblem is equivalent, after y = K xi / L, to the Lame equation
-psi'' + n(n+1) m sn^2(y; m) psi = h psi with 12/lambda = n(n+1). The band
edges for n = 2, 3 have closed forms; ``hill_spectrum_numeric`` recomputes
them with a Fourier-Floquet Galerkin method.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .elliptic import complete_K, jacobi_sn_cn_dn
from .fourier import PeriodicGrid, PeriodicProfile
from .kdv import eval_derivative, eval_profile

__all__ = [
    "LinearizedOperator",
    "Eigenpair",
    "BandStructure",
    "build_linearization",
    "eigenpairs",
    "even_spectral_gap",
    "second_order_form_residual",
    "lame_band_edges_closed_form",
    "hill_spectrum_numeric",
    "HillSpectrum",
    "eigenvalue_transform_chain",
    "general_n_lame_eigenvalue",
    "band_structure_sweep",
]


def _modes(n):
    M = n // 2
    return np.arange(-M + 1, M)


@dataclass(frozen=True, eq=False)
class LinearizedOperator:
    """Matrix of L on Fourier modes ``modes`` (ascending, symmetric about 0)."""

    wave: object
    grid: PeriodicGrid
    matrix: np.ndarray
    modes: np.ndarray
    weights: np.ndarray  # sqrt(c_kdv + s^2), symmetrizes the matrix

    @property
    def s(self):
        return np.pi / self.grid.L * self.modes

    def symmetrized(self):
        return (self.weights[:, None] * self.matrix) / self.weights[None, :]

    def h1_adjoint_defect(self):
        """max |M - M*| with M* the adjoint in the H^1 inner product (weight 1 + s^2)."""
        w2 = 1.0 + self.s**2
        adj = self.matrix.T * w2[None, :] / w2[:, None]
        return float(np.max(np.abs(self.matrix - adj)))

    def apply(self, coeffs):
        """Apply L to a function given by its coefficients on ``modes``."""
        return self.matrix @ coeffs

    def coefficients(self, f):
        """Coefficients of f (callable on [0, 2L)) on ``modes``, from a 4x oversampled FFT."""
        n = 4 * self.grid.n
        x = np.arange(n) * (2.0 * self.grid.L / n)
        c = np.fft.fft(f(x)) / n
        return c[self.modes % n]


def build_linearization(wave, grid):
    """Assemble L = P^(0) o (V3 Phi_1 .) for ``wave`` on ``grid``.

    The product coefficients come from the exact convolution of the Fourier
    coefficients of Phi_1 (taken from an oversampled FFT), so the matrix is the
    Galerkin projection of L onto the retained modes.
    """
    if abs(grid.L - wave.L) > 1e-12 * wave.L:
        raise ValueError(f"grid half-period {grid.L} differs from the wave's {wave.L}")
    modes = _modes(grid.n)
    nf = 4 * grid.n
    x = np.arange(nf) * (2.0 * grid.L / nf)
    g = np.fft.fft(eval_profile(wave, x)).real / nf  # Phi_1 is even, so its coefficients are real
    s = np.pi / grid.L * modes
    ratio = wave.coeffs.ratio
    p = 12.0 * ratio / (wave.c_kdv + s**2)
    G = g[np.subtract.outer(modes, modes) % nf]
    return LinearizedOperator(
        wave=wave, grid=grid, matrix=p[:, None] * G, modes=modes,
        weights=np.sqrt(wave.c_kdv + s**2),
    )


@dataclass(frozen=True, eq=False)
class Eigenpair:
    value: float
    coeffs: np.ndarray  # on opr.modes
    parity: str
    alignment_phi: float
    alignment_dphi: float
    separation: float  # distance to the nearest other eigenvalue

    def record(self):
        return {
            "lambda": self.value,
            "parity": self.parity,
            "alignment_phi": self.alignment_phi,
            "alignment_dphi": self.alignment_dphi,
            "separation": self.separation,
        }


def _h1_inner(opr, a, b):
    w2 = 1.0 + opr.s**2
    return 2.0 * opr.grid.L * np.sum(w2 * a * np.conj(b))


def _alignment(opr, a, b):
    num = abs(_h1_inner(opr, a, b))
    den = np.sqrt(abs(_h1_inner(opr, a, a)) * abs(_h1_inner(opr, b, b)))
    return float(num / den) if den > 0 else 0.0


def _parity(c):
    sym = np.linalg.norm(c + c[::-1])
    anti = np.linalg.norm(c - c[::-1])
    if anti <= 1e-8 * sym:
        return "even"
    if sym <= 1e-8 * anti:
        return "odd"
    return "mixed"


def _eigh(S):
    try:
        return np.linalg.eigh(S)
    except np.linalg.LinAlgError as exc:
        raise np.linalg.LinAlgError(f"eigensolver failed (condition number {np.linalg.cond(S):.3e}): {exc}") from None


def eigenpairs(opr, count=6):
    """The ``count`` eigenpairs of largest |lambda|, sorted by decreasing lambda.

    Each eigenfunction carries its parity and its H^1 alignment with Phi_1 and
    Phi_1'. Degenerate (even/odd) pairs would mix parities, so parity is
    classified from the symmetric/antisymmetric parts of the coefficient vector.
    """
    size = len(opr.modes)
    if count > size:
        raise ValueError(f"count={count} exceeds the matrix size {size}")
    vals, vecs = _eigh(opr.symmetrized())
    order = np.argsort(-np.abs(vals))[:count]
    phi = opr.coefficients(lambda x: eval_profile(opr.wave, x))
    dphi = opr.coefficients(lambda x: eval_derivative(opr.wave, x))
    out = []
    for j in sorted(order, key=lambda i: -vals[i]):
        c = vecs[:, j] / opr.weights
        others = np.delete(vals, j)
        out.append(Eigenpair(
            value=float(vals[j]), coeffs=c, parity=_parity(c),
            alignment_phi=_alignment(opr, c, phi), alignment_dphi=_alignment(opr, c, dphi),
            separation=float(np.min(np.abs(others - vals[j]))),
        ))
    return out


def even_spectral_gap(opr):
    """min |1 - lambda| over the spectrum of L restricted to even functions."""
    modes = opr.modes
    M = modes[-1]
    # even functions: c_m = c_-m; orthonormal basis e_0 and (e_m + e_-m)/sqrt(2)
    S = opr.symmetrized()
    idx0 = M  # position of mode 0
    B = np.zeros((len(modes), M + 1))
    B[idx0, 0] = 1.0
    for k in range(1, M + 1):
        B[idx0 + k, k] = B[idx0 - k, k] = np.sqrt(0.5)
    vals = np.linalg.eigvalsh(B.T @ S @ B)
    return float(np.min(np.abs(1.0 - vals))), vals


def second_order_form_residual(lam, psi, wave, flipped_signs=False):
    """Sup-norm of -c psi + (12/lambda)(V3/V2) Phi_1 psi + psi'' for a profile psi.

    This is L psi = lambda psi multiplied through by (c - d^2)/lambda. With
    ``flipped_signs=True`` the signs of the last two terms are flipped, giving the
    form -c psi - (12/lambda)(V3/V2) Phi_1 psi - psi'' = 0, which eigenpairs of
    L do not satisfy; it is kept only so the difference can be demonstrated.
    """
    if lam == 0:
        raise ValueError("lambda = 0 has no second-order form")
    x = psi.grid.nodes
    phi1 = eval_profile(wave, x)
    d2 = psi.derivative(2).values
    sign = -1.0 if flipped_signs else 1.0
    res = -wave.c_kdv * psi.values + sign * (12.0 / lam * wave.coeffs.ratio * phi1 * psi.values + d2)
    return float(np.max(np.abs(res)))


# ----------------------------------------------------------------------------
# Lame band edges


_EDGE_ORDER = {
    3: ("E0+", "E0-", "E1-", "E1+", "E2+", "E2-", "E3-"),
    2: ("E0+", "E0-", "E1-", "E1+", "E2+"),
}

# (period, parity) of each band-edge eigenfunction
EDGE_CLASS = {
    3: {
        "E0+": ("2K", "even"), "E0-": ("4K", "even"), "E1-": ("4K", "odd"), "E1+": ("2K", "odd"),
        "E2+": ("2K", "even"), "E2-": ("4K", "even"), "E3-": ("4K", "odd"),
    },
    2: {
        "E0+": ("2K", "even"), "E0-": ("4K", "even"), "E1-": ("4K", "odd"), "E1+": ("2K", "odd"),
        "E2+": ("2K", "even"),
    },
}


@dataclass(frozen=True)
class BandStructure:
    n_lame: int
    m: float
    edges: dict  # name -> value, in the interlacing order
    periodic_eigs: tuple = field(init=False)
    semiperiodic_eigs: tuple = field(init=False)

    def __post_init__(self):
        per = sorted(v for k, v in self.edges.items() if k.endswith("+"))
        semi = sorted(v for k, v in self.edges.items() if k.endswith("-"))
        object.__setattr__(self, "periodic_eigs", tuple(per))
        object.__setattr__(self, "semiperiodic_eigs", tuple(semi))

    @property
    def chain(self):
        return [self.edges[k] for k in _EDGE_ORDER[self.n_lame]]

    @property
    def bands(self):
        """The n+1 stable bands; the last one is unbounded."""
        c = self.chain
        out = [(c[i], c[i + 1]) for i in range(0, len(c) - 1, 2)]
        out.append((c[-1], np.inf))
        return out

    @property
    def gaps(self):
        c = self.chain
        return [(c[i], c[i + 1]) for i in range(1, len(c) - 1, 2)]

    def interlaced(self, tol=0.0):
        """E0+ < E0- <= E1- < E1+ <= E2+ < ... (strict between bands' ends).

        ``tol`` > 0 forgives violations of that size, for edges that meet at roundoff.
        """
        c = self.chain
        for i in range(len(c) - 1):
            strict = i % 2 == 0
            if strict and not c[i] < c[i + 1] + tol:
                return False
            if not strict and not c[i] <= c[i + 1] + tol:
                return False
        return True


def lame_band_edges_closed_form(n_lame, m):
    """Closed-form band edges of -d^2 + n(n+1) m sn^2(y; m) for n in {2, 3}."""
    if n_lame not in (2, 3):
        raise ValueError(f"closed forms exist here only for n = 2, 3 (got {n_lame})")
    m = float(m)
    if not 0.0 < m < 1.0:
        raise ValueError(f"need 0 < m < 1, got {m}")
    if n_lame == 3:
        r1 = np.sqrt(1.0 - m + 4.0 * m * m)
        r2 = np.sqrt(4.0 - m + m * m)
        r3 = np.sqrt(4.0 - 7.0 * m + 4.0 * m * m)
        edges = {
            "E0+": 2.0 + 5.0 * m - 2.0 * r1,
            "E0-": 5.0 + 2.0 * m - 2.0 * r2,
            "E1-": 5.0 + 5.0 * m - 2.0 * r3,
            "E1+": 4.0 + 4.0 * m,
            "E2+": 2.0 + 5.0 * m + 2.0 * r1,
            "E2-": 5.0 + 2.0 * m + 2.0 * r2,
            "E3-": 5.0 + 5.0 * m + 2.0 * r3,
        }
    else:
        r = np.sqrt(1.0 - m + m * m)
        edges = {
            "E0+": 2.0 + 2.0 * m - 2.0 * r,
            "E0-": 1.0 + m,
            "E1-": 1.0 + 4.0 * m,
            "E1+": 4.0 + m,
            "E2+": 2.0 + 2.0 * m + 2.0 * r,
        }
    return BandStructure(n_lame, m, {k: float(v) for k, v in edges.items()})


@dataclass(frozen=True, eq=False)
class HillSpectrum:
    n_lame: int
    m: float
    boundary: str
    eigenvalues: np.ndarray
    parity: tuple
    degenerate_pairs: tuple  # index pairs (i, i+1) with near-equal eigenvalues
    accuracy: float  # tail of the potential's Fourier coefficients
    warning: str | None = None


def _sn2_coefficients(m, K, size):
    # Fourier coefficients of sn^2 over its period 2K, from an oversampled FFT
    y = np.arange(size) * (2.0 * K / size)
    sn = jacobi_sn_cn_dn(y, m).sn
    return np.fft.fft(sn * sn).real / size


def hill_spectrum_numeric(n_lame, m, grid=64, boundary="periodic", count=None):
    """Eigenvalues of -d^2 + n(n+1) m sn^2(y; m) on [0, 2K) with psi(y + 2K) = +-psi(y).

    Galerkin on exp(i pi (j + theta) y / K), theta = 0 (periodic) or 1/2
    (semi-periodic, i.e. the 4K-periodic functions that flip sign over 2K).
    ``grid`` is the number of retained modes. Returns the ``count`` lowest
    eigenvalues (default all) with their parity about y = 0.
    """
    if boundary not in ("periodic", "semiperiodic"):
        raise ValueError(f"boundary must be 'periodic' or 'semiperiodic', got {boundary!r}")
    m = float(m)
    if not 0.0 <= m < 1.0:
        raise ValueError(f"need 0 <= m < 1, got {m}")
    K = complete_K(m)
    J = int(grid) // 2
    if boundary == "periodic":
        j = np.arange(-J, J + 1).astype(float)
    else:
        j = np.arange(-J, J) + 0.5
    size = 8 * len(j)
    v = _sn2_coefficients(m, K, size) if m > 0 else np.zeros(size)
    idx = np.rint(np.subtract.outer(j, j)).astype(int) % size
    H = np.diag((np.pi * j / K) ** 2) + n_lame * (n_lame + 1) * m * v[idx]
    vals, vecs = _eigh(H)
    parity = tuple(_parity(vecs[:, i]) for i in range(len(vals)))

    # the potential's coefficients decay geometrically; the modes beyond the
    # basis width measure the truncation
    tail = float(n_lame * (n_lame + 1) * m * np.max(np.abs(v[len(j) : size - len(j)]), initial=0.0))
    resolved = vecs[[0, -1], :]
    edge_mass = float(np.max(np.abs(resolved[:, : max(1, len(vals) // 4)])))
    warning = None
    if tail > 1e-12 or edge_mass > 1e-10:
        warning = (f"grid={grid} may be insufficient: potential tail {tail:.1e}, "
                   f"edge-mode weight of low eigenvectors {edge_mass:.1e}")
        warnings.warn(warning, RuntimeWarning, stacklevel=2)
    scale = max(1.0, float(np.max(np.abs(vals[: max(1, len(vals) // 4)]))))
    pairs = tuple((i, i + 1) for i in range(len(vals) - 1) if abs(vals[i + 1] - vals[i]) < 1e-8 * scale)
    if count is not None:
        vals = vals[:count]
        parity = parity[:count]
        pairs = tuple(p for p in pairs if p[1] < count)
    return HillSpectrum(n_lame, m, boundary, vals, parity, pairs, max(tail, edge_mass), warning)


def eigenvalue_transform_chain(lam, m):
    """(h_cn, h_sn) for the eigenvalue lambda of L mapped to the Lame form.

    h_cn = (4 - 8m)/lambda + 4 (1/lambda - 1) sqrt(1 - m + m^2) and
    h_sn = h_cn + 12 m / lambda, with m = k^2.
    """
    if lam not in (1, 2):
        raise ValueError(f"lambda must be 1 or 2, got {lam}")
    root = np.sqrt(1.0 - m + m * m)
    h_cn = (4.0 - 8.0 * m) / lam + 4.0 * (1.0 / lam - 1.0) * root
    return float(h_cn), float(h_cn + 12.0 * m / lam)


def general_n_lame_eigenvalue(n, m):
    """(1/3)(n(n+1)(1+m) + 4(n(n+1) - 3) sqrt(1 - m + m^2)), a closed form proposed for general n.

    Kept for comparison: it does not reproduce the band edges that the
    transform chain and the closed-form tables give (see the tests).
    """
    nn = n * (n + 1)
    return float((nn * (1.0 + m) + 4.0 * (nn - 3) * np.sqrt(1.0 - m + m * m)) / 3.0)


def band_structure_sweep(n_lame, m_list):
    """Rows (k2, edge_name, value) of the closed-form band edges over ``m_list``."""
    rows = []
    for m in m_list:
        bs = lame_band_edges_closed_form(n_lame, m)
        if not bs.interlaced(tol=1e-12 * max(bs.chain)):
            raise AssertionError(f"interlacing violated at k^2={m}: {bs.chain}")
        for name in _EDGE_ORDER[n_lame]:
            rows.append((float(m), name, bs.edges[name]))
    return rows


def linearization_profile(opr, pair):
    """Real profile on the operator's grid for an eigenpair (odd pairs are rotated by -i)."""
    n = opr.grid.n
    c = np.zeros(n, dtype=complex)
    c[opr.modes % n] = pair.coeffs
    if pair.parity == "odd":
        c = -1j * c
    return PeriodicProfile.from_coeffs(c, opr.grid)
