"""Newton solver for periodic lattice travelling waves in renormalized form.

Unknown: the even 2L-periodic profile Phi with r_c(x) = eps^2 Phi(eps x). It
solves

    Phi = P^(eps) N^(eps)(Phi),

and at eps = 0 this is the integrated KdV equation whose solution is the
cnoidal wave. Because the linearization about the cnoidal wave has an
eigenvalue 1 with an odd eigenfunction (the translation mode), the problem is
posed on even profiles only: the unknowns are the cosine coefficients
a_m = Phi^(m) = Phi^(-m), m = 0..n/2-1, and the Nyquist mode is held at zero.

Products are formed on a grid padded by ``SolverConfig.pad`` (default 2, which
covers the 3/2 rule for the quadratic part). The Jacobian is assembled from
the aliased DFT of N' on that same padded grid, so it is the exact derivative
of the discrete map and Newton converges quadratically.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import cached_property

import numpy as np

from .fourier import MultiplierSymbol, PeriodicGrid, PeriodicProfile, wave_speed_squared
from .potentials import from_spec
from .kdv import KdvCoefficients, eval_profile, kdv_speed, make_cnoidal, speed_one_half_period

__all__ = [
    "SolverConfig",
    "WaveSolution",
    "IFTCertificate",
    "ConvergenceError",
    "OutOfRegimeError",
    "EvenSpace",
    "nonlinearity_N_eps",
    "fixed_point_residual",
    "newton_solve",
    "solve_wave",
    "lattice_residual",
    "continue_in_speed",
    "speed_sweep",
    "ift_certificate",
]


class ConvergenceError(RuntimeError):
    def __init__(self, message, history=()):
        super().__init__(message)
        self.history = list(history)


class OutOfRegimeError(ValueError):
    pass


@dataclass(frozen=True)
class SolverConfig:
    n: int = 256
    tol: float = 1e-12
    max_iters: int = 20
    eps0: float = 0.5
    delta: float | None = None
    pad: int = 2
    speed_form: str = "quadratic"

    def __post_init__(self):
        if self.tol < 1e-14:
            raise ValueError(f"tolerance below the attainable floor: {self.tol}")
        if self.pad < 2:
            raise ValueError("pad must be >= 2 for a dealiased quadratic product")


class EvenSpace:
    """Cosine-coefficient coordinates for even profiles on a [0, 2L) grid of n points."""

    def __init__(self, L, n, pad=2):
        self.L = float(L)
        self.n = int(n)
        self.M = self.n // 2
        self.P = pad * self.n
        self.grid = PeriodicGrid(self.L, self.n)
        self.s = np.pi / self.L * np.arange(self.M)
        mult = np.full(self.M, 2.0)
        mult[0] = 1.0
        self.mult = mult
        # H^1 weights in cosine coordinates: ||a||^2 = sum_m w_m^2 a_m^2
        self.w = np.sqrt(2.0 * self.L * mult * (1.0 + self.s**2))

    def norm(self, a):
        return float(np.linalg.norm(self.w * a))

    def to_full(self, a, size=None):
        size = size or self.n
        c = np.zeros(size)
        c[: self.M] = a
        c[size - self.M + 1 :] = a[1:][::-1]
        return c

    def values(self, a, size=None):
        size = size or self.n
        return np.fft.ifft(self.to_full(a, size) * size).real

    def padded_values(self, a):
        return self.values(a, self.P)

    def from_padded(self, v):
        return (np.fft.fft(v) / self.P).real[: self.M]

    def from_values(self, v):
        v = np.asarray(v, dtype=float)
        return (np.fft.fft(v) / len(v)).real[: self.M]

    def profile(self, a):
        return PeriodicProfile(self.grid, self.values(a))

    def multiplication_matrix(self, g_values):
        """Matrix of a -> cos-coefficients of (g * Phi(a)) with g sampled on the padded grid."""
        gh = (np.fft.fft(g_values) / self.P).real
        m = np.arange(self.M)
        diff = np.subtract.outer(m, m) % self.P
        summ = np.add.outer(m, m) % self.P
        T = gh[diff] + gh[summ]
        T[:, 0] = gh[m]
        return T

    def weighted(self, A):
        """A expressed in an orthonormal basis of the H^1 norm, W A W^-1."""
        return (self.w[:, None] * A) / self.w[None, :]

    def op_norm(self, A):
        return float(np.linalg.norm(self.weighted(A), 2))

    def evaluate(self, a, x):
        """Phi(x) = a_0 + 2 sum_m a_m cos(s_m x) at arbitrary x."""
        x = np.asarray(x, dtype=float)
        return np.cos(np.multiply.outer(x, self.s)) @ (self.mult * a)


@dataclass(frozen=True, eq=False)
class WaveSolution:
    """A converged lattice wave in the normalized frame (c_kdv = 1 unless stated).

    ``coeffs`` are the cosine coefficients of Phi on [0, 2L); the lattice
    profile is r_c(x) = eps^2 Phi(eps x) with period 2L/eps and speed
    c = sqrt(c2).
    """

    eps: float
    m: float
    L: float
    c2: float
    coeffs: np.ndarray
    newton_iters: int
    residual_history: tuple
    fixed_point_residual: float
    h1_distance_to_cnoidal: float
    potential: dict
    n: int
    c_kdv: float = 1.0
    eps_base: float | None = None
    c_kdv_frame: float = 1.0
    config: SolverConfig = field(default_factory=SolverConfig, repr=False)

    @property
    def c(self):
        return float(np.sqrt(self.c2))

    @cached_property
    def space(self):
        return EvenSpace(self.L, self.n, self.config.pad)

    @property
    def phi(self):
        return self.space.profile(self.coeffs)

    @property
    def lattice_period(self):
        return 2.0 * self.L / self.eps

    def cnoidal(self, coeffs=None):
        return make_cnoidal(self.m, self.L, coeffs)

    def r_c(self, x):
        """Lattice profile r_c(x) = eps^2 Phi(eps x)."""
        return self.eps**2 * self.space.evaluate(self.coeffs, self.eps * np.asarray(x, dtype=float))

    def record(self):
        return {
            "eps": self.eps,
            "m": self.m,
            "L": self.L,
            "c": self.c,
            "c2": self.c2,
            "c_kdv": self.c_kdv,
            "eps_base": self.eps_base,
            "c_kdv_frame": self.c_kdv_frame,
            "newton_iters": self.newton_iters,
            "residual_history": list(self.residual_history),
            "fixed_point_residual": self.fixed_point_residual,
            "h1_distance_to_cnoidal": self.h1_distance_to_cnoidal,
            "lattice_period": self.lattice_period if self.eps > 0 else None,
            "potential": self.potential,
            "n": self.n,
            "tol": self.config.tol,
        }


def nonlinearity_N_eps(phi, eps, pot, pad=2):
    """N^(eps)(Phi) = (1/2) V3 Phi^2 (1 + eta(eps^2 Phi)), evaluated on a padded grid.

    The padded product is truncated back to the grid of ``phi``.
    """
    n = phi.grid.n
    P = pad * n
    c = phi.coeffs
    big = np.zeros(P, dtype=complex)
    h = n // 2
    big[:h] = c[:h]
    big[P - h + 1 :] = c[h + 1 :]
    vals = np.fft.ifft(big * P).real
    nv = pot.N_eps(vals, eps)
    nc = np.fft.fft(nv) / P
    out = np.zeros(n, dtype=complex)
    out[:h] = nc[:h]
    out[h + 1 :] = nc[P - h + 1 :]
    return PeriodicProfile.from_coeffs(out, phi.grid)


def _symbol(eps, V2, c_kdv, form):
    if eps == 0:
        return MultiplierSymbol.continuum(V2, c_kdv)
    return MultiplierSymbol.lattice(eps, V2, c_kdv, form)


def _residual(space, a, p, eps, pot):
    nh = space.from_padded(pot.N_eps(space.padded_values(a), eps))
    return a - p * nh


def _jacobian(space, a, p, eps, pot):
    g = pot.dN_eps(space.padded_values(a), eps)
    return np.eye(space.M) - p[:, None] * space.multiplication_matrix(g)


def fixed_point_residual(phi, eps, pot, c_kdv=1.0, pad=2, form="quadratic"):
    """H^1 norm of Phi - P^(eps) N^(eps)(Phi) for an even profile."""
    space = EvenSpace(phi.grid.L, phi.grid.n, pad)
    a = space.from_values(phi.values)
    p = _symbol(eps, pot.V2, c_kdv, form)(space.s)
    return space.norm(_residual(space, a, p, eps, pot))


def _newton(space, a0, p, eps, pot, config):
    a = np.array(a0, dtype=float)
    history = []
    for it in range(config.max_iters + 1):
        G = _residual(space, a, p, eps, pot)
        res = space.norm(G)
        history.append(res)
        if not np.isfinite(res):
            raise ConvergenceError(f"Newton diverged (non-finite residual) at eps={eps}", history)
        if res < config.tol:
            return a, it, history
        if it == config.max_iters:
            break
        J = _jacobian(space, a, p, eps, pot)
        a = a - np.linalg.solve(J, G)
    raise ConvergenceError(
        f"Newton did not reach tol={config.tol:g} in {config.max_iters} steps at eps={eps} "
        f"(last residual {history[-1]:.3e})",
        history,
    )


def _cnoidal_coeffs(space, m, L, coeffs):
    w = make_cnoidal(m, L, coeffs)
    x = np.arange(space.P) * (2.0 * L / space.P)
    return space.from_padded(eval_profile(w, x))


def newton_solve(eps, m0, pot, L0=None, config=None, initial=None):
    """Solve Phi = P^(eps) N^(eps)(Phi) near the speed-one cnoidal wave with parameter m0.

    ``L0`` defaults to the half-period with c_kdv(m0, L0) = 1; an explicit
    value must satisfy that normalization to 1e-12. ``initial`` optionally
    replaces the cnoidal seed by an even profile (cosine coefficients or a
    ``PeriodicProfile``) on the same grid.
    """
    config = config or SolverConfig()
    eps = float(eps)
    if eps < 0:
        raise ValueError("eps must be non-negative")
    if eps > config.eps0:
        raise OutOfRegimeError(f"eps={eps} exceeds the configured regime boundary eps0={config.eps0}")
    if L0 is None:
        L0 = speed_one_half_period(m0)
    elif abs(kdv_speed(m0, L0) - 1.0) > 1e-12:
        raise ValueError(f"(m0, L0) = ({m0}, {L0}) is not speed-one normalized: c_kdv = {kdv_speed(m0, L0)}")
    return _solve(eps, m0, L0, pot, config, initial, c_kdv=1.0, eps_base=eps)


def solve_wave(eps, m, L, pot, config=None):
    """Solve at an arbitrary half-period L, in the frame where c_kdv = c_kdv(m, L).

    With L = None (or a speed-one L) this is ``newton_solve``. Otherwise the
    multiplier uses c^2 = V2 (1 + eps^2 c_kdv / 12) and the seed is the cnoidal
    wave with that period (fixed-period families).
    """
    config = config or SolverConfig()
    if L is None or abs(kdv_speed(m, L) - 1.0) <= 1e-12:
        return newton_solve(eps, m, pot, L0=L, config=config)
    if eps < 0:
        raise ValueError("eps must be non-negative")
    if eps > config.eps0:
        raise OutOfRegimeError(f"eps={eps} exceeds the configured regime boundary eps0={config.eps0}")
    return _solve(float(eps), m, L, pot, config, None, c_kdv=kdv_speed(m, L), eps_base=float(eps))


def _solve(eps, m, L, pot, config, initial, c_kdv, eps_base):
    coeffs = KdvCoefficients(pot.V2, pot.V3)
    space = EvenSpace(L, config.n, config.pad)
    a1 = _cnoidal_coeffs(space, m, L, coeffs)
    if initial is None:
        a0 = a1
    elif isinstance(initial, PeriodicProfile):
        a0 = space.from_values(initial.values)
    else:
        a0 = np.asarray(initial, dtype=float)
    p = _symbol(eps, pot.V2, c_kdv, config.speed_form)(space.s)
    a, iters, history = _newton(space, a0, p, eps, pot, config)
    dist = space.norm(a - a1)
    if config.delta is not None and dist >= config.delta:
        raise OutOfRegimeError(
            f"solution at eps={eps} lies {dist:.3g} from the cnoidal wave, outside delta={config.delta}"
        )
    c2 = wave_speed_squared(eps, pot.V2, c_kdv, config.speed_form) if eps > 0 else pot.V2
    return WaveSolution(
        eps=eps, m=float(m), L=float(L), c2=c2, coeffs=a, newton_iters=iters,
        residual_history=tuple(history), fixed_point_residual=history[-1],
        h1_distance_to_cnoidal=dist, potential=pot.spec(), n=config.n,
        c_kdv=c_kdv, eps_base=eps_base, c_kdv_frame=c_kdv, config=config,
    )


def lattice_residual(sol, pot, coeffs=None, n_fine=None):
    """Sup-norm mismatch of c^2 r_c'' = (S+ - 2 + S-) V'(r_c) over one lattice period.

    r_c is sampled on a fine uniform grid of its period 2L/eps; r_c'' and the
    unit shifts are applied as exact Fourier multipliers (-kappa^2 and
    2 cos(kappa) - 2). Nothing from the renormalized formulation is reused.
    """
    if sol.eps == 0:
        raise ValueError("lattice residual is undefined at eps = 0")
    a = sol.coeffs if coeffs is None else np.asarray(coeffs, dtype=float)
    space = sol.space
    n_fine = n_fine or 4 * sol.n
    period = sol.lattice_period
    # r_c is band-limited with known coefficients; differentiating those directly keeps
    # the kappa^2 factor from amplifying the roundoff of a resampled r
    rhat = sol.eps**2 * n_fine * space.to_full(a, n_fine)
    r = np.fft.ifft(rhat).real
    if not np.any(r):
        return 0.0
    kappa = 2.0 * np.pi / period * np.fft.fftfreq(n_fine, d=1.0 / n_fine)
    lhs = sol.c2 * np.fft.ifft(-(kappa**2) * rhat).real
    rhs = np.fft.ifft((2.0 * np.cos(kappa) - 2.0) * np.fft.fft(pot.vprime(r))).real
    return float(np.max(np.abs(lhs - rhs)))


def continue_in_speed(sol, m, L, pot, config=None, min_step=1e-4, _depth=0):
    """Follow the solution branch from ``sol`` to the cnoidal parameters (m, L) at fixed base eps.

    The unnormalized problem at (m, L) uses c^2 = V2 (1 + eps^2 c_kdv(m, L)/12).
    Its solution is returned in the normalized frame: Phi -> Phi(x/sqrt(c)) / c
    with c = c_kdv(m, L), eps -> sqrt(c) eps, L -> sqrt(c) L. If Newton fails
    the step is bisected; below ``min_step`` (relative change in (m, L)) the
    continuation gives up.
    """
    config = config or sol.config
    eps = sol.eps_base if sol.eps_base is not None else sol.eps
    c_prev = sol.c_kdv_frame
    c_new = kdv_speed(m, L)
    # predictor: undo the previous normalization; cosine coefficients carry the period stretch
    predictor = c_prev * np.asarray(sol.coeffs) * (c_new / c_prev)
    try:
        raw = _solve(eps, m, L, pot, replace(config, delta=None), predictor, c_kdv=c_new, eps_base=eps)
    except ConvergenceError:
        m_prev, L_prev = sol.m, sol.L / np.sqrt(c_prev)
        step = max(abs(m - m_prev) / max(m_prev, 1e-300), abs(L - L_prev) / L_prev)
        if step < min_step or _depth > 30:
            raise
        mid = continue_in_speed(sol, 0.5 * (m + m_prev), 0.5 * (L + L_prev), pot, config, min_step, _depth + 1)
        return continue_in_speed(mid, m, L, pot, config, min_step, _depth + 1)
    return _normalize(raw, config)


def _normalize(raw, config):
    c = raw.c_kdv_frame
    eps_n = np.sqrt(c) * raw.eps
    L_n = np.sqrt(c) * raw.L
    space = EvenSpace(L_n, config.n, config.pad)
    coeffs = raw.coeffs / c
    a1 = _cnoidal_coeffs(space, raw.m, L_n, KdvCoefficients(*_v23(raw)))
    return replace(
        raw, eps=eps_n, L=L_n, coeffs=coeffs, c_kdv=1.0,
        fixed_point_residual=raw.fixed_point_residual / c,
        h1_distance_to_cnoidal=space.norm(coeffs - a1),
    )


def _v23(sol):
    pot = from_spec(sol.potential)
    return pot.V2, pot.V3


def speed_sweep(sol, c_targets, pot, config=None):
    """Continue ``sol`` (normalized, m fixed) through the KdV speeds in ``c_targets``.

    The half-period for each target is L0 / sqrt(c_kdv) with L0 the speed-one
    half-period of ``sol.m``. Returns the list of continued solutions.
    """
    L0 = speed_one_half_period(sol.m)
    out = []
    cur = sol
    for ct in c_targets:
        cur = continue_in_speed(cur, sol.m, L0 / np.sqrt(ct), pot, config)
        out.append(cur)
    return out


@dataclass(frozen=True)
class IFTCertificate:
    """Numerical evaluation of the contraction hypotheses of the quantitative IFT.

    C0 bounds ||(I - L)^-1|| on even profiles, C1 the variation of DF over the
    delta-ball, C2 the size of the eps-perturbation D(F~). ``holds`` is True when
    C0 (C1 + C2) <= theta < 1 and ||F~(Phi1)|| < delta (1 - theta) / C0.
    C1 is a sampled estimate; C1_bound is the analytic upper bound
    12 V3/V2 delta sqrt(coth(L)/2) (Sobolev embedding into sup-norm).
    """

    eps: float
    delta: float
    C0: float
    C1: float
    C1_bound: float
    C2: float
    theta: float
    F_tilde_norm: float
    holds: bool
    error_bound: float
    actual_distance: float
    violated: str | None = None

    def as_dict(self):
        return dict(self.__dict__)


def ift_certificate(sol, pot, delta=0.1, n_samples=8, seed=0):
    """Estimate (C0, C1, C2, theta) for the solution ``sol`` on the even subspace."""
    space = sol.space
    eps = sol.eps
    coeffs = KdvCoefficients(pot.V2, pot.V3)
    a1 = _cnoidal_coeffs(space, sol.m, sol.L, coeffs)
    p0 = MultiplierSymbol.continuum(pot.V2, 1.0)(space.s)
    pe = _symbol(eps, pot.V2, 1.0, sol.config.speed_form)(space.s)

    def DF(a):
        return p0[:, None] * space.multiplication_matrix(pot.V3 * space.padded_values(a))

    def DF_eps(a):
        return pe[:, None] * space.multiplication_matrix(pot.dN_eps(space.padded_values(a), eps))

    L_op = DF(a1)
    I = np.eye(space.M)
    C0 = space.op_norm(np.linalg.inv(I - L_op))

    rng = np.random.default_rng(seed)
    directions = [a1, np.eye(space.M)[0]]
    for k in range(1, 4):
        directions.append(np.eye(space.M)[k])
    for _ in range(n_samples):
        d = rng.standard_normal(space.M) * np.exp(-0.5 * np.arange(space.M))
        directions.append(d)
    directions = [delta * d / space.norm(d) for d in directions]

    C1 = 0.0
    C2 = space.op_norm(DF_eps(a1) - L_op) if eps > 0 else 0.0
    for h in directions:
        for sgn in (1.0, -1.0):
            a = a1 + sgn * h
            C1 = max(C1, space.op_norm(DF(a) - L_op))
            if eps > 0:
                C2 = max(C2, space.op_norm(DF_eps(a) - DF(a)))
    C1_bound = 12.0 * pot.V3 / pot.V2 * delta * np.sqrt(1.0 / np.tanh(sol.L) / 2.0)

    theta = C0 * (C1 + C2)
    nl1 = space.padded_values(a1)
    F_tilde = pe * space.from_padded(pot.N_eps(nl1, eps)) - p0 * space.from_padded(pot.N_eps(nl1, 0.0))
    F_tilde_norm = space.norm(F_tilde)
    violated = None
    if theta >= 1.0:
        violated = f"C0 (C1 + C2) = {theta:.4g} >= 1"
    elif F_tilde_norm >= delta * (1.0 - theta) / C0:
        violated = f"||F~(Phi1)|| = {F_tilde_norm:.4g} >= delta (1 - theta) / C0 = {delta * (1 - theta) / C0:.4g}"
    bound = C0 * F_tilde_norm / (1.0 - theta) if theta < 1.0 else np.inf
    return IFTCertificate(
        eps=eps, delta=delta, C0=C0, C1=C1, C1_bound=float(C1_bound), C2=C2, theta=theta,
        F_tilde_norm=F_tilde_norm, holds=violated is None, error_bound=float(bound),
        actual_distance=space.norm(sol.coeffs - a1), violated=violated,
    )
