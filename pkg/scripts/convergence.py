"""Convergence of the lattice wave to the cnoidal wave as eps -> 0.

For each eps: Newton iterations, H^1 distance to Phi_1, fixed-point and
lattice-equation residuals, and the multiplier gap; then log-log slopes.
Also reports the largest eps (on a grid up to eps_max) at which Newton still
converges, since no regime boundary is known a priori.
"""
from dataclasses import dataclass, field

import numpy as np

from cnoidal.fourier import multiplier_gap
from cnoidal.potentials import from_spec
from cnoidal.solver import ConvergenceError, SolverConfig, lattice_residual, newton_solve

from _common import outdir, parse, stamp, write_csv, write_json


@dataclass
class Config:
    k2: float = 0.6
    eps: list = field(default_factory=lambda: [0.4, 0.2, 0.1, 0.05, 0.025])
    potential: str = "fpu_alpha"
    grid: int = 256
    eps_max: float = 2.0
    out: str = "scripts/out"


def main(cfg):
    pot = from_spec({"kind": cfg.potential})
    scfg = SolverConfig(n=cfg.grid, eps0=cfg.eps_max)
    rows = []
    for e in cfg.eps:
        sol = newton_solve(e, cfg.k2, pot, config=scfg)
        rows.append((e, sol.newton_iters, sol.h1_distance_to_cnoidal, sol.fixed_point_residual,
                     lattice_residual(sol, pot), multiplier_gap(e, sol.space.grid, pot.V2)))
        print("eps={:<6} iters={} dist={:.3e} fp={:.1e} lattice={:.1e} gap={:.3e}".format(*rows[-1]))
    a = np.array([r[:3] + r[5:] for r in rows], dtype=float)
    slope_d = np.polyfit(np.log(a[:, 0]), np.log(a[:, 2]), 1)[0]
    slope_g = np.polyfit(np.log(a[:, 0]), np.log(a[:, 3]), 1)[0]
    print(f"slope(h1 distance) = {slope_d:.4f}   slope(multiplier gap) = {slope_g:.4f}")

    largest, grid = None, np.arange(0.05, cfg.eps_max + 1e-12, 0.05)
    for e in grid:
        try:
            newton_solve(float(e), cfg.k2, pot, config=scfg)
            largest = float(e)
        except (ConvergenceError, FloatingPointError):
            break
    note = " (the scan limit; raise --eps_max)" if largest is not None and largest >= grid[-1] - 1e-12 else ""
    print(f"largest converging eps on a 0.05 grid: {largest}{note}")

    out = outdir(cfg.out)
    st = stamp(cfg)
    write_csv(out / "convergence.csv",
              ["eps", "newton_iters", "h1_distance", "fixed_point_residual", "lattice_residual", "multiplier_gap"],
              rows, st)
    write_json(out / "convergence.json", {"slope_h1_distance": slope_d, "slope_multiplier_gap": slope_g,
                                          "largest_converging_eps": largest}, st)


if __name__ == "__main__":
    main(parse(Config, __doc__.splitlines()[0]))
