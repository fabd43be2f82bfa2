"""Cnoidal profiles at fixed speed (speed one) and at fixed period (L = pi).

Writes profiles_speed_one.csv and profiles_fixed_period.csv: the data behind
the two standard pictures of how the wave steepens as k^2 -> 1.
"""
from dataclasses import dataclass, field

import numpy as np

from cnoidal.kdv import eval_profile, make_cnoidal, speed_one_half_period

from _common import outdir, parse, stamp, write_csv


@dataclass
class Config:
    speed_one_k2: list = field(default_factory=lambda: [0.3, 0.6, 0.999])
    fixed_period_k2: list = field(default_factory=lambda: [0.6, 0.9, 0.999])
    fixed_L: float = np.pi
    samples: int = 801
    out: str = "scripts/out"


def main(cfg):
    out = outdir(cfg.out)
    st = stamp(cfg)
    rows = []
    for k2 in cfg.speed_one_k2:
        w = make_cnoidal(k2, speed_one_half_period(k2))
        xi = np.linspace(-w.L, w.L, cfg.samples)
        rows += [(k2, 2 * w.L, x, p) for x, p in zip(xi, eval_profile(w, xi))]
        print(f"speed one   k2={k2:<6} period 2L={2 * w.L:.4f}  max={w.E3:.4f}  min={w.E2:.4f}")
    write_csv(out / "profiles_speed_one.csv", ["k2", "period", "xi", "phi"], rows, st)
    rows = []
    for k2 in cfg.fixed_period_k2:
        w = make_cnoidal(k2, cfg.fixed_L)
        xi = np.linspace(-w.L, w.L, cfg.samples)
        rows += [(k2, w.c_kdv, x, p) for x, p in zip(xi, eval_profile(w, xi))]
        print(f"L = {cfg.fixed_L:.4f} k2={k2:<6} c_kdv={w.c_kdv:.4f}  max={w.E3:.4f}")
    write_csv(out / "profiles_fixed_period.csv", ["k2", "c_kdv", "xi", "phi"], rows, st)


if __name__ == "__main__":
    main(parse(Config, __doc__.splitlines()[0]))
