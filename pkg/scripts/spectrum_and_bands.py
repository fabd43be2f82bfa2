"""Spectrum of the linearization and the Lame band structure.

Prints the leading eigenvalues of L (2 and 1 are exact) and the even-subspace
gap across k^2, then tabulates the closed-form band edges for n = 2 and 3 and
their numerical (Fourier-Floquet) counterparts.
"""
from dataclasses import dataclass, field

import numpy as np

from cnoidal.fourier import PeriodicGrid
from cnoidal.kdv import make_cnoidal, speed_one_half_period
from cnoidal.lame import (
    EDGE_CLASS, band_structure_sweep, build_linearization, eigenpairs, even_spectral_gap,
    hill_spectrum_numeric, lame_band_edges_closed_form,
)

from _common import outdir, parse, stamp, write_csv


@dataclass
class Config:
    k2: list = field(default_factory=lambda: [0.1, 0.3, 0.5, 0.6, 0.7, 0.9, 0.99])
    grid: int = 256
    band_points: int = 50
    out: str = "scripts/out"


def main(cfg):
    rows = []
    for k2 in cfg.k2:
        L = speed_one_half_period(k2)
        n = cfg.grid if k2 < 0.95 else 4 * cfg.grid
        opr = build_linearization(make_cnoidal(k2, L), PeriodicGrid(L, n))
        pairs = eigenpairs(opr, 5)
        gap, _ = even_spectral_gap(opr)
        vals = [p.value for p in pairs]
        rows.append((k2, gap, *vals))
        print(f"k2={k2:<5} eigenvalues {np.round(vals, 6)}  parities {[p.parity for p in pairs]}  even gap {gap:.4f}")
    out = outdir(cfg.out)
    st = stamp(cfg)
    write_csv(out / "linearization_spectrum.csv", ["k2", "even_gap"] + [f"lambda_{i}" for i in range(5)], rows, st)

    ms = np.linspace(0.01, 0.99, cfg.band_points)
    for n in (2, 3):
        write_csv(out / f"bands_n{n}.csv", ["k2", "edge_name", "value"], band_structure_sweep(n, ms), st)
        worst = 0.0
        for m in (0.25, 0.5, 0.75):
            bs = lame_band_edges_closed_form(n, m)
            spec = {"2K": hill_spectrum_numeric(n, m, 64, "periodic"),
                    "4K": hill_spectrum_numeric(n, m, 64, "semiperiodic")}
            for name, v in bs.edges.items():
                ev = spec[EDGE_CLASS[n][name][0]].eigenvalues
                worst = max(worst, np.min(np.abs(ev - v)))
        print(f"n={n}: max |numeric - closed form| over k2 in (0.25, 0.5, 0.75) = {worst:.1e}")


if __name__ == "__main__":
    main(parse(Config, __doc__.splitlines()[0]))
