"""Scan the ball radius delta in the implicit-function-theorem certificate.

For each eps, prints C0, C1, C2, theta and whether the contraction hypotheses
hold; the certified radius is bounded above because C1 grows linearly in delta
while C0 stays fixed.
"""
from dataclasses import dataclass, field

from cnoidal.potentials import from_spec
from cnoidal.solver import ift_certificate, newton_solve

from _common import outdir, parse, stamp, write_csv


@dataclass
class Config:
    k2: float = 0.6
    eps: list = field(default_factory=lambda: [0.2, 0.1, 0.05])
    delta: list = field(default_factory=lambda: [0.01, 0.02, 0.03, 0.04, 0.05, 0.07, 0.1])
    potential: str = "fpu_alpha"
    out: str = "scripts/out"


def main(cfg):
    pot = from_spec({"kind": cfg.potential})
    rows = []
    for e in cfg.eps:
        sol = newton_solve(e, cfg.k2, pot)
        for d in cfg.delta:
            c = ift_certificate(sol, pot, delta=d)
            rows.append((e, d, c.C0, c.C1, c.C1_bound, c.C2, c.theta, c.holds, c.error_bound, c.actual_distance))
            print(f"eps={e:<5} delta={d:<5} C0={c.C0:.3f} C1={c.C1:.3f} C2={c.C2:.2e} theta={c.theta:.3f} "
                  f"{'holds' if c.holds else 'fails: ' + c.violated}")
    write_csv(outdir(cfg.out) / "ift_scan.csv",
              ["eps", "delta", "C0", "C1", "C1_bound", "C2", "theta", "holds", "error_bound", "actual_distance"],
              rows, stamp(cfg))


if __name__ == "__main__":
    main(parse(Config, __doc__.splitlines()[0]))
