"""Command-line entry point.

    cnoidal wave|sweep|spectrum|bands|simulate|limits --config run.json [--out DIR]

Exit codes: 0 success (including sweeps with flagged rows), 1 configuration
error, 2 out-of-regime solve. CNOIDAL_THREADS caps the sweep worker count.
"""
from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from pathlib import Path

import numpy as np

from .fourier import PeriodicGrid, multiplier_gap
from .io import COMMANDS, ConfigError, load_config, write_csv, write_json
from .kdv import (
    KdvCoefficients, eval_profile, linear_limit, make_cnoidal, soliton_limit, speed_one_half_period,
)
from .lame import (
    EDGE_CLASS, band_structure_sweep, hill_spectrum_numeric, build_linearization, eigenpairs, even_spectral_gap,
    linearization_profile, second_order_form_residual,
)
from .lattice import propagate, propagate_and_compare, seed_from_cnoidal, seed_from_wave
from .potentials import from_spec
from .solver import ConvergenceError, OutOfRegimeError, SolverConfig, lattice_residual, solve_wave

EXIT_OK, EXIT_CONFIG, EXIT_REGIME = 0, 1, 2


def _solver_config(cfg):
    return SolverConfig(n=cfg.grid, tol=cfg.tol, max_iters=cfg.max_iters, eps0=cfg.eps0, speed_form=cfg.speed_form)


def _k2_values(cfg):
    return cfg.k2_list if cfg.k2_list else [cfg.k2]


def _tag(x):
    return repr(float(x))


def cmd_wave(cfg, out):
    pot = from_spec(cfg.potential)
    for k2 in _k2_values(cfg):
        for eps in cfg.eps_list:
            sol = solve_wave(eps, k2, cfg.L, pot, _solver_config(cfg))
            name = f"wave_k{_tag(k2)}_eps{_tag(eps)}"
            rec = sol.record()
            if eps > 0:
                rec["lattice_residual"] = lattice_residual(sol, pot)
            write_json(out / f"{name}.json", rec, cfg)
            xi = sol.space.grid.nodes
            phi = sol.phi.values
            phi1 = eval_profile(sol.cnoidal(KdvCoefficients(pot.V2, pot.V3)), xi)
            if eps > 0:
                rows = zip(xi, phi, phi1, xi / eps, eps**2 * phi)
                header = ["xi", "phi", "phi1", "x", "r_c"]
            else:
                rows = zip(xi, phi, phi1)
                header = ["xi", "phi", "phi1"]
            write_csv(out / f"{name}.csv", header, rows, cfg)
    return EXIT_OK


def _sweep_row(eps, k2, cfg, pot):
    row = {"eps": eps, "status": "ok"}
    try:
        sol = solve_wave(eps, k2, cfg.L, pot, _solver_config(cfg))
    except OutOfRegimeError as exc:
        row.update(status="out_of_regime", message=str(exc))
        return row
    except ConvergenceError as exc:
        row.update(status="diverged", message=str(exc))
        return row
    row.update(
        newton_iters=sol.newton_iters,
        h1_distance=sol.h1_distance_to_cnoidal,
        fixed_point_residual=sol.fixed_point_residual,
        lattice_residual=lattice_residual(sol, pot) if eps > 0 else 0.0,
        multiplier_gap=multiplier_gap(eps, sol.space.grid, pot.V2, sol.c_kdv),
    )
    return row


def _slope(x, y):
    x, y = np.asarray(x, float), np.asarray(y, float)
    ok = (x > 0) & (y > 0)
    if ok.sum() < 3:
        return None
    return float(np.polyfit(np.log(x[ok]), np.log(y[ok]), 1)[0])


def cmd_sweep(cfg, out):
    pot = from_spec(cfg.potential)
    threads = max(1, int(os.environ.get("CNOIDAL_THREADS", "1")))
    k2 = cfg.k2
    with ThreadPoolExecutor(max_workers=threads) as ex:
        rows = list(ex.map(lambda e: _sweep_row(e, k2, cfg, pot), cfg.eps_list))
    rows.sort(key=lambda r: -r["eps"])
    cols = ["eps", "status", "newton_iters", "h1_distance", "fixed_point_residual", "lattice_residual", "multiplier_gap"]
    write_csv(out / "convergence.csv", cols, ([r.get(c) for c in cols] for r in rows), cfg)
    good = [r for r in rows if r["status"] == "ok"]
    summary = {"rows": rows, "converged": len(good)}
    eps = [r["eps"] for r in good]
    for key in ("h1_distance", "multiplier_gap"):
        s = _slope(eps, [r[key] for r in good])
        if s is not None:
            summary[f"slope_{key}"] = s
    write_json(out / "convergence_summary.json", summary, cfg)
    return EXIT_OK


def cmd_spectrum(cfg, out):
    pot = from_spec(cfg.potential)
    k2 = cfg.k2
    L = cfg.L if cfg.L is not None else speed_one_half_period(k2)
    w = make_cnoidal(k2, L, KdvCoefficients(pot.V2, pot.V3))
    opr = build_linearization(w, PeriodicGrid(L, cfg.grid))
    pairs = eigenpairs(opr, cfg.count)
    gap, _ = even_spectral_gap(opr)
    recs, cols = [], []
    for p in pairs:
        prof = linearization_profile(opr, p)
        rec = p.record()
        rec["residual"] = second_order_form_residual(p.value, prof, w) / max(np.max(np.abs(prof.values)), 1e-300)
        recs.append(rec)
        cols.append(prof.values)
    write_json(out / "spectrum.json", {
        "k2": k2, "L": L, "c_kdv": w.c_kdv, "eigenpairs": recs, "even_gap": gap,
        "h1_adjoint_defect": opr.h1_adjoint_defect(),
    }, cfg)
    xi = opr.grid.nodes
    write_csv(out / "eigenfunctions.csv", ["xi"] + [f"psi_{i}" for i in range(len(cols))], zip(xi, *cols), cfg)
    return EXIT_OK


def cmd_bands(cfg, out):
    k2s = cfg.k2_list if cfg.k2_list else list(np.linspace(0.01, 0.99, 50))
    rows = band_structure_sweep(cfg.n_lame, k2s)
    write_csv(out / f"bands_n{cfg.n_lame}.csv", ["k2", "edge_name", "value"], rows, cfg)
    # cross-check every edge against the Fourier-Floquet eigenvalues of the matching period
    check, spectra = [], {}
    for k2, name, value in rows:
        period = EDGE_CLASS[cfg.n_lame][name][0]
        if (k2, period) not in spectra:
            bc = "periodic" if period == "2K" else "semiperiodic"
            spectra[k2, period] = hill_spectrum_numeric(cfg.n_lame, k2, cfg.hill_modes, bc).eigenvalues
        ev = spectra[k2, period]
        num = ev[np.argmin(np.abs(ev - value))]
        check.append((k2, name, value, num, abs(num - value)))
    write_csv(out / f"bands_n{cfg.n_lame}_check.csv", ["k2", "edge_name", "closed_form", "numeric", "abs_error"], check, cfg)
    return EXIT_OK


def cmd_simulate(cfg, out):
    pot = from_spec(cfg.potential)
    eps = cfg.eps_list[0]
    sol = solve_wave(eps, cfg.k2, None, pot, _solver_config(cfg))
    if cfg.seed == "solved":
        state, sol, R = seed_from_wave(sol, pot, cfg.q_periods)
    else:
        state, R = seed_from_cnoidal(sol, pot, cfg.q_periods)
    T = cfg.periods * R.period / R.c
    rep = propagate_and_compare(state, R, pot, T, cfg.dt, cfg.samples)
    rec = rep.record()
    rec.update(eps=R.eps, speed_ratio=rep.measured_speed / R.c, period=R.period, T=T)
    write_json(out / "simulation.json", rec, cfg)
    if cfg.stride > 0:
        rows, cur = [], state
        nsteps = int(round(T / cfg.dt))
        for k in range(0, nsteps + 1, cfg.stride):
            if k:
                cur = propagate(cur, pot, cfg.dt, cfg.stride)
            rows.extend((cur.t, j, cur.r[j], cur.p[j]) for j in range(state.n_sites))
        write_csv(out / "trajectory.csv", ["t", "j", "r", "p"], rows, cfg)
    return EXIT_REGIME if rep.unstable else EXIT_OK


def cmd_limits(cfg, out):
    res = {}
    for k2 in (0.9999, 1e-4):
        L = cfg.L if cfg.L is not None else speed_one_half_period(k2)
        w = make_cnoidal(k2, L)
        xi = np.linspace(-L / 2, L / 2, 2001)
        if k2 > 0.5:
            ref = soliton_limit(w)(xi)
            got = eval_profile(w, xi) - w.E1
            res["soliton_rel_sup"] = float(np.max(np.abs(got - ref)) / np.max(np.abs(ref)))
        else:
            xi = np.linspace(0, 2 * L, 2001)
            err = np.max(np.abs(eval_profile(w, xi) - linear_limit(w)(xi)))
            res["linear_sup_over_E3_minus_E2"] = float(err / (w.E3 - w.E2))
    write_json(out / "limits.json", res, cfg)
    return EXIT_OK


HANDLERS = {
    "wave": cmd_wave, "sweep": cmd_sweep, "spectrum": cmd_spectrum,
    "bands": cmd_bands, "simulate": cmd_simulate, "limits": cmd_limits,
}


def main(argv=None):
    ap = argparse.ArgumentParser(prog="cnoidal", description=__doc__.splitlines()[0])
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--config", required=True, help="JSON run configuration")
    ap.add_argument("--out", default=None, help="output directory (overrides output_dir)")
    args = ap.parse_args(argv)
    try:
        cfg = load_config(args.config, args.command)
        if args.out is not None:
            cfg = replace(cfg, output_dir=args.out)
        from_spec(cfg.potential)  # reject bad potentials before any work
    except ConfigError as exc:
        print(f"cnoidal: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (OSError, ValueError) as exc:
        print(f"cnoidal: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out = Path(cfg.output_dir)
    try:
        return HANDLERS[cfg.command](cfg, out)
    except OutOfRegimeError as exc:
        print(f"cnoidal: wave_solver: out of regime: {exc}", file=sys.stderr)
        return EXIT_REGIME
    except ConvergenceError as exc:
        print(f"cnoidal: wave_solver: {exc}", file=sys.stderr)
        return EXIT_REGIME


if __name__ == "__main__":
    raise SystemExit(main())
