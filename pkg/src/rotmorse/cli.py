"""Command-line front end.

Usage: ``rotmorse {channel,evolve,wigner,rotate,validate} [--config FILE] [--out DIR] [--format csv|bin]``

Exit codes: 0 success, 2 bad config, 3 equilibrium solver failure,
4 phase-space coverage error, 5 failed validation check.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import serialize
from .config import ConfigError, RunConfig, load_config
from .eigensystem import RadialGrid
from .molecule import AU_TIME_PS, approx_channel, channel_sweep
from .rotation import angle_sweep
from .validate import run_checks
from .wavepacket import (
    CoherentState, build_cs, density, density_peaks, evolve, mean_spacing, packet_grid, periods,
    revival_time,
)
from .wigner import CoverageError, count_lobes, interference_metrics, wigner_transform

log = logging.getLogger("rotmorse")

EXIT_CONFIG = 2
EXIT_SOLVER = 3
EXIT_COVERAGE = 4
EXIT_VALIDATION = 5


class CommandError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _coherent_state(cfg: RunConfig, j: int) -> CoherentState:
    try:
        return build_cs(approx_channel(cfg.molecule, j), cfg.alpha, cfg.n_prime)
    except ValueError as exc:
        raise CommandError(f"j={j}: {exc}", EXIT_CONFIG) from exc


def _grid_for(cfg: RunConfig, cs: CoherentState) -> RadialGrid:
    return packet_grid(cs, cfg.radial_grid) if cfg.auto_widen else cfg.radial_grid


def _period_meta(cs: CoherentState) -> dict:
    au, ps = periods(cs), periods(cs).in_ps()
    return {
        "t_cl_ground_au": au.t_cl_ground, "t_cl_center_au": au.t_cl_center, "t_rev_au": au.t_rev,
        "t_cl_ground_ps": ps.t_cl_ground, "t_cl_center_ps": ps.t_cl_center, "t_rev_ps": ps.t_rev,
    }


def cmd_channel(cfg: RunConfig, out: Path) -> int:
    header = ("j", "rj_approx", "rj_solved", "Dj", "c0", "c1", "c2", "lambda", "lambda_bar", "n_max")
    nan = float("nan")
    rows = []
    sweep = channel_sweep(cfg.molecule, cfg.j)
    failures = [r.error for r in sweep if r.failed]
    for sweep_row in sweep:
        try:
            ch = approx_channel(cfg.molecule, sweep_row.j)
            expansion = (ch.c0, ch.c1, ch.c2, ch.lambda_j, ch.lambda_bar_j, ch.n_max)
        except ValueError as exc:
            log.warning("%s", exc)
            expansion = (nan,) * 6
        rows.append((sweep_row.j, sweep_row.rj_approx, sweep_row.rj_solved, sweep_row.dj, *expansion))
    serialize.write_csv(out / "channel.csv", header, rows)
    if failures:
        raise CommandError("; ".join(failures), EXIT_SOLVER)
    return 0


def cmd_evolve(cfg: RunConfig, out: Path) -> int:
    for j in cfg.j:
        cs = _coherent_state(cfg, j)
        grid = _grid_for(cfg, cs)
        t_rev = revival_time(cs.channel)
        for ts in cfg.times:
            t = ts.resolve(t_rev)
            state = evolve(cs, t, grid)
            rho = density(state)
            peaks = density_peaks(state.r, rho)
            stem = f"density_j{j}_{ts.label}"
            serialize.write_csv(out / f"{stem}.csv", ("r", "density"), zip(state.r, rho))
            serialize.write_json(out / f"{stem}.json", {
                "j": j, "time": ts.to_json(), "t_au": t, "t_ps": t * AU_TIME_PS,
                "alpha": cs.alpha, "n_prime": cs.n_prime, "center": cs.center,
                "energies": cs.energies.tolist(), **_period_meta(cs),
                "peaks": peaks.tolist(), "mean_peak_spacing": mean_spacing(peaks),
                "norm_defect": state.norm_defect,
                "grid": {"r_min": grid.r_min, "r_max": grid.r_max, "count": grid.count},
            })
    return 0


def cmd_wigner(cfg: RunConfig, out: Path) -> int:
    for j in cfg.j:
        cs = _coherent_state(cfg, j)
        grid = _grid_for(cfg, cs)
        t_rev = revival_time(cs.channel)
        for ts in cfg.times:
            t = ts.resolve(t_rev)
            try:
                w = wigner_transform(evolve(cs, t, grid), cfg.phase_grid)
            except CoverageError as exc:
                raise CommandError(f"j={j}, t={ts.to_json()}: {exc}", EXIT_COVERAGE) from exc
            stem = f"wigner_j{j}_{ts.label}"
            if cfg.format == "bin":
                serialize.write_wigner_bin(out / f"{stem}.wgr", w)
            else:
                serialize.write_wigner_csv(out / f"{stem}.csv", w)
            m = interference_metrics(w)
            serialize.write_json(out / f"{stem}.json", {
                "j": j, "time": ts.to_json(), "t_au": t, "t_ps": t * AU_TIME_PS,
                "normalization": w.normalization(), "norm_defect": w.norm_defect,
                "min_w": m.min_w, "max_w": m.max_w, "negativity_volume": m.negativity_volume,
                "lobes": count_lobes(w, cfg.molecule), "imag_residue": w.imag_residue,
            })
    return 0


def cmd_rotate(cfg: RunConfig, out: Path) -> int:
    ch0 = approx_channel(cfg.molecule, 0)
    cs0 = build_cs(ch0, cfg.alpha, cfg.n_prime)
    t = cfg.rotation_time.resolve(revival_time(ch0))
    try:
        rows = angle_sweep(cfg.molecule, cfg.j, t, cfg.alpha, cfg.n_prime, _grid_for(cfg, cs0),
                           cfg.coarse_steps, cfg.convention)
    except ValueError as exc:
        raise CommandError(str(exc), EXIT_CONFIG) from exc
    header = ("j", "phi_rad", "phi_over_pi", "overlap", "phi_unwrapped_rad", "phi_unwrapped_over_pi", "degenerate")
    serialize.write_csv(out / "rotation.csv", header, (
        (r.j, r.phi_star, r.phi_star / np.pi, r.overlap_star, r.phi_unwrapped, r.phi_unwrapped / np.pi, r.degenerate)
        for r in rows
    ))
    for r in rows:
        if r.degenerate:
            log.warning("j=%d: maximum overlap %.3f below 0.5, angle is not meaningful", r.j, r.overlap_star)
    return 0


def cmd_validate(cfg: RunConfig, out: Path) -> int:
    checks = run_checks(cfg)
    failed = [c for c in checks if c.status == "fail"]
    serialize.write_json(out / "validation.json", {
        "passed": not failed, "checks": [c.as_dict() for c in checks],
    })
    for c in checks:
        print(f"{c.status.upper():9s} {c.name:36s} {c.value:.3e} (tol {c.tolerance:.1e})")
    if failed:
        raise CommandError("failed checks: " + ", ".join(c.name for c in failed), EXIT_VALIDATION)
    return 0


COMMANDS = {
    "channel": cmd_channel,
    "evolve": cmd_evolve,
    "wigner": cmd_wigner,
    "rotate": cmd_rotate,
    "validate": cmd_validate,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rotmorse", description="Rotating-Morse coherent-state dynamics.")
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", help="JSON run configuration (defaults: I2, j = 0, 60, 81)")
    parser.add_argument("--out", help="output directory (overrides config output_dir)")
    parser.add_argument("--format", choices=("csv", "bin"), help="phase-space grid format (overrides config)")
    parser.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args.config)
        if args.format:
            cfg = replace(cfg, format=args.format)
        out = Path(args.out or cfg.output_dir)
        out.mkdir(parents=True, exist_ok=True)
        return COMMANDS[args.command](cfg, out)
    except ConfigError as exc:
        print(f"rotmorse: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except CommandError as exc:
        print(f"rotmorse: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
