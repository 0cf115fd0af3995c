"""Self-consistency checks run by ``rotmorse validate``."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .config import RunConfig
from .eigensystem import energy, fd_spectrum_oracle, gram_matrix
from .molecule import RotationalChannel, approx_channel
from .wavepacket import autocorrelation, build_cs, evolve, packet_grid, revival_time
from .wigner import marginal_momentum, marginal_position, momentum_density, wigner_transform

# below this many samples per shortest de Broglie wavelength a grid is "coarse"
MIN_POINTS_PER_WAVELENGTH = 8.0


@dataclass
class Check:
    name: str
    status: str  # "pass" | "fail" | "degraded"
    value: float
    tolerance: float
    detail: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {"name": self.name, "status": self.status, "value": self.value,
                "tolerance": self.tolerance, **self.detail}


def analytic_energies(channel: RotationalChannel, n_top: int, formula: str = "corrected") -> np.ndarray:
    """Level energies; ``"as_printed"`` uses lambda instead of lambda^2 in the quadratic term."""
    n = np.arange(n_top + 1)
    if formula == "corrected":
        return energy(channel, n)
    if formula == "as_printed":
        v = n + 0.5
        lam = channel.lambda_j
        return 2 * channel.c1 / lam * v - channel.c2 / lam * v * v + channel.c0 - channel.c1**2 / channel.c2
    raise ValueError(f"unknown energy formula {formula!r}")


def points_per_wavelength(channel: RotationalChannel, n: int, spacing: float) -> float:
    """Samples per local wavelength at the well bottom for level n."""
    kinetic = energy(channel, n) - (channel.c0 - channel.c1**2 / channel.c2)
    p_max = math.sqrt(2.0 * channel.params.mu * kinetic)
    return (2.0 * math.pi / p_max) / spacing


def check_fd(cfg: RunConfig) -> list[Check]:
    v = cfg.validate
    out = []
    for j in v.j:
        ch = approx_channel(cfg.molecule, j)
        k = min(v.n_check, ch.n_max)
        fd = fd_spectrum_oracle(cfg.molecule, j, v.fd_grid, k)
        diff = float(np.abs(fd - analytic_energies(ch, k, v.energy_formula)).max())
        tol = 1e-5 if j == 0 else 2e-5
        out.append(Check(f"fd_spectrum_j{j}", "pass" if diff < tol else "fail", diff, tol,
                         {"levels": k + 1, "energy_formula": v.energy_formula}))
    return out


def check_orthonormality(cfg: RunConfig, tol: float = 1e-6) -> list[Check]:
    v = cfg.validate
    grid = cfg.radial_grid
    out = []
    for j in v.j:
        ch = approx_channel(cfg.molecule, j)
        k = min(v.n_check, ch.n_max)
        dev = float(np.abs(gram_matrix(ch, k, grid) - np.eye(k + 1)).max())
        ppw = points_per_wavelength(ch, k, grid.spacing)
        if ppw < MIN_POINTS_PER_WAVELENGTH:
            status = "degraded"
        else:
            status = "pass" if dev < tol else "fail"
        out.append(Check(f"orthonormality_j{j}", status, dev, tol,
                         {"grid_count": grid.count, "points_per_wavelength": ppw}))
    return out


def check_dynamics(cfg: RunConfig) -> list[Check]:
    out = []
    for j in cfg.validate.j:
        ch = approx_channel(cfg.molecule, j)
        cs = build_cs(ch, cfg.alpha, cfg.n_prime)
        t_rev = revival_time(ch)
        grid = packet_grid(cs, cfg.radial_grid) if cfg.auto_widen else cfg.radial_grid
        norms = [1.0 - evolve(cs, t, grid).norm_defect for t in np.linspace(0.0, t_rev, 50)]
        drift = float(np.ptp(norms))
        out.append(Check(f"norm_conservation_j{j}", "pass" if drift < 1e-6 else "fail", drift, 1e-6))
        # E_n T_rev must be quadratic-free: second differences are multiples of 2 pi
        ph = cs.energies * t_rev
        second = np.diff(ph, 2)
        resid = float(np.abs(np.angle(np.exp(1j * second))).max()) if second.size else 0.0
        out.append(Check(f"revival_phase_cancellation_j{j}", "pass" if resid < 1e-6 else "fail", resid, 1e-6))
        a = np.abs(autocorrelation(cs, np.linspace(0.0, t_rev, 400)))
        excess = float(max(a.max() - 1.0, 0.0))
        out.append(Check(f"autocorrelation_bound_j{j}", "pass" if excess < 1e-12 else "fail", excess, 1e-12))
    return out


def check_wigner(cfg: RunConfig, tol: float = 1e-3) -> list[Check]:
    ch = approx_channel(cfg.molecule, cfg.validate.j[0])
    cs = build_cs(ch, cfg.alpha, cfg.n_prime)
    grid = packet_grid(cs, cfg.radial_grid) if cfg.auto_widen else cfg.radial_grid
    state = evolve(cs, 0.25 * revival_time(ch), grid)
    w = wigner_transform(state, cfg.phase_grid)
    rho_ref = np.abs(cs.amplitude(w.r, state.t)) ** 2
    pos = float(np.abs(marginal_position(w) - rho_ref).max())
    mom = float(np.abs(marginal_momentum(w) - momentum_density(state, w.p)).max())
    return [
        Check("wigner_normalization", "pass" if w.norm_defect < tol else "fail", w.norm_defect, tol),
        Check("wigner_position_marginal", "pass" if pos < tol else "fail", pos, tol),
        Check("wigner_momentum_marginal", "pass" if mom < tol else "fail", mom, tol),
    ]


def run_checks(cfg: RunConfig) -> list[Check]:
    return check_fd(cfg) + check_orthonormality(cfg) + check_dynamics(cfg) + check_wigner(cfg)
