"""Phase-space rotation angle imprinted by rotational coupling.

A j = 0 coherent state is rotated by ``U = exp(i J0 phi)``, which multiplies
level n by ``exp(i m_n phi)`` with ``m_n = n - lambda_bar + 1/2``, and the
angle maximizing ``|<chi|Phi_j>|^2`` is taken as the rotation of channel j.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple, Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from .eigensystem import RadialGrid, grid_basis
from .molecule import MoleculeParams, approx_channel
from .wavepacket import DEFAULT_ALPHA, CoherentState, build_cs, packet_grid, revival_time

TWO_PI = 2.0 * math.pi
DEGENERATE_OVERLAP = 0.5
DEFAULT_COARSE_STEPS = 720


def generator(cs0: CoherentState, convention: str = "lambda_bar") -> np.ndarray:
    """Eigenvalues m_n of J0 on the reference ladder.

    ``"lambda_bar"`` gives ``n - lambda_bar_0 + 1/2``; ``"index"`` gives ``n``.
    The two differ by a constant, i.e. only by a global phase of chi.
    """
    n = np.arange(cs0.n_prime + 1, dtype=float)
    if convention == "lambda_bar":
        return n - cs0.channel.lambda_bar_j + 0.5
    if convention == "index":
        return n
    raise ValueError(f"unknown generator convention {convention!r}")


def rotated_reference(cs0: CoherentState, phi: float, t: float, grid: RadialGrid,
                      convention: str = "lambda_bar") -> np.ndarray:
    """chi(r, t) = sum_n d_n^0 exp(i m_n phi) psi_{n,0}(r) exp(-i E_{n,0} t)."""
    if cs0.channel.j != 0:
        raise ValueError("reference coherent state must be built on the j = 0 channel")
    c = cs0.phased_coeffs(t) * np.exp(1j * generator(cs0, convention) * phi)
    return c @ grid_basis(cs0.channel, cs0.n_prime, grid)


@lru_cache(maxsize=16)
def _cross_gram(ch0, n0, chj, nj, grid: RadialGrid) -> np.ndarray:
    b0 = grid_basis(ch0, n0, grid)
    bj = grid_basis(chj, nj, grid)
    g = grid.inner(b0, bj)
    g.flags.writeable = False
    return g


def cross_gram(cs0: CoherentState, cs_j: CoherentState, grid: RadialGrid) -> np.ndarray:
    """<psi_{n,0}|psi_{m,j}> by quadrature on ``grid``."""
    return _cross_gram(cs0.channel, cs0.n_prime, cs_j.channel, cs_j.n_prime, grid)


class OverlapFunction:
    """phi -> |<chi(phi, t)|Phi_j(t)>|^2 through the precomputed cross-Gram matrix."""

    def __init__(self, cs_j: CoherentState, cs0: CoherentState, t: float, grid: RadialGrid,
                 convention: str = "lambda_bar"):
        self.m = generator(cs0, convention)
        self.weights = np.conj(cs0.phased_coeffs(t)) * (cross_gram(cs0, cs_j, grid) @ cs_j.phased_coeffs(t))

    def __call__(self, phi):
        phi = np.asarray(phi, dtype=float)
        amp = np.exp(-1j * np.multiply.outer(phi, self.m)) @ self.weights
        out = np.abs(amp) ** 2
        return out if out.ndim else float(out)


def direct_overlap(cs_j: CoherentState, cs0: CoherentState, phi: float, t: float, grid: RadialGrid,
                   convention: str = "lambda_bar") -> float:
    """Same overlap as OverlapFunction, from the grid inner product of chi and Phi_j."""
    chi = rotated_reference(cs0, phi, t, grid, convention)
    phi_j = cs_j.phased_coeffs(t) @ grid_basis(cs_j.channel, cs_j.n_prime, grid)
    return float(abs(grid.integrate(np.conj(chi) * phi_j)) ** 2)


@dataclass(frozen=True, eq=False)
class RotationScan:
    j: int
    t: float
    phi_grid: np.ndarray
    overlaps: np.ndarray
    phi_star: float
    overlap_star: float

    @property
    def degenerate(self) -> bool:
        """True when no single rotation makes the states similar."""
        return self.overlap_star < DEGENERATE_OVERLAP


def estimate_angle(cs_j: CoherentState, cs0: CoherentState, t: float, grid: RadialGrid,
                   coarse_steps: int = DEFAULT_COARSE_STEPS, convention: str = "lambda_bar",
                   xatol: float = 1e-10) -> RotationScan:
    """Coarse scan of phi over [0, 2 pi) followed by bounded Brent refinement."""
    if cs0.channel.j != 0:
        raise ValueError("reference coherent state must be built on the j = 0 channel")
    if cs_j.alpha != cs0.alpha:
        raise ValueError("coherent states must share alpha")
    if coarse_steps < 3:
        raise ValueError("coarse_steps must be at least 3")
    f = OverlapFunction(cs_j, cs0, t, grid, convention)
    phis = np.linspace(0.0, TWO_PI, coarse_steps, endpoint=False)
    ov = f(phis)
    k = int(np.argmax(ov))
    step = TWO_PI / coarse_steps
    res = minimize_scalar(lambda x: -f(x), bounds=(phis[k] - step, phis[k] + step),
                          method="bounded", options={"xatol": xatol})
    if -res.fun >= ov[k]:
        phi_star, best = float(res.x), float(-res.fun)
    else:
        phi_star, best = float(phis[k]), float(ov[k])
    phi_star %= TWO_PI
    if TWO_PI - phi_star < 1e-9:
        # refinement around phi = 0 may land just below 2 pi
        phi_star = 0.0
    return RotationScan(cs_j.channel.j, float(t), phis, ov, phi_star, best)


class SweepRow(NamedTuple):
    j: int
    phi_star: float
    phi_unwrapped: float
    overlap_star: float
    degenerate: bool


def angle_sweep(params: MoleculeParams, j_list: Sequence[int], t: float | None = None,
                alpha: float = DEFAULT_ALPHA, n_prime: int | None = None, grid: RadialGrid | None = None,
                coarse_steps: int = DEFAULT_COARSE_STEPS, convention: str = "lambda_bar") -> list[SweepRow]:
    """Rotation angle for each j against the j = 0 reference.

    ``t`` defaults to T_rev/4. ``n_prime=None`` uses each channel's last bound
    level; an explicit value is used for every channel.
    """
    j_list = list(j_list)
    if j_list != sorted(j_list):
        raise ValueError("j_list must be sorted ascending")
    ch0 = approx_channel(params, 0)
    cs0 = build_cs(ch0, alpha, n_prime)
    if t is None:
        t = 0.25 * revival_time(ch0)
    if grid is None:
        grid = packet_grid(cs0)
    scans = []
    for j in j_list:
        cs_j = build_cs(approx_channel(params, j), alpha, n_prime)
        scans.append(estimate_angle(cs_j, cs0, t, grid, coarse_steps, convention))
    unwrapped = np.unwrap([s.phi_star for s in scans]) if scans else []
    return [
        SweepRow(s.j, s.phi_star, float(u), s.overlap_star, s.degenerate)
        for s, u in zip(scans, unwrapped)
    ]
