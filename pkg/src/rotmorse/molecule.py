"""Molecular parameters and the j-dependent rotating-Morse channel.

Atomic units throughout (hbar = 1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
from scipy.optimize import brentq

# 1 a.u. of time in picoseconds
AU_TIME_PS = 2.418884326e-17 / 1e-12


class RootNotFoundError(ValueError):
    """No sign change of dV_eff/dr was found in the search window."""


@dataclass(frozen=True)
class MoleculeParams:
    """Morse parameters of a diatomic molecule.

    Attributes:
        beta: range parameter (1/bohr).
        mu: reduced mass (electron masses).
        r0: equilibrium separation (bohr).
        d: dissociation energy (hartree).
    """

    beta: float
    mu: float
    r0: float
    d: float

    def __post_init__(self):
        for name in ("beta", "mu", "r0", "d"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be a positive finite number, got {value!r}")
        if self.lambda0 <= 1.0:
            raise ValueError(f"lambda0 = {self.lambda0:.4g} <= 1: potential too shallow")

    @property
    def lambda0(self) -> float:
        return math.sqrt(2.0 * self.mu * self.d) / self.beta

    @property
    def omega(self) -> float:
        """Harmonic frequency at the bottom of the pure Morse well."""
        return self.beta * math.sqrt(2.0 * self.d / self.mu)

    def centrifugal_strength(self, j: int) -> float:
        """j(j+1)/(2 mu), the numerator of the centrifugal term."""
        return j * (j + 1) / (2.0 * self.mu)


I2 = MoleculeParams(beta=0.9849, mu=11.56e4, r0=5.03, d=0.057)


@dataclass(frozen=True)
class RotationalChannel:
    """All j-dependent constants of the quadratic-in-y model.

    ``y = 2 lambda_j u exp(-beta (r - rj))``; the model potential is
    ``c2/(4 lambda_j^2) y^2 - c1/lambda_j y + c0``.
    """

    params: MoleculeParams
    j: int
    rj: float
    dj: float
    a: float
    aj: float
    bj: float
    u: float
    c0: float
    c1: float
    c2: float
    lambda_j: float
    lambda_bar_j: float
    n_max: int

    @property
    def bound_count(self) -> int:
        return self.n_max + 1

    def y_of_r(self, r):
        r = np.asarray(r, dtype=float)
        return 2.0 * self.lambda_j * self.u * np.exp(-self.params.beta * (r - self.rj))

    def expanded_potential(self, r):
        """Second-order model potential evaluated at separation ``r``."""
        y = self.y_of_r(r)
        lam = self.lambda_j
        return self.c2 / (4.0 * lam * lam) * y * y - self.c1 / lam * y + self.c0


def _check_j(j) -> int:
    if isinstance(j, bool) or int(j) != j or j < 0:
        raise ValueError(f"j must be a non-negative integer, got {j!r}")
    return int(j)


def effective_potential(params: MoleculeParams, j: int, r):
    """Morse potential plus the centrifugal term j(j+1)/(2 mu r^2)."""
    j = _check_j(j)
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise ValueError("effective potential is defined for r > 0 only")
    x = np.exp(-params.beta * (r - params.r0))
    v = params.d * (x * x - 2.0 * x) + params.centrifugal_strength(j) / (r * r)
    return v if v.ndim else float(v)


def effective_force(params: MoleculeParams, j: int, r):
    """dV_eff/dr."""
    r = np.asarray(r, dtype=float)
    x = np.exp(-params.beta * (r - params.r0))
    dv = 2.0 * params.beta * params.d * (x - x * x) - 2.0 * params.centrifugal_strength(j) / r**3
    return dv if dv.ndim else float(dv)


def shifted_equilibrium(params: MoleculeParams, j: int) -> tuple[float, float]:
    """Closed-form (r_j, D_j) of the rotating well."""
    j = _check_j(j)
    a = params.centrifugal_strength(j) / params.r0**2
    shift = a / (params.beta**2 * params.r0**2 * params.d)
    return params.r0 * (1.0 + shift), params.d - a * (1.0 - shift)


def approx_channel(params: MoleculeParams, j: int) -> RotationalChannel:
    """Build the channel from the closed-form shifted equilibrium.

    The centrifugal term is expanded to second order about ``rj`` in powers
    of ``exp(-beta (r - rj))``.
    """
    j = _check_j(j)
    beta, r0, d = params.beta, params.r0, params.d
    a = params.centrifugal_strength(j) / r0**2
    rj, dj = shifted_equilibrium(params, j)
    aj = params.centrifugal_strength(j) / rj**2
    bj = 1.0 / (beta * rj)
    u = math.exp(-beta * (rj - r0))

    c0 = aj * (3.0 * bj * bj - 3.0 * bj + 1.0)
    c1 = (aj * (3.0 * bj * bj - 2.0 * bj) + u * d) / u
    c2 = (aj * (3.0 * bj * bj - bj) + u * u * d) / (u * u)
    if c2 <= 0:
        raise ValueError(f"j={j}: quadratic coefficient c2={c2:.4g} is not positive")
    lambda_j = math.sqrt(2.0 * params.mu * c2) / beta
    lambda_bar = c1 / c2 * lambda_j
    if lambda_bar <= 0.5:
        raise ValueError(f"j={j}: lambda_bar={lambda_bar:.4g} <= 1/2, no bound state")
    # largest integer strictly below lambda_bar - 1/2, so that s > 0 for every bound level
    n_max = math.ceil(lambda_bar - 0.5) - 1

    return RotationalChannel(
        params=params,
        j=j,
        rj=rj,
        dj=dj,
        a=a,
        aj=aj,
        bj=bj,
        u=u,
        c0=c0,
        c1=c1,
        c2=c2,
        lambda_j=lambda_j,
        lambda_bar_j=lambda_bar,
        n_max=n_max,
    )


def _bracket_minimum(params: MoleculeParams, j: int, samples: int = 64):
    r0 = params.r0
    width = 0.5 * r0
    while True:
        right = min(r0 + width, 3.0 * r0)
        r = np.linspace(r0, right, samples)
        f = effective_force(params, j, r)
        # first - -> + crossing is the well minimum; a later + -> - one is the barrier top
        up = np.nonzero((f[:-1] < 0) & (f[1:] >= 0))[0]
        if up.size:
            k = up[0]
            return r[k], r[k + 1]
        if right >= 3.0 * r0:
            raise RootNotFoundError(
                f"j={j}: dV_eff/dr has no sign change in [{r0:g}, {3 * r0:g}]"
            )
        width *= 2.0


def solve_rj(params: MoleculeParams, j: int, tol: float = 1e-12) -> float:
    """Equilibrium of the exact effective potential (root of dV_eff/dr)."""
    j = _check_j(j)
    if j == 0:
        return params.r0
    lo, hi = _bracket_minimum(params, j)
    if effective_force(params, j, hi) == 0.0:
        return float(hi)
    return brentq(lambda r: effective_force(params, j, r), lo, hi, xtol=tol, rtol=4 * np.finfo(float).eps)


class ChannelRow(NamedTuple):
    j: int
    rj_approx: float
    rj_solved: float
    dj: float
    error: str | None = None

    @property
    def failed(self) -> bool:
        return self.error is not None


def channel_sweep(params: MoleculeParams, j_list: Sequence[int]) -> list[ChannelRow]:
    """Closed-form vs transcendental equilibrium and D_j, one row per j."""
    rows = []
    for j in j_list:
        rj_approx, dj = shifted_equilibrium(params, j)
        try:
            rj = solve_rj(params, j)
            err = None
        except RootNotFoundError as exc:
            rj, err = float("nan"), str(exc)
        rows.append(ChannelRow(int(j), rj_approx, rj, dj, err))
    return rows
