"""SU(2) coherent states of a rotating-Morse channel and their time evolution."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

import numpy as np
from scipy.signal import find_peaks
from scipy.special import gammaln

from .eigensystem import RadialGrid, basis, energy, grid_basis, widen_grid, DEFAULT_GRID
from .molecule import AU_TIME_PS, RotationalChannel

DEFAULT_ALPHA = 2.15


@dataclass(frozen=True, eq=False)
class CoherentState:
    """Weights d_n over the ladder n = 0..n_prime of one channel (unit norm)."""

    channel: RotationalChannel
    alpha: float
    n_prime: int
    coeffs: np.ndarray

    @property
    def weights(self) -> np.ndarray:
        return np.abs(self.coeffs) ** 2

    @property
    def center(self) -> int:
        """Index of the dominant level."""
        return int(np.argmax(self.weights))

    @property
    def energies(self) -> np.ndarray:
        return energy(self.channel, np.arange(self.n_prime + 1))

    def phased_coeffs(self, t: float) -> np.ndarray:
        return self.coeffs * np.exp(-1j * self.energies * t)

    def amplitude(self, r, t: float) -> np.ndarray:
        """Phi(r, t) at arbitrary separations (no grid caching)."""
        return np.tensordot(self.phased_coeffs(t), basis(self.channel, self.n_prime, r), axes=1)

    def envelope(self, r) -> np.ndarray:
        """sum_n |d_n psi_n(r)|, a time-independent bound on |Phi(r, t)|."""
        return np.tensordot(np.abs(self.coeffs), np.abs(basis(self.channel, self.n_prime, r)), axes=1)


def log_weights(channel: RotationalChannel, alpha: float, n_prime: int):
    """Sign and log|d_n| of the unnormalized displacement-operator weights."""
    n = np.arange(n_prime + 1)
    k = n_prime - n
    two_lb = 2.0 * channel.lambda_bar_j
    logd = (
        k * math.log(abs(alpha))
        - gammaln(k + 1.0)
        + 0.5 * (gammaln(n_prime + 1.0) + gammaln(two_lb - n) - gammaln(n + 1.0) - gammaln(two_lb - n_prime))
    )
    sign = np.where(k % 2 == 0, 1.0, -1.0) if alpha > 0 else np.ones(n.size)
    return sign, logd


def build_cs(channel: RotationalChannel, alpha: float = DEFAULT_ALPHA, n_prime: int | None = None) -> CoherentState:
    """Coherent state with ladder top ``n_prime`` (default: the last bound level)."""
    if n_prime is None:
        n_prime = channel.n_max
    if isinstance(n_prime, bool) or int(n_prime) != n_prime or not 0 <= n_prime <= channel.n_max:
        raise ValueError(f"n_prime={n_prime!r} must lie in 0..n_max={channel.n_max}")
    if alpha == 0 or not math.isfinite(alpha):
        raise ValueError("alpha must be finite and non-zero")
    n_prime = int(n_prime)
    sign, logd = log_weights(channel, alpha, n_prime)
    d = sign * np.exp(logd - logd.max())
    d /= np.linalg.norm(d)
    return CoherentState(channel, float(alpha), n_prime, d.astype(complex))


@dataclass(frozen=True, eq=False)
class EvolvedState:
    base: CoherentState
    t: float
    grid: RadialGrid
    amplitudes: np.ndarray
    norm_defect: float

    @property
    def r(self) -> np.ndarray:
        return self.grid.points


def evolve(cs: CoherentState, t: float, grid: RadialGrid) -> EvolvedState:
    """Phi(r, t) = sum_n d_n psi_n(r) exp(-i E_n t) on ``grid``."""
    b = grid_basis(cs.channel, cs.n_prime, grid)
    amp = cs.phased_coeffs(t) @ b
    norm = float(grid.integrate(np.abs(amp) ** 2))
    return EvolvedState(cs, float(t), grid, amp, abs(norm - 1.0))


def density(state: EvolvedState) -> np.ndarray:
    return np.abs(state.amplitudes) ** 2


def packet_grid(cs: CoherentState, start: RadialGrid = DEFAULT_GRID, rel_tol: float = 1e-10) -> RadialGrid:
    """``start`` widened until the packet envelope is negligible at both ends."""
    return widen_grid(start, cs.envelope, rel_tol=rel_tol)


class Periods(NamedTuple):
    t_cl_ground: float
    t_cl_center: float
    t_rev: float

    def in_ps(self) -> "Periods":
        return Periods(*(v * AU_TIME_PS for v in self))


def classical_period(channel: RotationalChannel, n: float) -> float:
    """2 pi / |dE/dn| at level ``n``."""
    lam = channel.lambda_j
    return math.pi * lam**2 / abs(channel.c1 * lam - channel.c2 * (n + 0.5))


def revival_time(channel: RotationalChannel) -> float:
    return 2.0 * math.pi * channel.lambda_j**2 / channel.c2


def periods(cs: CoherentState) -> Periods:
    ch = cs.channel
    return Periods(classical_period(ch, 0), classical_period(ch, cs.center), revival_time(ch))


class RevivalEntry(NamedTuple):
    r: int
    s: int
    t: float
    fragments: int


def fragment_count(s: int) -> int:
    return s // 2 if s % 2 == 0 else s


def revival_catalog(cs: CoherentState, s_max: int) -> list[RevivalEntry]:
    """Fractional revivals t = (r/s) T_rev for reduced r/s in (0, 1), s <= s_max."""
    if s_max < 2:
        raise ValueError("s_max must be at least 2")
    t_rev = revival_time(cs.channel)
    out = []
    for s in range(2, s_max + 1):
        for r in range(1, s):
            if math.gcd(r, s) == 1:
                out.append(RevivalEntry(r, s, float(Fraction(r, s)) * t_rev, fragment_count(s)))
    return out


def autocorrelation(cs: CoherentState, times) -> np.ndarray:
    """A(t) = <Phi(0)|Phi(t)> = sum_n |d_n|^2 exp(-i E_n t), computed from the spectrum."""
    times = np.asarray(times, dtype=float)
    phases = np.exp(-1j * np.multiply.outer(times, cs.energies))
    return phases @ cs.weights


def density_peaks(r, rho, rel_height: float = 0.05) -> np.ndarray:
    """Positions of local maxima above ``rel_height`` of the global maximum.

    The density is smoothed with a 3-point moving average first.
    """
    rho = np.asarray(rho, dtype=float)
    smooth = np.convolve(rho, np.ones(3) / 3.0, mode="same")
    smooth[0], smooth[-1] = rho[0], rho[-1]
    idx, _ = find_peaks(smooth, height=rel_height * smooth.max())
    return np.asarray(r)[idx]


def mean_spacing(positions) -> float:
    positions = np.sort(np.asarray(positions, dtype=float))
    if positions.size < 2:
        return float("nan")
    return float(np.mean(np.diff(positions)))
