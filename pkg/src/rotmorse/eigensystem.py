"""Bound states of the rotating-Morse channel.

Eigenfunctions are ``N exp(-y/2) y^s L_n^{2s}(y)`` with ``s = lambda_bar - n - 1/2``.
Everything involving Gamma functions or large powers is assembled in log
space; ``2 lambda_bar`` is ~233 for I2 and Gamma(233) overflows a double.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np
from scipy.linalg import LinAlgError, eigh_tridiagonal
from scipy.special import gammaln

from .molecule import MoleculeParams, RotationalChannel, effective_potential

_RESCALE = 1e150


@dataclass(frozen=True)
class RadialGrid:
    """Uniform grid of ``count`` points on [r_min, r_max] (both ends included)."""

    r_min: float
    r_max: float
    count: int

    def __post_init__(self):
        if not (0 < self.r_min < self.r_max):
            raise ValueError(f"need 0 < r_min < r_max, got [{self.r_min}, {self.r_max}]")
        if int(self.count) != self.count or self.count < 2:
            raise ValueError(f"count must be an integer >= 2, got {self.count!r}")

    @property
    def spacing(self) -> float:
        return (self.r_max - self.r_min) / (self.count - 1)

    @property
    def points(self) -> np.ndarray:
        return np.linspace(self.r_min, self.r_max, self.count)

    @property
    def weights(self) -> np.ndarray:
        """Trapezoidal quadrature weights."""
        w = np.full(self.count, self.spacing)
        w[0] = w[-1] = 0.5 * self.spacing
        return w

    def integrate(self, f) -> float | complex:
        """Trapezoidal quadrature of samples ``f`` over the grid (last axis)."""
        return np.trapezoid(f, dx=self.spacing, axis=-1)

    def inner(self, a, b) -> np.ndarray:
        """Matrix of quadrature inner products between the rows of ``a`` and ``b`` (no conjugation)."""
        return (a * self.weights) @ np.asarray(b).T


DEFAULT_GRID = RadialGrid(4.2, 7.0, 2048)


@dataclass(frozen=True)
class EigenLevel:
    n: int
    j: int
    s: float
    energy: float
    log_norm: float


def _check_n(channel: RotationalChannel, n) -> int:
    if isinstance(n, bool) or int(n) != n or not 0 <= n <= channel.n_max:
        raise ValueError(f"n={n!r} outside bound range 0..{channel.n_max} for j={channel.j}")
    return int(n)


def energy(channel: RotationalChannel, n):
    """E_{n,j}; accepts scalars or arrays of (possibly non-integer) n."""
    lam = channel.lambda_j
    v = np.asarray(n, dtype=float) + 0.5
    e = (
        2.0 * channel.c1 / lam * v
        - channel.c2 / lam**2 * v * v
        + channel.c0
        - channel.c1**2 / channel.c2
    )
    return e if e.ndim else float(e)


def level(channel: RotationalChannel, n: int) -> EigenLevel:
    n = _check_n(channel, n)
    lb = channel.lambda_bar_j
    s = lb - n - 0.5
    log_norm = 0.5 * (
        math.log(channel.params.beta)
        + math.log(2.0 * lb - 2.0 * n - 1.0)
        + gammaln(n + 1.0)
        - gammaln(2.0 * lb - n)
    )
    return EigenLevel(n=n, j=channel.j, s=s, energy=energy(channel, n), log_norm=float(log_norm))


def levels(channel: RotationalChannel, n_top: int | None = None) -> list[EigenLevel]:
    n_top = channel.n_max if n_top is None else n_top
    return [level(channel, n) for n in range(n_top + 1)]


def log_laguerre(n: int, a: float, y):
    """Sign and log-magnitude of L_n^a(y) via the degree recurrence.

    The pair (L_{k-1}, L_k) is rescaled whenever it grows past 1e150, so the
    result stays finite for arguments where L itself would overflow.
    """
    y = np.asarray(y, dtype=float)
    prev = np.ones_like(y)
    logscale = np.zeros_like(y)
    if n == 0:
        return prev, logscale
    cur = 1.0 + a - y
    for k in range(1, n):
        prev, cur = cur, ((2 * k + a + 1.0 - y) * cur - (k + a) * prev) / (k + 1)
        big = np.abs(cur) > _RESCALE
        if np.any(big):
            m = np.where(big, np.abs(cur), 1.0)
            cur = cur / m
            prev = prev / m
            logscale = logscale + np.log(m)
    with np.errstate(divide="ignore"):
        return np.sign(cur), np.log(np.abs(cur)) + logscale


def laguerre(n: int, a: float, y):
    """Generalized Laguerre polynomial L_n^a(y) by three-term recurrence."""
    if n < 0:
        raise ValueError("degree must be non-negative")
    sign, logmag = log_laguerre(n, a, y)
    out = sign * np.exp(logmag)
    return out if out.ndim else float(out)


def eigenfunction(channel: RotationalChannel, n: int, r) -> np.ndarray:
    """psi_{n,j}(r), normalized so that the integral of psi^2 dr is 1."""
    lv = level(channel, n)
    y = channel.y_of_r(r)
    sign, log_l = log_laguerre(lv.n, 2.0 * lv.s, y)
    with np.errstate(divide="ignore", invalid="ignore"):
        logamp = lv.log_norm + lv.s * np.log(y) - 0.5 * y + log_l
        out = sign * np.exp(logamp)
    # zeros of L give sign 0 and log -inf; both already yield 0
    return np.nan_to_num(out, nan=0.0, posinf=0.0, neginf=0.0)


def basis(channel: RotationalChannel, n_top: int, r) -> np.ndarray:
    """Rows psi_0 .. psi_{n_top} evaluated at ``r``."""
    r = np.asarray(r, dtype=float)
    out = np.empty((n_top + 1,) + r.shape)
    for n in range(n_top + 1):
        out[n] = eigenfunction(channel, n, r)
    return out


@lru_cache(maxsize=32)
def grid_basis(channel: RotationalChannel, n_top: int, grid: RadialGrid) -> np.ndarray:
    """Cached, read-only ``basis`` on a RadialGrid."""
    out = basis(channel, n_top, grid.points)
    out.flags.writeable = False
    return out


class GridWavefunction(NamedTuple):
    values: np.ndarray
    norm_defect: float


def wavefunction_on_grid(channel: RotationalChannel, n: int, grid: RadialGrid) -> GridWavefunction:
    """psi_{n,j} sampled on ``grid`` plus |quadrature norm - 1|.

    A large defect means the grid is too coarse or does not contain the
    level's classically allowed region with enough margin.
    """
    psi = eigenfunction(channel, n, grid.points)
    return GridWavefunction(psi, abs(float(grid.integrate(psi * psi)) - 1.0))


def gram_matrix(channel: RotationalChannel, n_top: int, grid: RadialGrid) -> np.ndarray:
    b = grid_basis(channel, n_top, grid)
    return grid.inner(b, b)


def widen_grid(grid: RadialGrid, envelope, rel_tol: float = 1e-10, step: float = 0.1,
               max_steps: int = 200) -> RadialGrid:
    """Extend ``grid`` at fixed spacing until ``envelope`` is negligible at both ends.

    ``envelope(r)`` must return non-negative magnitudes; the ends are pushed out
    in increments of ``step`` until each is below ``rel_tol`` times the peak.
    """
    h = grid.spacing
    lo, hi = grid.r_min, grid.r_max
    for _ in range(max_steps):
        g = RadialGrid(lo, hi, int(round((hi - lo) / h)) + 1)
        env = envelope(g.points)
        peak = env.max()
        left_ok = env[0] < rel_tol * peak or lo - step <= 0
        right_ok = env[-1] < rel_tol * peak
        if left_ok and right_ok:
            return g
        if not left_ok:
            lo -= step
        if not right_ok:
            hi += step
    raise RuntimeError(f"grid widening did not converge after {max_steps} steps")


def default_grid(channel: RotationalChannel, n_top: int = 25, start: RadialGrid = DEFAULT_GRID) -> RadialGrid:
    """Grid holding levels 0..n_top, widened until their edge amplitude is < 1e-10 of peak."""
    n_top = min(n_top, channel.n_max)

    def envelope(r):
        return np.abs(basis(channel, n_top, r)).max(axis=0)

    return widen_grid(start, envelope)


def fd_spectrum_oracle(params: MoleculeParams, j: int, grid: RadialGrid, k: int) -> np.ndarray:
    """Lowest k+1 eigenvalues of the finite-difference Hamiltonian.

    Three-point Laplacian on the grid interior with Dirichlet ends and the
    exact effective potential, not the expanded one.
    """
    if not 0 <= k <= 30:
        raise ValueError("k must lie in 0..30")
    if grid.count - 2 <= k:
        raise ValueError("grid has too few interior points")
    r = grid.points[1:-1]
    h = grid.spacing
    kin = 1.0 / (2.0 * params.mu * h * h)
    diag = effective_potential(params, j, r) + 2.0 * kin
    off = np.full(r.size - 1, -kin)
    try:
        return eigh_tridiagonal(diag, off, eigvals_only=True, select="i", select_range=(0, k))
    except LinAlgError as exc:
        raise RuntimeError(f"tridiagonal eigensolver did not converge: {exc}") from exc
