"""Wigner quasiprobability distribution of an evolved coherent state.

``W(r, p) = 1/pi * integral conj(Phi(r - x)) Phi(r + x) exp(-2ipx) dx`` (hbar = 1).

For each output ``r`` the correlation product is sampled at ``x = m * dx`` and
transformed over ``m`` with one FFT, so the momenta are the transform's
native frequencies ``p_min + k * dp`` with ``dx = pi / (n_p * dp)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import ndimage
from scipy.signal import find_peaks

from .molecule import MoleculeParams
from .wavepacket import CoherentState, EvolvedState

SUPPORT_CUTOFF = 1e-12


class CoverageError(ValueError):
    """The radial grid or correlation window cannot hold the packet."""


@dataclass(frozen=True)
class PhaseSpaceSpec:
    """Requested (r, p) lattice.

    The momentum axis is ``p_min + k (p_max - p_min) / n_p`` for
    ``k = 0 .. n_p - 1``; ``p_max`` itself is excluded.
    """

    r_min: float = 4.2
    r_max: float = 7.0
    n_r: int = 256
    p_min: float = -60.0
    p_max: float = 60.0
    n_p: int = 256

    def __post_init__(self):
        if int(self.n_r) != self.n_r or self.n_r < 2:
            raise ValueError(f"n_r must be an integer >= 2, got {self.n_r!r}")
        if int(self.n_p) != self.n_p or self.n_p < 2 or self.n_p % 2:
            raise ValueError(f"n_p must be an even integer >= 2, got {self.n_p!r}")
        if not 0 < self.r_min < self.r_max:
            raise ValueError("need 0 < r_min < r_max")
        if not self.p_min < self.p_max:
            raise ValueError("need p_min < p_max")

    @property
    def dp(self) -> float:
        return (self.p_max - self.p_min) / self.n_p

    @property
    def shift_step(self) -> float:
        """Sampling step of the correlation offset x."""
        return math.pi / (self.p_max - self.p_min)

    @property
    def half_window(self) -> float:
        return 0.5 * self.n_p * self.shift_step


@dataclass(eq=False)
class PhaseSpaceGrid:
    r_min: float
    r_max: float
    n_r: int
    p_min: float
    p_max: float
    n_p: int
    values: np.ndarray
    imag_residue: float = 0.0

    @property
    def r(self) -> np.ndarray:
        return np.linspace(self.r_min, self.r_max, self.n_r)

    @property
    def p(self) -> np.ndarray:
        return self.p_min + self.dp * np.arange(self.n_p)

    @property
    def dr(self) -> float:
        return (self.r_max - self.r_min) / (self.n_r - 1)

    @property
    def dp(self) -> float:
        return (self.p_max - self.p_min) / self.n_p

    def normalization(self) -> float:
        return float(np.trapezoid(self.values.sum(axis=1) * self.dp, dx=self.dr))

    @property
    def norm_defect(self) -> float:
        return abs(self.normalization() - 1.0)


def _support(state: EvolvedState) -> tuple[float, float]:
    amp = np.abs(state.amplitudes)
    inside = np.nonzero(amp >= SUPPORT_CUTOFF * amp.max())[0]
    lo, hi = inside[0], inside[-1]
    r = state.r
    if lo == 0 or hi == r.size - 1:
        raise CoverageError(
            f"packet is not negligible at the edge of the radial grid [{r[0]:g}, {r[-1]:g}]; "
            "widen the radial grid"
        )
    return r[lo - 1], r[hi + 1]


def wigner_transform(state: EvolvedState, spec: PhaseSpaceSpec = PhaseSpaceSpec()) -> PhaseSpaceGrid:
    """W on the lattice described by ``spec``.

    The packet support (where |Phi| exceeds 1e-12 of its peak on the state's
    radial grid) bounds the correlation window; the state is evaluated
    analytically at the shifted points, not interpolated.
    """
    a, b = _support(state)
    r = np.linspace(spec.r_min, spec.r_max, spec.n_r)
    step = spec.shift_step
    need = np.clip(np.minimum(r - a, b - r), 0.0, None).max()
    if need >= spec.half_window:
        n_p_req = 2 * math.ceil(need / step) + 2
        raise CoverageError(
            f"correlation half-window {spec.half_window:.4g} a.u. is shorter than the packet "
            f"requires ({need:.4g} a.u.); raise n_p to at least {n_p_req} "
            f"for the momentum range [{spec.p_min:g}, {spec.p_max:g})"
        )

    half = spec.n_p // 2
    m = np.arange(-half, half + 1)
    pts = r[:, None] + m[None, :] * step
    mask = (pts >= a) & (pts <= b)
    f = np.zeros(pts.shape, dtype=complex)
    if mask.any():
        f[mask] = state.base.amplitude(pts[mask], state.t)
    # f[:, half + m] = Phi(r + m dx); offsets run -half .. half-1 for the FFT
    corr = np.conj(f[:, ::-1][:, :-1]) * f[:, :-1]
    corr *= np.exp(-2j * spec.p_min * m[:-1] * step)[None, :]
    w = np.fft.fft(np.fft.ifftshift(corr, axes=1), axis=1) * (step / math.pi)

    peak = np.abs(w).max()
    residue = float(np.abs(w.imag).max())
    if residue > 1e-10 * peak:
        raise RuntimeError(f"Wigner transform has imaginary residue {residue:.3g} (peak {peak:.3g})")
    return PhaseSpaceGrid(
        spec.r_min, spec.r_max, spec.n_r, spec.p_min, spec.p_max, spec.n_p,
        np.ascontiguousarray(w.real), residue / peak if peak else 0.0,
    )


def wigner_point(cs: CoherentState, t: float, r: float, p: float, support: tuple[float, float],
                 samples: int = 4001) -> float:
    """Direct trapezoidal quadrature of W at one phase-space point."""
    a, b = support
    half = max(0.0, min(r - a, b - r))
    if half == 0.0:
        return 0.0
    x = np.linspace(-half, half, samples)
    integrand = np.conj(cs.amplitude(r - x, t)) * cs.amplitude(r + x, t) * np.exp(-2j * p * x)
    return float(np.trapezoid(integrand, x).real / math.pi)


def marginal_position(grid: PhaseSpaceGrid) -> np.ndarray:
    return grid.values.sum(axis=1) * grid.dp


def marginal_momentum(grid: PhaseSpaceGrid) -> np.ndarray:
    return np.trapezoid(grid.values, dx=grid.dr, axis=0)


def momentum_density(state: EvolvedState, p) -> np.ndarray:
    """|<p|Phi>|^2 by quadrature of Phi over the state's radial grid."""
    p = np.asarray(p, dtype=float)
    kernel = np.exp(-1j * np.multiply.outer(p, state.r))
    amp = state.grid.integrate(kernel * state.amplitudes[None, :]) / math.sqrt(2.0 * math.pi)
    return np.abs(amp) ** 2


class InterferenceMetrics(NamedTuple):
    negativity_volume: float
    min_w: float
    max_w: float
    fringe_spacing: float


def _slice(grid: PhaseSpaceGrid, axis: str, at: float):
    if axis == "r":
        if not grid.p[0] <= at <= grid.p[-1]:
            raise ValueError(f"p={at} lies outside the grid momentum range")
        k = int(np.argmin(np.abs(grid.p - at)))
        return grid.r, grid.values[:, k]
    if axis == "p":
        if not grid.r_min <= at <= grid.r_max:
            raise ValueError(f"r={at} lies outside the grid position range")
        i = int(np.argmin(np.abs(grid.r - at)))
        return grid.p, grid.values[i, :]
    raise ValueError("axis must be 'r' or 'p'")


def fringe_spacing(grid: PhaseSpaceGrid, axis: str = "r", at: float = 0.0, rel_height: float = 0.05) -> float:
    """Mean distance between consecutive maxima of W along one slice.

    ``axis='r'`` walks along position at the momentum nearest ``at``;
    ``axis='p'`` walks along momentum at the position nearest ``at``.
    """
    coord, cut = _slice(grid, axis, at)
    scale = np.abs(cut).max()
    if scale == 0:
        return float("nan")
    idx, _ = find_peaks(cut, height=rel_height * scale)
    if idx.size < 2:
        return float("nan")
    return float(np.mean(np.diff(coord[idx])))


def interference_metrics(grid: PhaseSpaceGrid, axis: str = "r", at: float = 0.0) -> InterferenceMetrics:
    neg = np.clip(-grid.values, 0.0, None)
    volume = float(np.trapezoid(neg.sum(axis=1) * grid.dp, dx=grid.dr))
    return InterferenceMetrics(
        volume, float(grid.values.min()), float(grid.values.max()), fringe_spacing(grid, axis, at)
    )


def coherent_widths(params: MoleculeParams) -> tuple[float, float]:
    """Position and momentum widths of the harmonic ground state at the well bottom."""
    sigma_r = 1.0 / math.sqrt(2.0 * params.mu * params.omega)
    return sigma_r, 0.5 / sigma_r


def count_lobes(grid: PhaseSpaceGrid, params: MoleculeParams, rel_threshold: float = 0.15) -> int:
    """Number of classical components in W.

    W is smoothed with a minimum-uncertainty Gaussian, which suppresses the
    oscillating interference terms; connected regions above ``rel_threshold``
    of the smoothed maximum are counted.
    """
    sr, sp = coherent_widths(params)
    smooth = ndimage.gaussian_filter(grid.values, (sr / grid.dr, sp / grid.dp), mode="constant")
    _, n = ndimage.label(smooth > rel_threshold * smooth.max())
    return int(n)
