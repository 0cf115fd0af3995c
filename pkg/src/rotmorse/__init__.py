"""Coherent-state dynamics of a rotating Morse oscillator."""

from .eigensystem import RadialGrid, fd_spectrum_oracle, laguerre, level, wavefunction_on_grid
from .molecule import I2, MoleculeParams, RotationalChannel, approx_channel, channel_sweep, effective_potential, solve_rj
from .rotation import angle_sweep, estimate_angle, rotated_reference
from .wavepacket import (
    autocorrelation, build_cs, density, density_peaks, evolve, packet_grid, periods, revival_catalog, revival_time,
)
from .wigner import PhaseSpaceSpec, interference_metrics, marginal_position, wigner_transform

__version__ = "0.1.0"
