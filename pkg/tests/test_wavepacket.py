import math

import numpy as np
import pytest

from rotmorse.eigensystem import energy
from rotmorse.molecule import AU_TIME_PS, I2, approx_channel
from rotmorse.wavepacket import (
    autocorrelation, build_cs, classical_period, density, density_peaks, evolve, fragment_count,
    log_weights, mean_spacing, packet_grid, periods, revival_catalog, revival_time,
)

# |d_10|^2, |d_11|^2 at j = 0, alpha = 2.15, n' = 116 from a 50-digit direct sum
W10, W11 = 0.128979, 0.128317


def test_weights_peak_at_level_10(states):
    cs = states[0]
    assert cs.n_prime == 116 and cs.center == 10
    assert cs.weights[10] == pytest.approx(W10, abs=1e-6)
    assert cs.weights[11] == pytest.approx(W11, abs=1e-6)


def test_weights_normalized(states):
    for cs in states.values():
        assert cs.weights.sum() == pytest.approx(1.0, abs=1e-12)


def test_small_alpha_limit(channels):
    cs = build_cs(channels[60], alpha=1e-8, n_prime=40)
    assert cs.weights[40] == pytest.approx(1.0, abs=1e-9)
    assert cs.weights[:40].sum() < 1e-9


def test_alternating_signs(channels):
    sign, _ = log_weights(channels[0], 2.15, 20)
    assert sign[20] == 1.0 and sign[19] == -1.0 and sign[18] == 1.0


@pytest.mark.parametrize("kw", [{"n_prime": 117}, {"n_prime": -1}, {"alpha": 0.0}, {"alpha": math.inf}])
def test_build_cs_rejects(channels, kw):
    with pytest.raises(ValueError):
        build_cs(channels[0], **kw)


def test_periods_j0(states):
    p = periods(states[0]).in_ps()
    assert p.t_rev == pytest.approx(36.2, abs=0.1)
    assert p.t_cl_ground == pytest.approx(0.156, abs=0.002)
    assert p.t_cl_center > p.t_cl_ground


def test_classical_period_is_inverse_level_slope(channels):
    ch = channels[81]
    h = 1e-4
    slope = (energy(ch, 10 + h) - energy(ch, 10 - h)) / (2 * h)
    assert classical_period(ch, 10) == pytest.approx(2 * math.pi / slope, rel=1e-7)


def test_revival_time_is_j_independent_but_tcl_is_not():
    ch0 = approx_channel(I2, 0)
    for j in (10, 60, 81, 100):
        assert revival_time(approx_channel(I2, j)) / revival_time(ch0) == pytest.approx(1.0, abs=1e-6)
    tcl = [classical_period(approx_channel(I2, j), 0) for j in (0, 60, 81, 100)]
    assert all(b > a * (1 + 1e-4) for a, b in zip(tcl, tcl[1:]))


def test_revival_catalog(states):
    cat = revival_catalog(states[0], 8)
    by_s = {(e.r, e.s): e for e in cat}
    assert by_s[(1, 2)].fragments == 1
    assert by_s[(1, 4)].fragments == 2
    assert by_s[(1, 8)].fragments == 4
    assert by_s[(1, 3)].fragments == 3
    assert (2, 4) not in by_s
    t_rev = revival_time(states[0].channel)
    assert by_s[(3, 8)].t == pytest.approx(0.375 * t_rev, rel=1e-15)
    assert [fragment_count(s) for s in (2, 3, 4, 5, 6)] == [1, 3, 2, 5, 3]
    with pytest.raises(ValueError):
        revival_catalog(states[0], 1)


def test_autocorrelation_start_and_bound(states, t_rev):
    cs = states[60]
    a = autocorrelation(cs, np.linspace(0, t_rev, 2000))
    assert a[0] == pytest.approx(1.0, abs=1e-14)
    assert np.abs(a).max() <= 1.0 + 1e-12


def test_autocorrelation_recurs_after_one_orbit(states):
    cs = states[0]
    t_cl = periods(cs).t_cl_center
    times = np.linspace(0.8 * t_cl, 1.2 * t_cl, 4001)
    a = np.abs(autocorrelation(cs, times))
    k = int(np.argmax(a))
    assert 0 < k < times.size - 1
    assert abs(times[k] / t_cl - 1.0) < 0.05
    assert a[k] > 0.9


def test_revival_phases_are_quadratic_free(states, t_rev):
    # second differences of E_n T_rev are multiples of 2 pi
    for cs in states.values():
        second = np.diff(cs.energies * t_rev, 2)
        assert np.abs(np.angle(np.exp(1j * second))).max() < 1e-6


def test_norm_conserved(states, t_rev, grid):
    cs = states[0]
    norms = [1 - evolve(cs, t, grid).norm_defect for t in np.linspace(0, t_rev, 50)]
    assert np.ptp(norms) < 1e-6
    assert max(abs(n - 1) for n in norms) < 1e-6


@pytest.mark.parametrize("j", [0, 60, 81])
def test_initial_packet_unimodal_near_inner_turning_point(states, j):
    cs = states[j]
    st = evolve(cs, 0.0, packet_grid(cs))
    peaks = density_peaks(st.r, density(st))
    assert peaks.size == 1
    assert peaks[0] < cs.channel.rj


def test_cat_peaks_j0(states, t_rev, grid):
    st = evolve(states[0], 0.25 * t_rev, grid)
    peaks = density_peaks(st.r, density(st))
    np.testing.assert_allclose(peaks, [4.7, 5.58], atol=0.05)


def test_cat_peaks_converge_with_j(states, t_rev):
    cs = states[60]
    st = evolve(cs, 0.25 * t_rev, packet_grid(cs))
    p60 = density_peaks(st.r, density(st))
    np.testing.assert_allclose(p60, [4.87, 5.48], atol=0.05)
    st0 = evolve(states[0], 0.25 * t_rev, packet_grid(states[0]))
    p0 = density_peaks(st0.r, density(st0))
    assert p0[0] < p60[0] < p60[1] < p0[1]


@pytest.mark.parametrize("j", [75, 81, 87])
def test_ripples_at_quarter_revival(states, t_rev, j):
    cs = states[j]
    st = evolve(cs, 0.25 * t_rev, packet_grid(cs))
    peaks = density_peaks(st.r, density(st))
    assert peaks.size >= 5
    assert mean_spacing(peaks) == pytest.approx(0.07, abs=0.02)


def test_density_integrates_to_one(states, t_rev):
    cs = states[81]
    g = packet_grid(cs)
    st = evolve(cs, 0.3 * t_rev, g)
    assert g.integrate(density(st)) == pytest.approx(1.0, abs=1e-6)


def test_packet_grid_covers_envelope(states):
    cs = states[87]
    g = packet_grid(cs)
    env = cs.envelope(g.points)
    assert env[0] < 1e-10 * env.max() and env[-1] < 1e-10 * env.max()


def test_picosecond_conversion():
    assert AU_TIME_PS == pytest.approx(2.418884326e-5, rel=1e-12)


def test_mean_spacing_degenerate():
    assert math.isnan(mean_spacing([5.0]))
    assert mean_spacing([3.0, 1.0, 2.0]) == 1.0
