import math

import numpy as np
import pytest

from rotmorse.molecule import I2, approx_channel
from rotmorse.rotation import (
    OverlapFunction, angle_sweep, cross_gram, direct_overlap, estimate_angle, generator,
    rotated_reference,
)
from rotmorse.wavepacket import build_cs, evolve

TWO_PI = 2 * math.pi


@pytest.fixture(scope="module")
def quarter(t_rev):
    return 0.25 * t_rev


@pytest.fixture(scope="module")
def sweep():
    return angle_sweep(I2, list(range(0, 171, 10)))


def test_identity_rotation(states, grid, quarter):
    cs0 = states[0]
    chi = rotated_reference(cs0, 0.0, quarter, grid)
    np.testing.assert_array_equal(chi, evolve(cs0, quarter, grid).amplitudes)


def test_full_turn_is_global_phase(states, grid, quarter):
    cs0 = states[0]
    a = rotated_reference(cs0, TWO_PI, quarter, grid)
    b = rotated_reference(cs0, 0.0, quarter, grid)
    assert abs(grid.integrate(np.conj(a) * b)) ** 2 == pytest.approx(1.0, abs=1e-10)


def test_half_turn_at_t0_is_nearly_orthogonal(states, grid):
    cs0 = states[0]
    chi = rotated_reference(cs0, math.pi, 0.0, grid)
    phi0 = evolve(cs0, 0.0, grid).amplitudes
    assert abs(grid.integrate(np.conj(chi) * phi0)) ** 2 < 0.1


def test_reference_must_be_j0(states, grid):
    with pytest.raises(ValueError):
        rotated_reference(states[60], 0.1, 0.0, grid)
    with pytest.raises(ValueError):
        estimate_angle(states[0], states[60], 0.0, grid)


def test_generator_conventions(states):
    cs0 = states[0]
    diff = generator(cs0, "lambda_bar") - generator(cs0, "index")
    np.testing.assert_allclose(diff, 0.5 - cs0.channel.lambda_bar_j)
    with pytest.raises(ValueError):
        generator(cs0, "other")


def test_self_overlap(states, grid, quarter):
    scan = estimate_angle(states[0], states[0], quarter, grid)
    # a quadratic maximum pins phi only to ~sqrt(machine eps)
    assert min(scan.phi_star, TWO_PI - scan.phi_star) < 1e-6
    assert scan.overlap_star == pytest.approx(1.0, abs=1e-12)
    assert not scan.degenerate


def test_gram_overlap_matches_grid_inner_product(states, grid, quarter):
    f = OverlapFunction(states[81], states[0], quarter, grid)
    for phi in (0.0, 0.7, 1.77, 4.0):
        assert f(phi) == pytest.approx(direct_overlap(states[81], states[0], phi, quarter, grid), abs=1e-12)
    g = cross_gram(states[0], states[81], grid)
    assert g.shape == (117, states[81].n_prime + 1)


def test_scan_invariants(states, grid, quarter):
    scan = estimate_angle(states[60], states[0], quarter, grid)
    assert 0 <= scan.phi_star < TWO_PI
    assert np.all((scan.overlaps >= 0) & (scan.overlaps <= 1 + 1e-12))
    assert scan.overlap_star >= scan.overlaps.max()
    step = TWO_PI / scan.phi_grid.size
    k = int(np.argmax(scan.overlaps))
    assert abs(scan.phi_star - scan.phi_grid[k]) <= step


def test_refinement_agrees_with_dense_scan(states, grid, quarter):
    fine = estimate_angle(states[60], states[0], quarter, grid, coarse_steps=4096)
    coarse = estimate_angle(states[60], states[0], quarter, grid)
    assert abs(fine.phi_star - coarse.phi_star) < 1e-4


def test_j60_between_j1_and_j81(states, grid, quarter):
    cs0 = states[0]
    phi = {
        j: estimate_angle(build_cs(approx_channel(I2, j)), cs0, quarter, grid, coarse_steps=4096).phi_star
        for j in (1, 60, 81)
    }
    assert phi[1] < phi[60] < phi[81]


@pytest.mark.parametrize("j", [60, 81])
def test_convention_invariance(states, grid, quarter, j):
    a = estimate_angle(states[j], states[0], quarter, grid, convention="lambda_bar")
    b = estimate_angle(states[j], states[0], quarter, grid, convention="index")
    assert abs(a.phi_star - b.phi_star) < 1e-6
    np.testing.assert_allclose(a.overlaps, b.overlaps, atol=1e-12)


def test_degenerate_flag(states, grid, t_rev):
    # off the cat time, strong rotational coupling leaves no single-angle match
    scan = estimate_angle(build_cs(approx_channel(I2, 200)), states[0], 0.3 * t_rev, grid)
    assert scan.overlap_star < 0.5 and scan.degenerate
    assert not estimate_angle(states[87], states[0], 0.3 * t_rev, grid).degenerate


def test_sweep_starts_at_zero(sweep):
    assert sweep[0].j == 0 and abs(sweep[0].phi_star) < 1e-6 and sweep[0].overlap_star == pytest.approx(1.0)


def test_sweep_positive_and_nondecreasing(sweep):
    rows = [r for r in sweep if r.j <= 160]
    assert all(r.phi_star > 0 for r in rows[1:])
    u = [r.phi_unwrapped for r in rows]
    assert all(b >= a for a, b in zip(u, u[1:]))


def test_sweep_more_sensitive_at_larger_j(sweep):
    u = np.array([r.phi_unwrapped for r in sweep if r.j <= 160])
    assert np.all(np.diff(u, 2) > 0)


def test_sweep_reaches_full_period(sweep):
    u = {r.j: r.phi_unwrapped for r in sweep}
    assert u[150] < TWO_PI <= u[160]


def test_sweep_requires_sorted_j():
    with pytest.raises(ValueError):
        angle_sweep(I2, [60, 0])
