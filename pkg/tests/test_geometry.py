import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import footprint_simpson
from softarray import _quadrature_py
from softarray.exceptions import DomainError, InfeasibleStateError
from softarray.geometry import (ArrayConstants, DeformationState, element_positions,
                                projected_length, verify_arc_length)


def test_zero_amplitude_is_straight():
    assert projected_length(0.0, 3.0, 0.25, tol=1e-10) == 0.25


def test_zero_frequency_is_straight():
    assert projected_length(0.1, 0.0, 0.4, tol=1e-10) == 0.4


def test_matches_simpson_oracle():
    expected = footprint_simpson(0.2, 5.0, 0.5, tol=1e-12)
    assert projected_length(0.2, 5.0, 0.5, tol=1e-10) == pytest.approx(expected, abs=1e-9)


@pytest.mark.parametrize("amp,freq,ell,phase", [
    (0.2, 5.0, 1.0, 0.0),     # kink at s = pi/5 inside the interval
    (0.2, 5.0, 0.5, 0.7),
    (0.1, 2.0, 0.3, 2.5),
    (0.05, 4.0, 0.5, -1.0),
])
def test_matches_simpson_oracle_with_phase(amp, freq, ell, phase):
    expected = footprint_simpson(amp, freq, ell, phase, tol=1e-12)
    assert projected_length(amp, freq, ell, tol=1e-10, phase=phase) == pytest.approx(
        expected, abs=1e-10)


def test_domain_errors():
    with pytest.raises(DomainError):
        projected_length(0.3, 5.0, 0.5)
    with pytest.raises(DomainError):
        projected_length(0.1, 1.0, -0.1)


def test_undeformed_layout_lies_on_rays():
    consts = ArrayConstants()
    layout = element_positions(DeformationState.zero(consts), consts)
    pos = layout.positions.reshape(consts.num_tentacles, consts.elements_per_tentacle, 3)
    assert np.all(pos[..., 2] == 0.0)
    radius = np.hypot(pos[..., 0], pos[..., 1])
    np.testing.assert_allclose(radius, np.tile(consts.arc_positions, (8, 1)), rtol=0, atol=1e-15)
    azimuth = np.arctan2(pos[..., 1], pos[..., 0]) % (2 * np.pi)
    expected = (2 * np.pi * np.arange(1, 9) / 8) % (2 * np.pi)
    diff = np.angle(np.exp(1j * (azimuth - expected[:, None])))
    assert np.max(np.abs(diff)) < 1e-12


def test_single_element_position():
    consts = ArrayConstants(num_tentacles=1, elements_per_tentacle=1, total_arc_length=1.0)
    layout = element_positions(DeformationState([0.2], [5.0]), consts)
    x, y, z = layout.positions[0]
    u = footprint_simpson(0.2, 5.0, 1.0, tol=1e-12)
    assert z == pytest.approx(0.2 * math.sin(5.0), abs=1e-15)
    assert x == pytest.approx(u * math.cos(2 * math.pi), abs=1e-10)
    assert abs(y) < 1e-12


def test_boundary_state_accepted():
    consts = ArrayConstants()
    a = consts.amplitude_bound
    state = DeformationState(np.full(8, a), np.full(8, 1 / a))
    layout = element_positions(state, consts)
    assert np.all(np.isfinite(layout.positions))


def test_infeasible_state_rejected():
    consts = ArrayConstants()
    with pytest.raises(InfeasibleStateError):
        element_positions(DeformationState(np.full(8, 0.3), np.ones(8)), consts)
    with pytest.raises(InfeasibleStateError):
        element_positions(DeformationState(np.full(8, 0.1), np.full(8, -1.0)), consts)


def test_heights_and_planar_radius():
    consts = ArrayConstants(phase=0.4)
    rng = np.random.default_rng(3)
    state = DeformationState(rng.uniform(0, 0.2, 8), rng.uniform(0, 5, 8))
    pos = element_positions(state, consts).positions.reshape(8, 4, 3)
    ell = consts.arc_positions
    np.testing.assert_array_equal(
        pos[..., 2], state.amplitudes[:, None] * np.sin(0.4 + np.outer(state.spatial_freqs, ell)))
    radius = np.hypot(pos[..., 0], pos[..., 1])
    assert np.all(radius < ell[None, :])


def test_deterministic():
    consts = ArrayConstants()
    state = DeformationState(np.linspace(0, 0.2, 8), np.linspace(5, 0, 8))
    a = element_positions(state, consts).positions
    b = element_positions(state, consts).positions
    assert np.array_equal(a, b)


def test_arc_length_straight():
    consts = ArrayConstants()
    assert verify_arc_length(DeformationState.zero(consts), 0, consts, samples=100) == \
        pytest.approx(consts.total_arc_length, rel=1e-14)


def test_arc_length_deformed():
    consts = ArrayConstants(num_tentacles=1)
    length = verify_arc_length(DeformationState([0.2], [5.0]), 0, consts, samples=10_000)
    assert length == pytest.approx(consts.total_arc_length, rel=1e-6)


def test_arc_length_at_slope_boundary():
    consts = ArrayConstants(num_tentacles=1, total_arc_length=1.0, phase=0.3)
    length = verify_arc_length(DeformationState([0.2], [5.0]), 0, consts, samples=10_000)
    assert length == pytest.approx(1.0, rel=1e-5)


def test_arc_length_needs_samples():
    consts = ArrayConstants(num_tentacles=1)
    with pytest.raises(ValueError):
        verify_arc_length(DeformationState([0.1], [1.0]), 0, consts, samples=5)


feasible = st.tuples(st.floats(0.0, 0.2), st.floats(0.0, 5.0))


@settings(max_examples=100, deadline=None)
@given(feasible, st.floats(-math.pi, math.pi))
def test_arc_length_preserved(av, phase):
    consts = ArrayConstants(num_tentacles=1, phase=phase)
    length = verify_arc_length(DeformationState([av[0]], [av[1]]), 0, consts, samples=10_000)
    assert length == pytest.approx(consts.total_arc_length, rel=1e-6)


@settings(max_examples=60, deadline=None)
@given(st.floats(1e-3, 0.2), st.floats(0.1, 5.0))
def test_contraction_and_monotone_in_arc(amp, freq):
    ell = np.linspace(0.01, 0.5, 25)
    u = [projected_length(amp, freq, x) for x in ell]
    assert all(ui < li for ui, li in zip(u, ell))
    assert all(b > a for a, b in zip(u[:-1], u[1:]))


@settings(max_examples=60, deadline=None)
@given(st.floats(0.1, 5.0), st.floats(0.01, 0.5))
def test_monotone_in_amplitude(freq, ell):
    amps = np.linspace(0.0, min(0.2, 1 / freq), 15)
    u = [projected_length(a, freq, ell) for a in amps]
    assert all(b <= a + 1e-12 for a, b in zip(u[:-1], u[1:]))


@settings(max_examples=60, deadline=None)
@given(feasible, st.floats(0.0, 0.5), st.sampled_from([1e-6, 1e-8, 1e-10]))
def test_halving_tolerance_is_stable(av, ell, tol):
    coarse = projected_length(av[0], av[1], ell, tol=tol)
    fine = projected_length(av[0], av[1], ell, tol=tol / 2)
    assert abs(coarse - fine) <= tol


@settings(max_examples=40, deadline=None)
@given(st.lists(feasible, min_size=1, max_size=8), st.floats(-3.0, 3.0))
def test_python_fallback_agrees(states, phase):
    amp = np.array([a for a, _ in states])
    freq = np.array([v for _, v in states])
    ell = np.array([0.1, 0.2, 0.35, 0.5])
    from softarray import _kernels
    a = _kernels.projected_lengths(amp, freq, ell, phase, 1e-10)
    b = _quadrature_py.projected_lengths(amp, freq, ell, phase, 1e-10)
    np.testing.assert_allclose(a, b, rtol=0, atol=2e-10)
