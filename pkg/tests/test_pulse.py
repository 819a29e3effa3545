"""Pulse oracles: centered transforms against a matrix DFT, envelope
normalization and width, Parseval, narrowband limit, regime warning."""

import numpy as np
import pytest

from fourlevel.atoms import AtomicSystem, DriveSet, Scheme
from fourlevel.errors import ParameterError, ResolutionError
from fourlevel.propagation import MediumSpec
from fourlevel.pulse import (
    PulseSpec,
    gaussian_envelope,
    pulse_transmission,
    to_frequency,
    to_time,
)

LADDER = AtomicSystem(Scheme.LADDER4, {(1, 2): 1.0, (2, 3): 1.0, (3, 4): 0.005})

SIGMA = 1.0 / 1800.0


def probe_only_medium(steps=100):
    return MediumSpec(1.0, {(1, 2): 0.0, (2, 3): 16.0, (3, 4): 0.0}, steps=steps)


def test_centered_transform_matches_matrix_dft():
    rng = np.random.default_rng(7)
    n, domega = 64, 0.31
    spectrum = rng.normal(size=n) + 1j * rng.normal(size=n)
    omega = (np.arange(n) - n // 2) * domega
    dt = 2.0 * np.pi / (n * domega)
    t = (np.arange(n) - n // 2) * dt
    direct = (spectrum[None, :] * np.exp(-1j * np.outer(t, omega))).sum(axis=1)
    direct *= domega / (2.0 * np.pi)
    fast = to_time(spectrum, domega)
    assert np.abs(fast - direct).max() < 1e-12 * np.abs(direct).max()
    back = to_frequency(fast, dt)
    assert np.abs(back - spectrum).max() < 1e-12 * np.abs(spectrum).max()


def test_envelope_normalization_symmetry_and_width():
    spec = PulseSpec(sigma=SIGMA)
    spectrum, trace = gaussian_envelope(spec)
    omega, t = spec.frequency_grid(), spec.time_grid()
    # the spectrum integrates to eps0 = 2 pi peak
    assert abs(np.trapezoid(spectrum, omega) - spec.epsilon0) < 1e-8 * spec.epsilon0
    assert np.abs(trace.imag).max() < 1e-10 * spec.peak
    # even about t = 0: index n/2 + m pairs with n/2 - m, the lone
    # sample at the far edge (index 0) has no partner
    assert np.abs(trace[1:] - trace[1:][::-1].conj()).max() < 1e-10 * spec.peak
    center = spec.points // 2
    assert abs(trace[center].real - spec.peak) < 1e-10
    # the whole envelope follows the 1/e half-width sigma_t = 2 / sigma
    expected = spec.peak * np.exp(-((t / spec.sigma_t) ** 2))
    assert np.abs(np.abs(trace) - expected).max() < 1e-12 * spec.peak


def test_envelope_aliasing_guard():
    with pytest.raises(ResolutionError):
        gaussian_envelope(PulseSpec(sigma=SIGMA, span=800.0 * SIGMA))


def test_pulse_spec_validation():
    with pytest.raises(ParameterError):
        PulseSpec(sigma=0.0)
    with pytest.raises(ParameterError):
        PulseSpec(sigma=SIGMA, peak=0.0)
    with pytest.raises(ParameterError):
        PulseSpec(sigma=SIGMA, points=2048)
    with pytest.raises(ParameterError):
        PulseSpec(sigma=SIGMA, span=4.0 * SIGMA)


def test_vacuum_run_reproduces_input():
    spec = PulseSpec(sigma=SIGMA)
    vacuum = MediumSpec(1.0, {(1, 2): 0.0, (2, 3): 0.0, (3, 4): 0.0}, steps=100)
    result = pulse_transmission(spec, LADDER, DriveSet(coupling=10.0), vacuum)
    assert np.abs(result.output_trace - result.input_trace).max() < 1e-10
    assert result.peak_ratio == pytest.approx(1.0, abs=1e-12)
    assert result.transfer_center == 1.0 + 0.0j
    assert not result.regime_warning


@pytest.fixture(scope="module")
def transparent_run():
    spec = PulseSpec(sigma=SIGMA)
    drives = DriveSet(coupling=10.0)
    return pulse_transmission(spec, LADDER, drives, probe_only_medium()), spec


def test_narrowband_peak_ratio_matches_center_transfer(transparent_run):
    result, _ = transparent_run
    center_ratio = abs(result.transfer_center) ** 2
    assert abs(result.peak_ratio - center_ratio) < 1e-4 * center_ratio
    assert 0.0 < result.peak_ratio < 1.0
    assert not result.regime_warning


def test_parseval_on_both_traces(transparent_run):
    result, spec = transparent_run
    for trace in (result.input_trace, result.output_trace):
        spectrum = to_frequency(trace, spec.dt)
        e_time = (np.abs(trace) ** 2).sum() * spec.dt
        e_freq = (np.abs(spectrum) ** 2).sum() * spec.domega / (2.0 * np.pi)
        assert abs(e_time - e_freq) < 1e-8 * e_time


def test_strong_pulse_sets_regime_warning():
    spec = PulseSpec(sigma=SIGMA, peak=5.0)
    result = pulse_transmission(
        spec, LADDER, DriveSet(coupling=10.0), probe_only_medium()
    )
    assert result.regime_warning
