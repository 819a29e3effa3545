"""Ring-cavity oracles: symbolic mirror identity, empty-cavity algebra,
S-curve tracing against damped fixed-point iteration, threshold logic."""

import numpy as np
import pytest
import sympy

from fourlevel.atoms import AtomicSystem, DriveSet, Scheme
from fourlevel.cavity import (
    BistabilityCurve,
    CavitySpec,
    bistability_thresholds,
    cavity_sweep,
    cooperation_to_mirror,
)
from fourlevel.errors import ParameterError, ResolutionError
from fourlevel.propagation import MediumSpec, propagate_sweep

LADDER = AtomicSystem(Scheme.LADDER4, {(1, 2): 1.0, (2, 3): 1.0, (3, 4): 0.005})

LADDER_ETA = {(1, 2): 12.0, (2, 3): 16.0, (3, 4): 0.2}


def fig_medium(steps=200, eta23=16.0):
    eta = {**LADDER_ETA, (2, 3): eta23}
    return MediumSpec(length=1.0, eta=eta, steps=steps)


def bistable_curve(steps=200):
    # coupling 3, no control: pronounced S-curve at cooperation 400
    medium = fig_medium(steps=steps)
    cav = cooperation_to_mirror(400.0, medium, gamma23=1.0)
    grid = np.geomspace(1e-2, 50.0, 48)
    return cavity_sweep(LADDER, DriveSet(coupling=3.0), cav, medium, grid), cav


def test_mirror_transmittance_symbolic_oracle():
    # absorption coefficient alpha = 3 lam^2 n / (2 pi) versus source
    # strength eta = 3 lam^2 n gamma / (4 pi) gives alpha = 2 eta / gamma,
    # so C = alpha L / (2 T) pins T = eta L / (C gamma)
    lam, n, gamma, length, coop = sympy.symbols("lam n gamma L C", positive=True)
    alpha = 3 * lam**2 * n / (2 * sympy.pi)
    eta = 3 * lam**2 * n * gamma / (4 * sympy.pi)
    assert sympy.simplify(alpha - 2 * eta / gamma) == 0
    t = sympy.symbols("T", positive=True)
    solved = sympy.solve(sympy.Eq(coop, alpha * length / (2 * t)), t)
    assert len(solved) == 1
    assert sympy.simplify(solved[0] - eta * length / (coop * gamma)) == 0


def test_cooperation_to_mirror_values():
    medium = fig_medium()
    spec = cooperation_to_mirror(400.0, medium, gamma23=1.0)
    assert abs(spec.transmittance - 0.04) < 1e-12
    assert abs(spec.reflectance - 0.96) < 1e-12
    assert abs(spec.reflectance + spec.transmittance - 1.0) < 1e-12
    assert spec.cooperation == 400.0
    # mirrorless boundary: C = eta L / gamma puts every photon through
    assert cooperation_to_mirror(16.0, medium, 1.0).transmittance == 1.0
    assert abs(cooperation_to_mirror(32.0, medium, 1.0).transmittance - 0.5) < 1e-12
    with pytest.raises(ParameterError):
        cooperation_to_mirror(8.0, medium, 1.0)
    with pytest.raises(ParameterError):
        cooperation_to_mirror(-4.0, medium, 1.0)
    with pytest.raises(ParameterError):
        cooperation_to_mirror(400.0, medium, 0.0)


def test_cavity_spec_validation():
    with pytest.raises(ParameterError):
        CavitySpec(reflectance=0.9, transmittance=0.2)
    with pytest.raises(ParameterError):
        CavitySpec(reflectance=1.0, transmittance=0.0)
    with pytest.raises(ParameterError):
        CavitySpec(reflectance=-0.1, transmittance=1.1)
    with pytest.raises(ParameterError):
        CavitySpec(reflectance=0.5, transmittance=0.5, phase=np.inf)
    with pytest.raises(ParameterError):
        CavitySpec(reflectance=0.5, transmittance=0.5, cooperation=-1.0)


def test_empty_cavity_is_transparent():
    medium = MediumSpec(1.0, {(1, 2): 0.0, (2, 3): 0.0, (3, 4): 0.0}, steps=100)
    cav = CavitySpec(reflectance=0.96, transmittance=0.04)
    grid = np.geomspace(1e-2, 10.0, 9)
    curve = cavity_sweep(LADDER, DriveSet(coupling=5.0), cav, medium, grid)
    assert np.allclose(
        curve.output_intensity, curve.input_intensity, rtol=1e-12, atol=0.0
    )


def test_weak_cooperation_is_single_valued():
    medium = fig_medium(eta23=0.5)
    cav = cooperation_to_mirror(1.0, medium, 1.0)
    assert cav.transmittance == 0.5
    grid = np.geomspace(1e-2, 20.0, 24)
    curve = cavity_sweep(LADDER, DriveSet(coupling=3.0), cav, medium, grid)
    assert np.all(np.diff(curve.input_intensity) > 0.0)
    assert bistability_thresholds(curve) is None


def test_bistable_curve_thresholds_and_passivity():
    curve, _ = bistable_curve()
    thresholds = bistability_thresholds(curve)
    assert thresholds is not None
    assert 0.0 < thresholds["lower"] < thresholds["upper"]
    # golden-section refinement must have inserted samples near the knees
    assert curve.x.size > 48
    # below the first turning point the resonant cavity only absorbs
    first_turn = int(np.argmax(np.diff(curve.input_intensity) < 0.0))
    slab = slice(0, max(first_turn, 1))
    assert np.all(
        curve.output_intensity[slab] <= curve.input_intensity[slab] + 1e-6
    )


def test_damped_iteration_reproduces_curve_points():
    # re-solve the self-consistency map at stable sample points; the
    # parametric trace and the fixed point must agree.  Moderate finesse
    # keeps the upper-branch contraction rate (~R) comfortably below 1.
    medium = fig_medium(steps=100)
    cav = cooperation_to_mirror(100.0, medium, gamma23=1.0)
    grid = np.geomspace(1e-2, 50.0, 24)
    curve = cavity_sweep(
        LADDER, DriveSet(coupling=3.0), cav, medium, grid, refine=False
    )
    probe_only = MediumSpec(1.0, {(1, 2): 0.0, (2, 3): 16.0, (3, 4): 0.0}, steps=100)
    feedback = cav.reflectance * np.exp(-1j * cav.phase)
    root_t = np.sqrt(cav.transmittance)

    def pass_exit(y):
        deltas = np.zeros((y.size, 3))
        entry = np.column_stack(
            [np.full(y.size, 3.0 + 0j), y.astype(complex), np.zeros(y.size, complex)]
        )
        return propagate_sweep(LADDER, deltas, entry, probe_only)[:, 1]

    # ends of both branches, away from the knees where contraction stalls
    picks = np.array([0, 5, 22, 23])
    x = curve.x[picks]
    target = (x - feedback * pass_exit(x)) / root_t
    y = x * 1.05
    for _ in range(150):
        y_next = root_t * target + feedback * pass_exit(y)
        if np.abs(y_next - y).max() < 1e-11:
            y = y_next
            break
        y = 0.2 * y + 0.8 * y_next
    out = cav.transmittance * np.abs(pass_exit(y)) ** 2
    assert np.allclose(out, curve.output_intensity[picks], rtol=1e-6, atol=1e-12)


def test_strong_beams_do_not_deplete_in_cavity():
    cav = CavitySpec(reflectance=0.96, transmittance=0.04)
    grid = np.geomspace(0.1, 10.0, 5)
    curves = [
        cavity_sweep(
            LADDER, DriveSet(coupling=3.0), cav,
            MediumSpec(1.0, eta, steps=100), grid, refine=False,
        )
        for eta in (LADDER_ETA, {**LADDER_ETA, (1, 2): 240.0})
    ]
    assert np.array_equal(curves[0].input_intensity, curves[1].input_intensity)
    assert np.array_equal(curves[0].output_intensity, curves[1].output_intensity)


def test_cooperation_consistency_guard():
    medium = fig_medium(steps=100)
    grid = np.geomspace(0.1, 1.0, 5)
    bad = CavitySpec(0.96, 0.04, cooperation=100.0)
    with pytest.raises(ParameterError):
        cavity_sweep(LADDER, DriveSet(coupling=3.0), bad, medium, grid)
    good = CavitySpec(0.96, 0.04, cooperation=400.0)
    cavity_sweep(LADDER, DriveSet(coupling=3.0), good, medium, grid, refine=False)


def test_sweep_grid_validation():
    cav = CavitySpec(0.96, 0.04)
    medium = fig_medium(steps=100)
    with pytest.raises(ParameterError):
        cavity_sweep(LADDER, DriveSet(coupling=3.0), cav, medium, np.array([0.0, 1.0]))
    with pytest.raises(ParameterError):
        cavity_sweep(LADDER, DriveSet(coupling=3.0), cav, medium, np.array([2.0, 1.0]))


def test_threshold_logic_on_synthetic_curves():
    x = np.linspace(1.0, 7.0, 7)
    rising = BistabilityCurve(x, x**2, 0.5 * x**2)
    assert bistability_thresholds(rising) is None
    s_shape = BistabilityCurve(
        x, np.array([0.0, 1.0, 2.0, 1.5, 1.2, 3.0, 4.0]), np.ones(7)
    )
    thresholds = bistability_thresholds(s_shape)
    assert thresholds["upper"] == pytest.approx(2.0, abs=0.3)
    assert thresholds["lower"] == pytest.approx(1.2, abs=0.3)
    assert thresholds["upper"] > thresholds["lower"]
    # a maximum with no later minimum leaves the lower threshold open
    half = BistabilityCurve(x[:5], np.array([1.0, 3.0, 2.5, 2.2, 2.0]), np.ones(5))
    thresholds = bistability_thresholds(half)
    assert thresholds["upper"] == pytest.approx(3.0, abs=0.3)
    assert thresholds["lower"] is None
    with pytest.raises(ResolutionError):
        bistability_thresholds(BistabilityCurve(x[:4], x[:4], x[:4]))


def test_curve_validation():
    x = np.linspace(1.0, 2.0, 4)
    with pytest.raises(ParameterError):
        BistabilityCurve(np.array([-1.0, 1.0]), np.ones(2), np.ones(2))
    with pytest.raises(ParameterError):
        BistabilityCurve(x, np.ones(3), np.ones(4))
