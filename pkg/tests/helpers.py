"""Shared construction helpers for the test suite."""

from __future__ import annotations

import numpy as np

from fourlevel.atoms import AtomicSystem, DriveSet, Scheme


def random_system(scheme: Scheme, rng: np.random.Generator, gamma_coll: bool = False) -> AtomicSystem:
    """System with decay rates drawn from [0.3, 2.0] gamma."""
    channels = {
        Scheme.LADDER4: [(1, 2), (2, 3), (3, 4)],
        Scheme.YPSILON4: [(1, 2), (2, 3), (2, 4)],
    }[scheme]
    decays = {pair: float(rng.uniform(0.3, 2.0)) for pair in channels}
    coll = float(rng.uniform(0.0, 0.5)) if gamma_coll else 0.0
    return AtomicSystem(scheme, decays, gamma_coll=coll)


def random_drives(rng: np.random.Generator, amp: float = 3.0, det: float = 5.0) -> DriveSet:
    """Complex amplitudes up to |amp| and detunings in [-det, det]."""

    def camp() -> complex:
        return complex(rng.uniform(-amp, amp), rng.uniform(-amp, amp))

    return DriveSet(
        coupling=camp(),
        probe=camp(),
        control=camp(),
        delta1=float(rng.uniform(-det, det)),
        delta2=float(rng.uniform(-det, det)),
        delta=float(rng.uniform(-det, det)),
    )


def random_unit_trace_hermitian(rng: np.random.Generator) -> np.ndarray:
    """Hermitian 4x4 matrix with trace exactly 1 (not necessarily positive)."""
    a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    h = 0.5 * (a + a.conj().T)
    h += (1.0 - np.trace(h)) / 4.0 * np.eye(4)
    return h


def random_density_matrix(rng: np.random.Generator) -> np.ndarray:
    """Positive semidefinite unit-trace 4x4 matrix."""
    a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    rho = a @ a.conj().T
    return rho / np.trace(rho)
