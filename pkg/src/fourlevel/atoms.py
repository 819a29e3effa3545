"""Four-level atomic schemes and their master-equation generators.

Two level layouts are supported:

* ``Scheme.LADDER4``: a cascade 1-2-3-4 in which three fields drive the
  1<->2, 2<->3 and 3<->4 transitions and spontaneous decay runs back down
  the ladder (4->3, 3->2, 2->1).
* ``Scheme.YPSILON4``: level 2 sits above the ground state 1 and branches
  to two upper levels 3 and 4.  A single probe amplitude drives both
  1<->2 and 2<->3 while a control field drives 2<->4; decay channels are
  2->1, 3->2 and 4->2.

All rates, detunings and Rabi amplitudes are expressed in units of one
reference decay rate (written "gamma" throughout), so the generator is
dimensionless.  Density matrices are plain complex ``(4, 4)`` arrays in
row-major element order; ``vec(rho)[4*i + j] = rho[i, j]``.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass
from typing import Dict, Mapping, Tuple

import numpy as np

from .errors import ParameterError

N_LEVELS = 4
DIM = N_LEVELS * N_LEVELS

# Slots of the generator decomposition L = sum_k c_k(drives) * T[k].
# Keeping the drive dependence affine lets sweeps assemble many
# generators at once with a single matrix product.
SLOT_CONST = 0
SLOT_D1 = 1
SLOT_D2 = 2
SLOT_D = 3
SLOT_A1 = 4
SLOT_A1C = 5
SLOT_A2 = 6
SLOT_A2C = 7
SLOT_A3 = 8
SLOT_A3C = 9
N_SLOTS = 10

# Conjugating a term swaps each amplitude slot with its conjugate slot.
_MIRROR_SLOT = {
    SLOT_CONST: SLOT_CONST,
    SLOT_D1: SLOT_D1,
    SLOT_D2: SLOT_D2,
    SLOT_D: SLOT_D,
    SLOT_A1: SLOT_A1C,
    SLOT_A1C: SLOT_A1,
    SLOT_A2: SLOT_A2C,
    SLOT_A2C: SLOT_A2,
    SLOT_A3: SLOT_A3C,
    SLOT_A3C: SLOT_A3,
}


class Scheme(enum.Enum):
    """Level-coupling layout of the four-level system."""

    LADDER4 = "ladder4"
    YPSILON4 = "ypsilon4"


#: Allowed spontaneous-decay channels per scheme, keyed (lower, upper).
DECAY_CHANNELS: Dict[Scheme, frozenset] = {
    Scheme.LADDER4: frozenset({(1, 2), (2, 3), (3, 4)}),
    Scheme.YPSILON4: frozenset({(1, 2), (2, 3), (2, 4)}),
}


class AtomicSystem:
    """Immutable bundle of scheme, decay rates and collisional dephasing.

    Args:
        scheme: level layout.
        decays: map ``(lower, upper) -> rate`` covering exactly the decay
            channels of the scheme; rates are nonnegative, in gamma units.
        gamma_coll: extra collisional dephasing added to every coherence.

    Raises:
        ParameterError: wrong channel set, negative rate, or non-finite
            input.
    """

    __slots__ = ("_scheme", "_decays", "_gamma_coll")

    def __init__(
        self,
        scheme: Scheme,
        decays: Mapping[Tuple[int, int], float],
        gamma_coll: float = 0.0,
    ) -> None:
        if not isinstance(scheme, Scheme):
            raise ParameterError(f"scheme must be a Scheme, got {scheme!r}")
        expected = DECAY_CHANNELS[scheme]
        got = frozenset(decays)
        if got != expected:
            raise ParameterError(
                f"decay channels for {scheme.value} must be exactly "
                f"{sorted(expected)}, got {sorted(got)}"
            )
        clean = {}
        for pair in sorted(decays):
            rate = float(decays[pair])
            if not math.isfinite(rate) or rate < 0.0:
                raise ParameterError(f"decay rate {pair} must be finite and >= 0, got {rate}")
            clean[pair] = rate
        gamma_coll = float(gamma_coll)
        if not math.isfinite(gamma_coll) or gamma_coll < 0.0:
            raise ParameterError(f"gamma_coll must be finite and >= 0, got {gamma_coll}")
        self._scheme = scheme
        self._decays = clean
        self._gamma_coll = gamma_coll

    @property
    def scheme(self) -> Scheme:
        return self._scheme

    @property
    def decays(self) -> Dict[Tuple[int, int], float]:
        return dict(self._decays)

    @property
    def gamma_coll(self) -> float:
        return self._gamma_coll

    def decay_out_of(self, level: int) -> float:
        """Total spontaneous rate out of a level (1-based)."""
        return sum(rate for (_, upper), rate in self._decays.items() if upper == level)

    def _key(self) -> tuple:
        return (self._scheme, tuple(sorted(self._decays.items())), self._gamma_coll)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, AtomicSystem) and self._key() == other._key()

    def __hash__(self) -> int:
        return hash(self._key())

    def __repr__(self) -> str:
        return (
            f"AtomicSystem({self._scheme.value}, decays={self._decays}, "
            f"gamma_coll={self._gamma_coll})"
        )


@dataclass(frozen=True)
class DriveSet:
    """Complex Rabi amplitudes and detunings of the three applied fields.

    For the ladder scheme ``coupling`` drives 1<->2, ``probe`` drives
    2<->3 and ``control`` drives 3<->4.  For the Y scheme the single
    ``probe`` amplitude drives both 1<->2 and 2<->3, ``control`` drives
    2<->4, and ``coupling`` is unused.  ``delta1``/``delta2``/``delta``
    are the field-minus-transition detunings of the 1<->2, 2<->3 and
    control transitions.
    """

    coupling: complex = 0.0
    probe: complex = 0.0
    control: complex = 0.0
    delta1: float = 0.0
    delta2: float = 0.0
    delta: float = 0.0

    def __post_init__(self) -> None:
        for name in ("coupling", "probe", "control"):
            value = complex(getattr(self, name))
            if not cmath.isfinite(value):
                raise ParameterError(f"{name} amplitude must be finite, got {value}")
        for name in ("delta1", "delta2", "delta"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ParameterError(f"{name} must be finite, got {value}")


def transition_amplitudes(system: AtomicSystem, drives: DriveSet) -> Tuple[complex, complex, complex]:
    """Amplitudes on the three driven transitions, in scheme order.

    Returns ``(A1, A2, A3)`` acting on 1<->2, 2<->3 and the control
    transition (3<->4 on the ladder, 2<->4 on the Y scheme).
    """
    if system.scheme is Scheme.LADDER4:
        return (complex(drives.coupling), complex(drives.probe), complex(drives.control))
    return (complex(drives.probe), complex(drives.probe), complex(drives.control))


def dephasing_rates(system: AtomicSystem) -> Dict[Tuple[int, int], float]:
    """Coherence decay rates, keyed ``(upper, lower)`` with 1-based levels.

    Each rate is half the total population decay out of the two levels
    plus the collisional term:
    ``Gamma_ij = (sum_k gamma_ki + sum_k gamma_kj) / 2 + gamma_coll``.
    """
    out = {level: system.decay_out_of(level) for level in range(1, N_LEVELS + 1)}
    rates = {}
    for i in range(2, N_LEVELS + 1):
        for j in range(1, i):
            rates[(i, j)] = 0.5 * (out[i] + out[j]) + system.gamma_coll
    return rates


_TENSOR_CACHE: Dict[tuple, np.ndarray] = {}


def generator_tensor(system: AtomicSystem) -> np.ndarray:
    """Drive-decomposed generator, shape ``(N_SLOTS, 16, 16)``.

    The full Liouvillian for a given drive set is
    ``L = einsum('k,kij->ij', drive_vector(system, drives), T)``.
    The tensor is cached per system and must not be mutated.
    """
    key = system._key()
    cached = _TENSOR_CACHE.get(key)
    if cached is not None:
        return cached

    T = np.zeros((N_SLOTS, DIM, DIM), dtype=complex)

    def add(slot: int, target: tuple, source: tuple, coeff: complex) -> None:
        T[slot, 4 * target[0] + target[1], 4 * source[0] + source[1]] += coeff

    def add_h(slot: int, target: tuple, source: tuple, coeff: complex) -> None:
        # a coherence equation and its Hermitian image enter together
        add(slot, target, source, coeff)
        add(_MIRROR_SLOT[slot], (target[1], target[0]), (source[1], source[0]), np.conj(coeff))

    g = system.decays
    G = dephasing_rates(system)
    I = 1j

    if system.scheme is Scheme.LADDER4:
        g12, g23, g34 = g[(1, 2)], g[(2, 3)], g[(3, 4)]
        # populations; the ground-state row is the trace completion of
        # the three excited-state equations
        add(SLOT_CONST, (0, 0), (1, 1), g12)
        add(SLOT_A1, (0, 0), (0, 1), -I)
        add(SLOT_A1C, (0, 0), (1, 0), I)

        add(SLOT_CONST, (1, 1), (2, 2), g23)
        add(SLOT_CONST, (1, 1), (1, 1), -g12)
        add(SLOT_A1, (1, 1), (0, 1), I)
        add(SLOT_A1C, (1, 1), (1, 0), -I)
        add(SLOT_A2, (1, 1), (1, 2), -I)
        add(SLOT_A2C, (1, 1), (2, 1), I)

        add(SLOT_CONST, (2, 2), (3, 3), g34)
        add(SLOT_CONST, (2, 2), (2, 2), -g23)
        add(SLOT_A2, (2, 2), (1, 2), I)
        add(SLOT_A2C, (2, 2), (2, 1), -I)
        add(SLOT_A3, (2, 2), (2, 3), -I)
        add(SLOT_A3C, (2, 2), (3, 2), I)

        add(SLOT_CONST, (3, 3), (3, 3), -g34)
        add(SLOT_A3, (3, 3), (2, 3), I)
        add(SLOT_A3C, (3, 3), (3, 2), -I)

        # coherences
        add_h(SLOT_D1, (1, 0), (1, 0), I)
        add_h(SLOT_CONST, (1, 0), (1, 0), -G[(2, 1)])
        add_h(SLOT_A1, (1, 0), (0, 0), I)
        add_h(SLOT_A1, (1, 0), (1, 1), -I)
        add_h(SLOT_A2C, (1, 0), (2, 0), I)

        add_h(SLOT_D2, (2, 1), (2, 1), I)
        add_h(SLOT_CONST, (2, 1), (2, 1), -G[(3, 2)])
        add_h(SLOT_A2, (2, 1), (1, 1), I)
        add_h(SLOT_A2, (2, 1), (2, 2), -I)
        add_h(SLOT_A3C, (2, 1), (3, 1), I)
        add_h(SLOT_A1C, (2, 1), (2, 0), -I)

        add_h(SLOT_D, (3, 2), (3, 2), I)
        add_h(SLOT_CONST, (3, 2), (3, 2), -G[(4, 3)])
        add_h(SLOT_A3, (3, 2), (2, 2), I)
        add_h(SLOT_A3, (3, 2), (3, 3), -I)
        add_h(SLOT_A2C, (3, 2), (3, 1), -I)

        add_h(SLOT_D1, (2, 0), (2, 0), I)
        add_h(SLOT_D2, (2, 0), (2, 0), I)
        add_h(SLOT_CONST, (2, 0), (2, 0), -G[(3, 1)])
        add_h(SLOT_A3C, (2, 0), (3, 0), I)
        add_h(SLOT_A2, (2, 0), (1, 0), I)
        add_h(SLOT_A1, (2, 0), (2, 1), -I)

        add_h(SLOT_D2, (3, 1), (3, 1), I)
        add_h(SLOT_D, (3, 1), (3, 1), I)
        add_h(SLOT_CONST, (3, 1), (3, 1), -G[(4, 2)])
        add_h(SLOT_A3, (3, 1), (2, 1), I)
        add_h(SLOT_A2, (3, 1), (3, 2), -I)
        add_h(SLOT_A1C, (3, 1), (3, 0), -I)

        add_h(SLOT_D1, (3, 0), (3, 0), I)
        add_h(SLOT_D2, (3, 0), (3, 0), I)
        add_h(SLOT_D, (3, 0), (3, 0), I)
        add_h(SLOT_CONST, (3, 0), (3, 0), -G[(4, 1)])
        add_h(SLOT_A3, (3, 0), (2, 0), I)
        add_h(SLOT_A1, (3, 0), (3, 1), -I)
    else:
        g12, g23, g24 = g[(1, 2)], g[(2, 3)], g[(2, 4)]
        add(SLOT_CONST, (0, 0), (1, 1), g12)
        add(SLOT_A1, (0, 0), (0, 1), -I)
        add(SLOT_A1C, (0, 0), (1, 0), I)

        add(SLOT_CONST, (1, 1), (1, 1), -g12)
        add(SLOT_CONST, (1, 1), (2, 2), g23)
        add(SLOT_CONST, (1, 1), (3, 3), g24)
        add(SLOT_A1, (1, 1), (0, 1), I)
        add(SLOT_A1C, (1, 1), (1, 0), -I)
        add(SLOT_A2, (1, 1), (1, 2), -I)
        add(SLOT_A2C, (1, 1), (2, 1), I)
        add(SLOT_A3, (1, 1), (1, 3), -I)
        add(SLOT_A3C, (1, 1), (3, 1), I)

        add(SLOT_CONST, (2, 2), (2, 2), -g23)
        add(SLOT_A2, (2, 2), (1, 2), I)
        add(SLOT_A2C, (2, 2), (2, 1), -I)

        # control cycling enters level 4 with the sign opposite to its
        # level-2 term, exactly like the probe pair above; any other
        # choice breaks trace conservation
        add(SLOT_CONST, (3, 3), (3, 3), -g24)
        add(SLOT_A3, (3, 3), (1, 3), I)
        add(SLOT_A3C, (3, 3), (3, 1), -I)

        add_h(SLOT_D1, (1, 0), (1, 0), I)
        add_h(SLOT_CONST, (1, 0), (1, 0), -G[(2, 1)])
        add_h(SLOT_A1, (1, 0), (0, 0), I)
        add_h(SLOT_A1, (1, 0), (1, 1), -I)
        add_h(SLOT_A2C, (1, 0), (2, 0), I)
        add_h(SLOT_A3C, (1, 0), (3, 0), I)

        # the control field couples the 3-2 coherence to the 4-3 one with
        # the commutator sign; together with the level-4 population sign
        # above this is the unique choice that keeps the generator a
        # contraction (no growing modes, positive steady states)
        add_h(SLOT_D2, (2, 1), (2, 1), I)
        add_h(SLOT_CONST, (2, 1), (2, 1), -G[(3, 2)])
        add_h(SLOT_A2, (2, 1), (1, 1), I)
        add_h(SLOT_A2, (2, 1), (2, 2), -I)
        add_h(SLOT_A1C, (2, 1), (2, 0), -I)
        add_h(SLOT_A3, (2, 1), (2, 3), -I)

        add_h(SLOT_D, (3, 1), (3, 1), I)
        add_h(SLOT_CONST, (3, 1), (3, 1), -G[(4, 2)])
        add_h(SLOT_A3, (3, 1), (1, 1), I)
        add_h(SLOT_A3, (3, 1), (3, 3), -I)
        add_h(SLOT_A2, (3, 1), (3, 2), -I)
        add_h(SLOT_A1C, (3, 1), (3, 0), -I)

        add_h(SLOT_D1, (2, 0), (2, 0), I)
        add_h(SLOT_D2, (2, 0), (2, 0), I)
        add_h(SLOT_CONST, (2, 0), (2, 0), -G[(3, 1)])
        add_h(SLOT_A1, (2, 0), (2, 1), -I)
        add_h(SLOT_A2, (2, 0), (1, 0), I)

        add_h(SLOT_D, (3, 2), (3, 2), I)
        add_h(SLOT_D2, (3, 2), (3, 2), -I)
        add_h(SLOT_CONST, (3, 2), (3, 2), -G[(4, 3)])
        add_h(SLOT_A3, (3, 2), (1, 2), I)
        add_h(SLOT_A2C, (3, 2), (3, 1), -I)

        add_h(SLOT_D1, (3, 0), (3, 0), I)
        add_h(SLOT_D, (3, 0), (3, 0), I)
        add_h(SLOT_CONST, (3, 0), (3, 0), -G[(4, 1)])
        add_h(SLOT_A3, (3, 0), (1, 0), I)
        add_h(SLOT_A1, (3, 0), (3, 1), -I)

    T.setflags(write=False)
    _TENSOR_CACHE[key] = T
    return T


def drive_vector(system: AtomicSystem, drives: DriveSet) -> np.ndarray:
    """Coefficients pairing with :func:`generator_tensor`, shape (10,)."""
    a1, a2, a3 = transition_amplitudes(system, drives)
    c = np.empty(N_SLOTS, dtype=complex)
    c[SLOT_CONST] = 1.0
    c[SLOT_D1] = drives.delta1
    c[SLOT_D2] = drives.delta2
    c[SLOT_D] = drives.delta
    c[SLOT_A1] = a1
    c[SLOT_A1C] = np.conj(a1)
    c[SLOT_A2] = a2
    c[SLOT_A2C] = np.conj(a2)
    c[SLOT_A3] = a3
    c[SLOT_A3C] = np.conj(a3)
    return c


def liouvillian(system: AtomicSystem, drives: DriveSet) -> np.ndarray:
    """Generator of the rotating-frame master equation, shape (16, 16).

    Acts on row-major vectorized density matrices: the time derivative
    of ``rho`` is ``(liouvillian(...) @ rho.reshape(16)).reshape(4, 4)``.
    The map preserves trace and Hermiticity.
    """
    T = generator_tensor(system)
    c = drive_vector(system, drives)
    return np.tensordot(c, T, axes=1)


def rhs(system: AtomicSystem, drives: DriveSet, rho: np.ndarray) -> np.ndarray:
    """Time derivative of a density matrix under the master equation."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (N_LEVELS, N_LEVELS):
        raise ParameterError(f"rho must have shape (4, 4), got {rho.shape}")
    if not np.isfinite(rho).all():
        raise ParameterError("rho contains non-finite entries")
    L = liouvillian(system, drives)
    return (L @ rho.reshape(DIM)).reshape(N_LEVELS, N_LEVELS)


def check_density_matrix(rho: np.ndarray, name: str = "rho") -> np.ndarray:
    """Validate Hermiticity, unit trace and population bounds.

    Returns the array as complex ndarray; raises ParameterError on any
    violation (tolerances: 1e-12 for Hermiticity and trace, 1e-8 slack
    on the population interval [0, 1]).
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (N_LEVELS, N_LEVELS):
        raise ParameterError(f"{name} must have shape (4, 4), got {rho.shape}")
    if not np.isfinite(rho).all():
        raise ParameterError(f"{name} contains non-finite entries")
    herm = np.abs(rho - rho.conj().T).max()
    if herm > 1e-12:
        raise ParameterError(f"{name} is not Hermitian (max deviation {herm:.3e})")
    trace = rho.trace()
    if abs(trace - 1.0) > 1e-12:
        raise ParameterError(f"{name} trace must be 1, got {trace}")
    pops = rho.diagonal().real
    if pops.min() < -1e-8 or pops.max() > 1.0 + 1e-8:
        raise ParameterError(f"{name} populations out of [0, 1]: {pops}")
    return rho
