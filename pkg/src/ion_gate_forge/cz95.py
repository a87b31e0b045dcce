"""Phonon-bus controlled-phase gate with three-level ions.

Register basis: ``ion_0 (x) ... (x) ion_{N-1} (x) COM phonons`` with per-ion
levels g=0, e0=1, e1=2.  Pulses are exact exponentials of the
interaction-picture generators, parametrised by pulse area ``k*pi``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import IndexOutOfRange
from .fockspace import FockSpace, Operator, StateVector, expm_hermitian, ladder_ops, partial_trace_last


class Level(enum.IntEnum):
    G = 0
    E0 = 1
    E1 = 2


COMPUTATIONAL = {"gg": (Level.G, Level.G), "ge": (Level.G, Level.E0),
                 "eg": (Level.E0, Level.G), "ee": (Level.E0, Level.E0)}
IDEAL_PHASES = {"gg": 1.0, "ge": 1.0, "eg": 1.0, "ee": -1.0}


@dataclass(frozen=True)
class CZ95Register:
    num_ions: int = 2
    phonon_space: FockSpace = field(default_factory=lambda: FockSpace(8))
    eta: float = 0.1
    omega: float = 1.0

    def __post_init__(self):
        if self.num_ions < 1:
            raise ValueError("register needs at least one ion")
        if self.phonon_space.dim < 3:
            raise ValueError("phonon truncation must be at least 3")

    @property
    def dims(self) -> tuple:
        return (3,) * self.num_ions + (self.phonon_space.dim,)

    @property
    def size(self) -> int:
        return int(np.prod(self.dims))

    @property
    def sideband_rabi(self) -> float:
        """Effective COM-sideband Rabi frequency ``eta * Omega / sqrt(N)``."""
        return self.eta * self.omega / math.sqrt(self.num_ions)

    def carrier_duration(self, k: float) -> float:
        return k * math.pi / self.omega

    def sideband_duration(self, k: float) -> float:
        return k * math.pi / self.sideband_rabi

    def basis_state(self, levels, n: int = 0) -> StateVector:
        levels = tuple(int(x) for x in levels)
        if len(levels) != self.num_ions:
            raise ValueError(f"expected {self.num_ions} ion levels, got {len(levels)}")
        amps = np.zeros(self.size, dtype=complex)
        amps[np.ravel_multi_index(levels + (n,), self.dims)] = 1.0
        return StateVector(amps, self.dims)

    def computational_state(self, label: str, m: int = 0, n: int = 1) -> StateVector:
        levels = [Level.G] * self.num_ions
        levels[m], levels[n] = COMPUTATIONAL[label]
        return self.basis_state(levels, 0)


def _check_ion(reg: CZ95Register, ion: int):
    if not 0 <= ion < reg.num_ions:
        raise IndexOutOfRange(f"ion index {ion} outside register of {reg.num_ions}")


def _embed(reg: CZ95Register, ion: int, ion_op: np.ndarray, phonon_op: np.ndarray) -> np.ndarray:
    before = np.eye(3**ion)
    after = np.eye(3 ** (reg.num_ions - ion - 1))
    return np.kron(np.kron(np.kron(before, ion_op), after), phonon_op)


def _transition(upper: int) -> np.ndarray:
    op = np.zeros((3, 3), dtype=complex)
    op[upper, Level.G] = 1.0
    return op


def carrier_generator(reg: CZ95Register, ion: int, phi: float) -> Operator:
    """``|e0><g| e^{-i phi} + h.c.`` on one ion."""
    _check_ion(reg, ion)
    up = _embed(reg, ion, _transition(Level.E0) * np.exp(-1j * phi), np.eye(reg.phonon_space.dim))
    return Operator(up + up.conj().T, reg.dims)


def sideband_generator(reg: CZ95Register, ion: int, q: int, phi: float) -> Operator:
    """``|e_q><g| a e^{-i phi} + h.c.`` on one ion and the COM mode."""
    _check_ion(reg, ion)
    if q not in (0, 1):
        raise ValueError("polarization q must be 0 or 1")
    a = ladder_ops(reg.phonon_space)[0].matrix
    up = _embed(reg, ion, _transition(Level.E0 + q) * np.exp(-1j * phi), a)
    return Operator(up + up.conj().T, reg.dims)


def sideband_hamiltonian(reg: CZ95Register, ion: int, q: int, phi: float) -> Operator:
    """Interaction-picture red-sideband Hamiltonian with coupling ``eta/sqrt(N) * Omega/2``."""
    return sideband_generator(reg, ion, q, phi) * (0.5 * reg.sideband_rabi)


def carrier_rotation(reg: CZ95Register, ion: int, k: float, phi: float = 0.0) -> Operator:
    """Single-ion Rabi rotation of area ``k*pi`` on the {g, e0} transition."""
    return expm_hermitian(carrier_generator(reg, ion, phi), k * math.pi / 2)


def sideband_pulse(reg: CZ95Register, ion: int, k: float, q: int, phi: float = 0.0) -> Operator:
    """Red-sideband pulse of area ``k*pi`` between ``|g,n>`` and ``|e_q,n-1>``."""
    return expm_hermitian(sideband_generator(reg, ion, q, phi), k * math.pi / 2)


def cz95_gate(reg: CZ95Register, m: int, n: int, k_first: float = 1.0) -> Operator:
    """``U_m^{1,0} U_n^{2,1} U_m^{1,0}``; ``k_first`` perturbs the area of step (i)."""
    _check_ion(reg, m)
    _check_ion(reg, n)
    if m == n:
        raise ValueError("control and target ions must differ")
    swap_in = sideband_pulse(reg, m, k_first, 0)
    flip = sideband_pulse(reg, n, 2.0, 1)
    swap_out = sideband_pulse(reg, m, 1.0, 0)
    return swap_out @ flip @ swap_in


@dataclass(frozen=True)
class TruthTable:
    phases: dict
    leakage: float

    def deviation(self, expected=None) -> float:
        expected = IDEAL_PHASES if expected is None else expected
        return max(abs(self.phases[key] - expected[key]) for key in COMPUTATIONAL)

    def to_json(self) -> dict:
        return {
            "phases": {k: [v.real, v.imag] for k, v in self.phases.items()},
            "leakage": self.leakage,
        }


def truth_table(reg: CZ95Register, gate: Operator, m: int = 0, n: int = 1) -> TruthTable:
    """Diagonal amplitudes on the computational inputs and the worst off-table norm."""
    phases = {}
    leakage = 0.0
    for label in COMPUTATIONAL:
        psi = reg.computational_state(label, m, n)
        out = gate @ psi
        amp = psi.inner(out)
        phases[label] = amp
        leakage = max(leakage, float(np.linalg.norm(out.amplitudes - amp * psi.amplitudes)))
    return TruthTable(phases, leakage)


def phonon_state(psi: StateVector) -> np.ndarray:
    """Reduced density matrix of the COM phonon bus."""
    return partial_trace_last(psi)


def aux_population(reg: CZ95Register, psi: StateVector) -> float:
    """Total population with any ion in the auxiliary level e1."""
    probs = psi.populations().reshape(reg.dims)
    total = 0.0
    for ion in range(reg.num_ions):
        total += float(np.take(probs, Level.E1, axis=ion).sum())
    return total


def cnot_from_cz95(reg: CZ95Register, m: int = 0, n: int = 1) -> Operator:
    """Controlled-NOT built from the phase gate and half-pi carrier rotations on ion n."""
    before = carrier_rotation(reg, n, 0.5, math.pi / 2)
    after = carrier_rotation(reg, n, 0.5, -math.pi / 2)
    return after @ cz95_gate(reg, m, n) @ before
