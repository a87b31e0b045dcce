"""Laser-driven single-ion Hamiltonians and their sideband approximations.

Basis ordering is ``internal (x) motion`` with internal index 0 = g, 1 = e.
Hamiltonians are written in the laser rotating frame with
``sigma_z = |e><e| - |g><g|`` and ``sigma_+ = |e><g|``.
"""
from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import TruncationLeakage
from .fockspace import (
    LEAKAGE_TOL,
    FockSpace,
    Operator,
    StateVector,
    displacement_op,
    ladder_ops,
    number_op,
    propagate,
    state_fidelity,
    top_population,
)

SIGMA_PLUS = np.array([[0, 0], [1, 0]], dtype=complex)
SIGMA_MINUS = SIGMA_PLUS.T.copy()
SIGMA_Z = np.diag([-1.0, 1.0]).astype(complex)
SIGMA_X = SIGMA_PLUS + SIGMA_MINUS
G, E = 0, 1


@dataclass(frozen=True)
class IonTrapConfig:
    """Trap and laser parameters; COM/stretch quantities are derived on access."""

    eta: float
    nu: float = 1.0
    omega: float = 0.0
    delta: float = 0.0
    num_ions: int = 1

    def __post_init__(self):
        if not self.eta > 0:
            raise ValueError("Lamb-Dicke parameter must be positive")
        if not self.nu > 0:
            raise ValueError("trap frequency must be positive")
        if self.omega < 0:
            raise ValueError("Rabi frequency must be non-negative")
        if self.num_ions < 1:
            raise ValueError("need at least one ion")

    @property
    def eta_c(self) -> float:
        return self.eta / math.sqrt(2.0)

    @property
    def eta_r(self) -> float:
        return self.eta * (4.0 / 3.0) ** 0.25

    @property
    def nu_c(self) -> float:
        return self.nu

    @property
    def nu_r(self) -> float:
        return math.sqrt(3.0) * self.nu


class SidebandKind(enum.Enum):
    CARRIER = "carrier"
    RED = "red"
    BLUE = "blue"

    @property
    def resonant_detuning(self) -> int:
        """Detuning in units of the trap frequency at which this tuning is resonant."""
        return {"carrier": 0, "red": -1, "blue": 1}[self.value]


def _internal(op2, space: FockSpace) -> np.ndarray:
    return np.kron(op2, np.eye(space.dim))


def bare_hamiltonian(cfg: IonTrapConfig, space: FockSpace) -> Operator:
    """``nu a^dag a - (Delta/2) sigma_z``."""
    n = number_op(space).matrix
    h = cfg.nu * np.kron(np.eye(2), n) - 0.5 * cfg.delta * _internal(SIGMA_Z, space)
    return Operator(h, (2, space.dim))


def build_full_single_ion(cfg: IonTrapConfig, space: FockSpace) -> Operator:
    """Full single-ion Hamiltonian with the exact recoil factor ``exp(i eta (a + a^dag))``."""
    # recoil operator is exp(+i eta X); kick_matrix(-eta) gives it exactly
    recoil = displacement_op(space, -cfg.eta, check=False).matrix
    leak = top_population(np.abs(recoil[:, 0]) ** 2)
    if leak > LEAKAGE_TOL:
        raise TruncationLeakage(f"recoil eta={cfg.eta} leaks {leak:.2e} at dim={space.dim}")
    coupling = np.kron(SIGMA_PLUS, recoil)
    h = bare_hamiltonian(cfg, space).matrix + 0.5 * cfg.omega * (coupling + coupling.conj().T)
    return Operator(h, (2, space.dim))


def sideband_coupling(cfg: IonTrapConfig, kind: SidebandKind, space: FockSpace) -> Operator:
    """Laser coupling term of the lowest-order Lamb-Dicke Hamiltonian for ``kind``."""
    a, adag = (op.matrix for op in ladder_ops(space))
    if kind is SidebandKind.CARRIER:
        up = np.kron(SIGMA_PLUS, np.eye(space.dim))
    elif kind is SidebandKind.RED:
        up = 1j * cfg.eta * np.kron(SIGMA_PLUS, a)
    else:
        up = 1j * cfg.eta * np.kron(SIGMA_PLUS, adag)
    return Operator(0.5 * cfg.omega * (up + up.conj().T), (2, space.dim))


def build_sideband(cfg: IonTrapConfig, kind: SidebandKind, space: FockSpace) -> Operator:
    """Carrier, Jaynes-Cummings (red) or anti-Jaynes-Cummings (blue) Hamiltonian."""
    expected = kind.resonant_detuning * cfg.nu
    if abs(cfg.delta - expected) >= 0.5 * cfg.nu:
        warnings.warn(
            f"{kind.value} Hamiltonian used at detuning {cfg.delta} far from {expected}",
            RuntimeWarning,
            stacklevel=2,
        )
    return bare_hamiltonian(cfg, space) + sideband_coupling(cfg, kind, space)


def lamb_dicke_residual(cfg: IonTrapConfig, space: FockSpace, n_max: int = 1) -> float:
    """Max element gap between the exact coupling and carrier + red + blue terms.

    Restricted to motional levels ``n <= n_max`` where the second-order
    remainder is bounded by ``eta**2 * omega``.
    """
    full = build_full_single_ion(cfg, space) - bare_hamiltonian(cfg, space)
    series = sum(
        (sideband_coupling(cfg, k, space) for k in SidebandKind),
        Operator(np.zeros((2 * space.dim,) * 2), (2, space.dim)),
    )
    diff = (full - series).matrix
    keep = [i * space.dim + n for i in (G, E) for n in range(n_max + 1)]
    return float(np.max(np.abs(diff[np.ix_(keep, keep)])))


def basis_state(space: FockSpace, internal: int, n: int) -> StateVector:
    amps = np.zeros(2 * space.dim, dtype=complex)
    amps[internal * space.dim + n] = 1.0
    return StateVector(amps, (2, space.dim))


def swap_target(space: FockSpace, cfg: IonTrapConfig, alpha: complex, beta: complex, t: float) -> StateVector:
    """Ideal red-sideband swap output including free and Rabi phases.

    With ``Delta = -nu`` both ``|e,0>`` and ``|g,1>`` have energy ``nu/2`` and
    ``|g,0>`` has ``-nu/2``; the resonant pi rotation sends ``|e,0>`` to
    ``-|g,1>``.
    """
    amps = np.zeros(2 * space.dim, dtype=complex)
    amps[G * space.dim + 0] = alpha * np.exp(0.5j * cfg.nu * t)
    amps[G * space.dim + 1] = -beta * np.exp(-0.5j * cfg.nu * t)
    return StateVector(amps, (2, space.dim))


def red_sideband_pi_pulse_swap(
    space: FockSpace, cfg: IonTrapConfig, alpha: complex, beta: complex
) -> tuple[StateVector, float]:
    """Map ``(alpha|g> + beta|e>)|0>`` onto ``|g>(alpha|0> + beta|1>)``.

    Returns the propagated state and its fidelity with :func:`swap_target`.
    """
    if abs(abs(alpha) ** 2 + abs(beta) ** 2 - 1.0) > 1e-12:
        raise ValueError("qubit amplitudes must be normalized")
    if cfg.omega <= 0:
        raise ValueError("swap needs a nonzero Rabi frequency")
    cfg = IonTrapConfig(cfg.eta, cfg.nu, cfg.omega, -cfg.nu, cfg.num_ions)
    t = math.pi / (cfg.eta * cfg.omega)
    amps = np.zeros(2 * space.dim, dtype=complex)
    amps[G * space.dim] = alpha
    amps[E * space.dim] = beta
    out = propagate(build_sideband(cfg, SidebandKind.RED, space), t, StateVector(amps, (2, space.dim)))
    return out, state_fidelity(out, swap_target(space, cfg, alpha, beta, t))


def kick_pair(space: FockSpace, eta: float, qubit_sign: int) -> Operator:
    """Net motional action of a counter-propagating pi-pulse pair.

    ``qubit_sign`` is the sigma_z eigenvalue of the ion (+1 for e, -1 for g);
    the result ``exp(-2 i eta s (a + a^dag))`` sends ``|alpha>`` to
    ``|alpha - 2 i eta s>``.
    """
    if qubit_sign not in (1, -1):
        raise ValueError("qubit_sign must be +1 or -1")
    return displacement_op(space, 2.0 * eta * qubit_sign)


def population_error(
    cfg: IonTrapConfig,
    space: FockSpace,
    initial: StateVector,
    t_max: float,
    samples: int = 400,
) -> float:
    """Max population gap between full and red-sideband evolution on ``[0, t_max]``."""
    full = build_full_single_ion(cfg, space).matrix
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        jc = build_sideband(cfg, SidebandKind.RED, space).matrix
    wf, vf = np.linalg.eigh(full)
    wj, vj = np.linalg.eigh(jc)
    cf = vf.conj().T @ initial.amplitudes
    cj = vj.conj().T @ initial.amplitudes
    ts = np.linspace(0.0, t_max, samples)
    pf = np.abs(vf @ (np.exp(-1j * np.outer(wf, ts)) * cf[:, None])) ** 2
    pj = np.abs(vj @ (np.exp(-1j * np.outer(wj, ts)) * cj[:, None])) ** 2
    return float(np.max(np.abs(pf - pj)))


def sideband_validity(
    omega_over_nu: float, eta: float = 0.1, dim: int = 40, samples: int = 400
) -> float:
    """Population error of the JC picture over one sideband Rabi period.

    The ion starts in ``|e,0>``, the state that the red sideband swaps
    into ``|g,1>``.
    """
    cfg = IonTrapConfig(eta=eta, nu=1.0, omega=omega_over_nu, delta=-1.0)
    space = FockSpace(dim)
    t_rabi = 2.0 * math.pi / (eta * cfg.omega)
    return population_error(cfg, space, basis_state(space, E, 0), t_rabi, samples)

