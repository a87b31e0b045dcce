"""Fock-space oracle for kicked two-ion gates.

Every kick and free rotation is diagonal in the qubit sigma_z basis and acts
on one mode at a time, so each qubit configuration and each mode is
simulated independently as a product of truncated displacement and
rotation matrices applied to a state vector.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DesignRejected, DomainError, IllConditioned, TruncationLeakage
from .fastgate import MODES, QUBIT_CONFIGS, PulseSequence, kick_scale, mode_frequency
from .fockspace import (
    DEFAULT_DIM,
    LEAKAGE_TOL,
    MAX_DIM,
    FockSpace,
    apply_kick,
    coherent_guard,
    coherent_state,
    number_state,
    thermal_populations,
    top_population,
)
from .hamiltonians import IonTrapConfig
from .protocols import GateDesign

OVERLAP_MIN = 0.9
COMPONENT_WEIGHT = 1e-6
BATTERY_NUMBERS = (0, 1, 2, 5)
BATTERY_COHERENT = (0.0, 0.5, 1.0 + 0.3j)


@dataclass(frozen=True)
class MotionalState:
    """Initial motional state of the COM and stretch modes.

    ``kind`` is ``"coherent"`` (complex amplitudes), ``"number"`` (integer
    occupations) or ``"thermal"`` (mean occupations).
    """

    kind: str = "number"
    com: complex = 0
    stretch: complex = 0

    def __post_init__(self):
        if self.kind not in ("coherent", "number", "thermal"):
            raise DomainError(f"unknown motional state kind {self.kind!r}")
        if self.kind == "number":
            for n in (self.com, self.stretch):
                if n != int(np.real(n)) or int(np.real(n)) < 0:
                    raise DomainError(f"number states need non-negative integers, got {n}")
        if self.kind == "thermal" and min(np.real(self.com), np.real(self.stretch)) < 0:
            raise DomainError("mean phonon numbers must be non-negative")

    @classmethod
    def coherent(cls, alpha_c=0j, alpha_r=0j):
        return cls("coherent", complex(alpha_c), complex(alpha_r))

    @classmethod
    def number(cls, n_c=0, n_r=0):
        return cls("number", int(n_c), int(n_r))

    @classmethod
    def thermal(cls, nbar_c=0.0, nbar_r=0.0):
        return cls("thermal", float(nbar_c), float(nbar_r))

    def value(self, mode: str):
        return self.com if mode == "com" else self.stretch


def _radius(mstate: MotionalState, mode: str) -> float:
    """Phase-space radius the initial state occupies, for truncation estimates."""
    v = mstate.value(mode)
    if mstate.kind == "coherent":
        return abs(v)
    if mstate.kind == "number":
        return math.sqrt(v)
    return math.sqrt(_thermal_cutoff(float(v)))


def _thermal_cutoff(nbar: float) -> int:
    """Largest occupation whose thermal weight exceeds the component threshold."""
    if nbar == 0:
        return 0
    ratio = nbar / (1.0 + nbar)
    return int(math.floor(math.log(COMPONENT_WEIGHT * (1.0 + nbar)) / math.log(ratio)))


def _max_kick_radius(seq: PulseSequence, eta: float, nu: float, mode: str) -> float:
    """Largest |beta| reached from the origin over all qubit configurations."""
    nu_mode = mode_frequency(mode, nu)
    best = 0.0
    for config in QUBIT_CONFIGS:
        kick = kick_scale(mode, config, eta)
        if kick == 0.0:
            continue
        beta, t_prev = 0j, None
        for z, t in seq.events:
            if t_prev is not None:
                beta *= complex(math.cos(nu_mode * (t - t_prev)), -math.sin(nu_mode * (t - t_prev)))
            beta -= 1j * kick * z
            best = max(best, abs(beta))
            t_prev = t
    return best


def required_dim(seq: PulseSequence, cfg: IonTrapConfig, mode: str, mstate: MotionalState) -> int:
    """Power-of-two truncation (at least the default) covering the whole orbit."""
    r = _max_kick_radius(seq, cfg.eta, cfg.nu, mode) + _radius(mstate, mode)
    need = coherent_guard(r) + 2.0 * math.sqrt(coherent_guard(r))
    dim = DEFAULT_DIM
    while dim < need:
        dim *= 2
    if dim > MAX_DIM:
        raise TruncationLeakage(f"{mode} orbit of radius {r:.3g} needs more than dim={MAX_DIM}")
    return dim


@dataclass(frozen=True)
class SimulationPlan:
    """Sequence, trap parameters, truncations and initial motional state.

    Truncations left as ``None`` are sized from the largest intermediate
    displacement before simulation.
    """

    seq: PulseSequence
    cfg: IonTrapConfig
    dim_com: int | None = None
    dim_str: int | None = None
    initial_motional: MotionalState = field(default_factory=MotionalState)

    def __post_init__(self):
        if self.dim_com is None:
            object.__setattr__(self, "dim_com", required_dim(self.seq, self.cfg, "com", self.initial_motional))
        if self.dim_str is None:
            object.__setattr__(self, "dim_str", required_dim(self.seq, self.cfg, "stretch", self.initial_motional))

    def dim(self, mode: str) -> int:
        return self.dim_com if mode == "com" else self.dim_str

    def with_initial(self, mstate: MotionalState, dims=None) -> "SimulationPlan":
        dims = (None, None) if dims is None else dims
        return SimulationPlan(self.seq, self.cfg, dims[0], dims[1], mstate)

    def doubled(self) -> "SimulationPlan":
        return SimulationPlan(self.seq, self.cfg, 2 * self.dim_com, 2 * self.dim_str, self.initial_motional)


def initial_amplitudes(plan: SimulationPlan, mode: str) -> np.ndarray:
    m = plan.initial_motional
    space = FockSpace(plan.dim(mode))
    if m.kind == "coherent":
        return coherent_state(space, m.value(mode)).amplitudes
    if m.kind == "number":
        return number_state(space, int(m.value(mode))).amplitudes
    raise DomainError("thermal states are mixed; use thermal_gate_test")


def _free(amps: np.ndarray, angle: float) -> np.ndarray:
    return amps * np.exp(-1j * angle * np.arange(amps.size))


def evolve_mode(amps: np.ndarray, seq: PulseSequence, nu_mode: float, kick: float) -> np.ndarray:
    """Kick/rotate one mode from the first to the last event, checking leakage at every kick."""
    t_prev = None
    for step, (z, t) in enumerate(seq.events):
        if t_prev is not None:
            amps = _free(amps, nu_mode * (t - t_prev))
        amps = apply_kick(amps, kick * z)
        leak = top_population(np.abs(amps) ** 2)
        if leak > LEAKAGE_TOL:
            raise TruncationLeakage(
                f"step {step}: population {leak:.2e} in the top levels of dim={amps.size}",
                step=step,
                population=leak,
            )
        t_prev = t
    return amps


def simulate_sequence(plan: SimulationPlan) -> dict:
    """Final ``{config: {mode: amplitudes}}`` after the sequence, one state per mode."""
    out = {}
    for config in QUBIT_CONFIGS:
        out[config] = {}
        for mode in MODES:
            kick = kick_scale(mode, config, plan.cfg.eta)
            out[config][mode] = evolve_mode(
                initial_amplitudes(plan, mode), plan.seq, mode_frequency(mode, plan.cfg.nu), kick
            )
    return out


def free_reference(plan: SimulationPlan, mode: str) -> np.ndarray:
    """Initial state of ``mode`` freely rotated over the sequence duration."""
    return _free(initial_amplitudes(plan, mode), mode_frequency(mode, plan.cfg.nu) * plan.seq.duration)


def _mean_a(amps: np.ndarray) -> complex:
    return complex(np.vdot(amps[:-1], np.sqrt(np.arange(1, amps.size)) * amps[1:]))


def _wrap(x: float) -> float:
    return float((x + math.pi) % (2.0 * math.pi) - math.pi)


@dataclass(frozen=True)
class PhaseReport:
    phi: dict
    theta_extracted: float
    motional_dependence: float
    closure_error: float

    def to_dict(self) -> dict:
        return {
            "phi": dict(self.phi),
            "theta_extracted": self.theta_extracted,
            "motional_dependence": self.motional_dependence,
            "closure_error": self.closure_error,
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)


def _config_overlaps(plan: SimulationPlan):
    finals = simulate_sequence(plan)
    refs = {mode: free_reference(plan, mode) for mode in MODES}
    overlaps, closure = {}, 0.0
    for config, states in finals.items():
        o = 1.0 + 0j
        for mode in MODES:
            o *= np.vdot(refs[mode], states[mode])
            closure = max(closure, abs(_mean_a(states[mode]) - _mean_a(refs[mode])))
        overlaps[config] = complex(o)
    return overlaps, closure


def phases_from_overlaps(overlaps: dict) -> tuple[dict, float]:
    """Per-config phases and ``theta = [phi_pp + phi_mm - phi_pm - phi_mp] / 4``.

    ``theta`` is fixed modulo pi; the pm and mp phases are put on the
    branch that makes the defining identity exact.
    """
    worst = min(abs(o) for o in overlaps.values())
    if worst < OVERLAP_MIN:
        raise IllConditioned(f"overlap with free evolution {worst:.3g} < {OVERLAP_MIN}; phase undefined")
    d1 = float(np.angle(overlaps["pp"] * np.conj(overlaps["pm"])))
    d2 = d1 + _wrap(float(np.angle(overlaps["mm"] * np.conj(overlaps["mp"]))) - d1)
    phi_pp = float(np.angle(overlaps["pp"]))
    phi_mm = float(np.angle(overlaps["mm"]))
    phi = {"pp": phi_pp, "pm": phi_pp - d1, "mp": phi_mm - d2, "mm": phi_mm}
    return phi, 0.25 * (d1 + d2)


def _spread(thetas) -> float:
    # theta is defined modulo pi; measure spread around the first value
    ref = thetas[0]
    rel = [0.5 * _wrap(2.0 * (t - ref)) for t in thetas]
    return float(max(rel) - min(rel))


def battery_states():
    states = [MotionalState.number(n, n) for n in BATTERY_NUMBERS]
    states += [MotionalState.coherent(a, a) for a in BATTERY_COHERENT]
    return states


def extract_phases(plan: SimulationPlan, battery: bool = True) -> PhaseReport:
    """Gate phases of ``plan`` relative to free evolution.

    With ``battery`` the spread of the extracted phase over the standard
    number and coherent input states is reported as motional dependence.
    """
    overlaps, closure = _config_overlaps(plan)
    phi, theta = phases_from_overlaps(overlaps)
    spread = 0.0
    if battery:
        thetas = [theta]
        for mstate in battery_states():
            sub = plan.with_initial(mstate)
            sub_overlaps, sub_closure = _config_overlaps(sub)
            thetas.append(phases_from_overlaps(sub_overlaps)[1])
            closure = max(closure, sub_closure)
        spread = _spread(thetas)
    return PhaseReport(phi, theta, spread, closure)


def thermal_gate_test(plan: SimulationPlan, design: GateDesign | None = None) -> float:
    """Spread of the extracted phase over the number-state components of a thermal input.

    Each mode is decomposed separately (the other held in its ground state)
    and components below the weight threshold are skipped.  Because the
    phases of the two modes add, the two per-mode spreads are summed.
    """
    if plan.initial_motional.kind != "thermal":
        raise DomainError("thermal_gate_test needs a thermal initial state")
    if design is not None and not design.accepted:
        raise DesignRejected("design does not pass the closure check")
    total = 0.0
    for mode in MODES:
        nbar = float(plan.initial_motional.value(mode))
        dim = plan.dim(mode)
        # raises if the thermal tail does not fit the truncation
        weights = thermal_populations(nbar, dim)
        thetas = []
        for n in np.flatnonzero(weights > COMPONENT_WEIGHT):
            occ = (int(n), 0) if mode == "com" else (0, int(n))
            sub = plan.with_initial(MotionalState.number(*occ), (plan.dim_com, plan.dim_str))
            thetas.append(phases_from_overlaps(_config_overlaps(sub)[0])[1])
        total += _spread(thetas)
    return total


def coherent_response(
    seq: PulseSequence, mode: str, config, eta: float, nu: float, alpha0: complex, dim: int | None = None
) -> tuple[complex, float]:
    """Measured ``(alpha~, xi)`` with ``U|alpha0> = e^{i xi}|alpha~>`` for one mode."""
    cfg = IonTrapConfig(eta=eta, nu=nu)
    mstate = MotionalState.coherent(alpha0, alpha0)
    if dim is None:
        dim = required_dim(seq, cfg, mode, mstate)
    space = FockSpace(dim)
    amps = evolve_mode(
        coherent_state(space, alpha0).amplitudes, seq, mode_frequency(mode, nu), kick_scale(mode, config, eta)
    )
    alpha_t = _mean_a(amps)
    overlap = np.vdot(coherent_state(space, alpha_t).amplitudes, amps)
    return alpha_t, float(np.angle(overlap))


def factorization_error(plan: SimulationPlan, n_max: int = 3) -> float:
    """Max deviation of the four-config map from ``e^{i Theta s1 s2}`` times one motional map.

    The reference phases come from the vacuum; the map is then tested on
    product number states up to ``n_max`` in each mode.
    """
    vac = plan.with_initial(MotionalState.number(0, 0), (plan.dim_com, plan.dim_str))
    phi, theta = phases_from_overlaps(_config_overlaps(vac)[0])
    common = 0.25 * sum(phi.values())
    worst = 0.0
    for n_c in range(n_max + 1):
        for n_r in range(n_max + 1):
            sub = plan.with_initial(MotionalState.number(n_c, n_r), (plan.dim_com, plan.dim_str))
            finals = simulate_sequence(sub)
            ref = np.kron(free_reference(sub, "com"), free_reference(sub, "stretch"))
            for config, (s1, s2) in QUBIT_CONFIGS.items():
                got = np.kron(finals[config]["com"], finals[config]["stretch"])
                want = np.exp(1j * (theta * s1 * s2 + common)) * ref
                worst = max(worst, float(np.max(np.abs(got - want))))
    return worst
