"""Fast kicked two-ion phase gates: design, analytic phases and Fock-space verification."""
from .errors import (
    BasisMismatch,
    DesignRejected,
    DomainError,
    IllConditioned,
    IndexOutOfRange,
    IonGateError,
    NoConvergence,
    NonHermitian,
    TruncationLeakage,
)
from .fastgate import PulseSequence, gate_phase, max_excursion
from .protocols import GateDesign, design_protocol_I, design_protocol_II
from .verify import MotionalState, PhaseReport, SimulationPlan, extract_phases, simulate_sequence

__all__ = [
    "BasisMismatch",
    "DesignRejected",
    "DomainError",
    "GateDesign",
    "IllConditioned",
    "IndexOutOfRange",
    "IonGateError",
    "MotionalState",
    "NoConvergence",
    "NonHermitian",
    "PhaseReport",
    "PulseSequence",
    "SimulationPlan",
    "TruncationLeakage",
    "design_protocol_I",
    "design_protocol_II",
    "extract_phases",
    "gate_phase",
    "max_excursion",
    "simulate_sequence",
]
