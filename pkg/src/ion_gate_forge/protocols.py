"""Protocol I and II kick schedules and solvers for closed, phase-targeted gates.

Both protocols are antisymmetric in time, so each commensurability sum
reduces to ``2i N * (real sine sum)``.  Solvers eliminate one time with an
arcsine, find the remaining one by bracketed Newton, and then pick the
integer scale ``N`` and fine-tune along the one-parameter solution family
to hit the requested gate phase.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from .errors import DesignRejected, DomainError, NoConvergence
from .fastgate import SQRT3, PulseSequence, commensurability, gate_phase
from .rootfind import GRID_POINTS, find_brackets, newton_bisect

RESIDUAL_TOL = 1e-9
PROTOCOL_II_WEIGHTS = (-2.0, 3.0, -2.0, 2.0, -3.0, 2.0)


@dataclass(frozen=True)
class GateDesign:
    protocol: str
    gamma: float | None
    tau1: float | None
    tau2: float | None
    tau3: float | None
    scale_N: int
    total_time_T: float
    theta: float
    residual_Cc: float
    residual_Cr: float
    pulse_pairs_Np: float
    events: tuple | None = None

    def sequence(self) -> PulseSequence:
        if self.protocol == "I":
            return expand_protocol_I(self.gamma, self.tau1, self.tau2, self.scale_N)
        if self.protocol == "II":
            return expand_protocol_II(self.tau1, self.tau2, self.tau3, self.scale_N)
        return PulseSequence(tuple(self.events or ()))

    @property
    def accepted(self) -> bool:
        return self.residual_Cc <= RESIDUAL_TOL and self.residual_Cr <= RESIDUAL_TOL

    def to_dict(self) -> dict:
        out = asdict(self)
        if self.protocol != "Custom":
            out.pop("events")
        else:
            out["events"] = [list(e) for e in self.events or ()]
        return out

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, data: dict) -> "GateDesign":
        data = dict(data)
        events = data.pop("events", None)
        if events is not None:
            events = tuple((float(z), float(t)) for z, t in events)
        return cls(events=events, **data)

    @classmethod
    def from_json(cls, text: str) -> "GateDesign":
        return cls.from_dict(json.loads(text))


def _design(protocol, seq, eta, nu, scale_N, gamma=None, tau1=None, tau2=None, tau3=None, events=None):
    cc, cr = commensurability(seq, nu)
    pairs = seq.pulse_pairs
    return GateDesign(
        protocol=protocol,
        gamma=gamma,
        tau1=tau1,
        tau2=tau2,
        tau3=tau3,
        scale_N=int(scale_N),
        total_time_T=float(seq.duration),
        theta=gate_phase(seq, eta, nu),
        residual_Cc=abs(cc),
        residual_Cr=abs(cr),
        pulse_pairs_Np=int(round(pairs)) if float(pairs).is_integer() else float(pairs),
        events=events,
    )


def custom_design(seq: PulseSequence, eta: float, nu: float = 1.0) -> GateDesign:
    return _design("Custom", seq, eta, nu, 1, events=seq.events)


def expand_protocol_I(gamma: float, tau1: float, tau2: float, scale_N: int) -> PulseSequence:
    """Four kicks ``N * (gamma, 1, -1, -gamma)`` at ``(-tau1, -tau2, tau2, tau1)``."""
    if not 0 < gamma < 1:
        raise DomainError(f"gamma must lie in (0, 1), got {gamma}")
    if not tau1 > tau2 > 0:
        raise DomainError(f"need tau1 > tau2 > 0, got {tau1}, {tau2}")
    if scale_N < 1:
        raise DomainError("scale_N must be a positive integer")
    n = float(scale_N)
    return PulseSequence(((n * gamma, -tau1), (n, -tau2), (-n, tau2), (-n * gamma, tau1)))


def expand_protocol_II(tau1: float, tau2: float, tau3: float, scale_N: int) -> PulseSequence:
    """Six kicks ``N * (-2, 3, -2, 2, -3, 2)`` at ``(-tau1, -tau2, -tau3, tau3, tau2, tau1)``."""
    if not tau1 > tau2 > tau3 > 0:
        raise DomainError(f"need tau1 > tau2 > tau3 > 0, got {tau1}, {tau2}, {tau3}")
    if scale_N < 1:
        raise DomainError("scale_N must be a positive integer")
    times = (-tau1, -tau2, -tau3, tau3, tau2, tau1)
    return PulseSequence(tuple((scale_N * w, t) for w, t in zip(PROTOCOL_II_WEIGHTS, times)))


# Protocol I ---------------------------------------------------------------
# With nu = 1 the closure conditions read
#   gamma sin(x1) + sin(x2) = 0,   gamma sin(s x1) + sin(s x2) = 0,   s = sqrt(3).
# For 0 < gamma < 1 the solution family starts at x2 -> 0, gamma -> 0 with
# sin(s x1) = s sin(x1), x1 ~ 0.538 * 2 pi, and ends at gamma = 1 with
# x1 = pi + x2, x2 = pi (1/sqrt3 - 1/2).


def protocol_I_times(gamma: float) -> tuple[float, float]:
    """Dimensionless ``(nu tau1, nu tau2)`` closing a Protocol I gate for ``gamma``."""

    def x2_of(x1):
        arg = -gamma * math.sin(x1)
        return math.asin(arg) if -1.0 <= arg <= 1.0 else math.nan

    def h(x1):
        x2 = x2_of(x1)
        return gamma * math.sin(SQRT3 * x1) + math.sin(SQRT3 * x2)

    def dh(x1):
        x2 = x2_of(x1)
        dx2 = -gamma * math.cos(x1) / math.cos(x2)
        return SQRT3 * (gamma * math.cos(SQRT3 * x1) + math.cos(SQRT3 * x2) * dx2)

    eps = 1e-9
    for lo, hi in find_brackets(h, math.pi + eps, 2.0 * math.pi - eps, GRID_POINTS):
        x1 = newton_bisect(h, lo, hi, fprime=dh)
        x2 = x2_of(x1)
        if x1 > x2 > 0:
            return x1, x2
    raise NoConvergence(f"no Protocol I closure found for gamma={gamma}")


def protocol_I_theta(gamma: float, eta: float, scale_N: int = 1) -> float:
    x1, x2 = protocol_I_times(gamma)
    return gate_phase(_protocol_I_sequence(gamma, x1, x2, scale_N), eta)


def _protocol_I_sequence(gamma, tau1, tau2, scale_N):
    # no domain check: gamma = 1 closes the family and bounds Theta from above
    n = float(scale_N)
    return PulseSequence(((n * gamma, -tau1), (n, -tau2), (-n, tau2), (-n * gamma, tau1)))


def design_protocol_I(eta: float, nu: float = 1.0, target_theta: float = math.pi / 4) -> GateDesign:
    """Closed four-kick gate with phase ``target_theta``."""
    if target_theta <= 0:
        raise DomainError("Protocol I produces positive gate phases only; target must be > 0")
    theta_max = protocol_I_theta(1.0, eta)
    scale_N = max(1, math.ceil(math.sqrt(target_theta / theta_max)))
    if scale_N**2 * theta_max <= target_theta:
        scale_N += 1
    per_unit = target_theta / scale_N**2
    gamma = newton_bisect(lambda g: protocol_I_theta(g, eta) - per_unit, 1e-9, 1.0, xtol=1e-15)
    x1, x2 = protocol_I_times(gamma)
    seq = expand_protocol_I(gamma, x1 / nu, x2 / nu, scale_N)
    design = _design("I", seq, eta, nu, scale_N, gamma=float(gamma), tau1=float(x1 / nu), tau2=float(x2 / nu))
    _require_closed(design)
    return design


# Protocol II --------------------------------------------------------------
# Conditions at fixed x1 = nu tau1:
#   -2 sin(x1) + 3 sin(x2) - 2 sin(x3) = 0   (same with sqrt(3) x)
# x3 follows from the first by an arcsine (two branches).


def protocol_II_solutions(x1: float) -> list[tuple[float, float]]:
    """All ``(x2, x3)`` with ``x1 > x2 > x3 > 0`` closing Protocol II at ``x1``."""
    sols = []
    for upper in (False, True):

        def x3_of(x2, upper=upper):
            arg = 1.5 * math.sin(x2) - math.sin(x1)
            if not -1.0 <= arg <= 1.0:
                return math.nan
            base = math.asin(arg)
            return math.pi - base if upper else base

        def h(x2, x3_of=x3_of):
            x3 = x3_of(x2)
            if not 0.0 < x3 < x2:
                return math.nan
            return -2 * math.sin(SQRT3 * x1) + 3 * math.sin(SQRT3 * x2) - 2 * math.sin(SQRT3 * x3)

        def dh(x2, x3_of=x3_of):
            x3 = x3_of(x2)
            dx3 = 1.5 * math.cos(x2) / math.cos(x3)
            return SQRT3 * (3 * math.cos(SQRT3 * x2) - 2 * math.cos(SQRT3 * x3) * dx3)

        for lo, hi in find_brackets(h, 0.0, x1, GRID_POINTS):
            x2 = newton_bisect(h, lo, hi, fprime=dh)
            x3 = x3_of(x2)
            if x1 > x2 > x3 > 0:
                sols.append((x2, x3))
    return sols


def _protocol_II_theta(x1, x2, x3, eta):
    return gate_phase(expand_protocol_II(x1, x2, x3, 1), eta)


def _track(x1, ref):
    """Solution at ``x1`` continuous with the reference ratios ``(x2/x1, x3/x1)``."""
    sols = protocol_II_solutions(x1)
    if not sols:
        raise NoConvergence(f"Protocol II solution family lost at nu*tau1={x1}")
    return min(sols, key=lambda s: (s[0] / x1 - ref[0]) ** 2 + (s[1] / x1 - ref[1]) ** 2)


RETRY_SHRINK = 0.97
MAX_RETRIES = 40


def design_protocol_II(eta: float, nu: float, T: float, target_theta: float = math.pi / 4) -> GateDesign:
    """Closed six-kick gate of duration at most ``T`` with phase ``target_theta``.

    ``N`` is the smallest integer reaching the target at ``tau1 = T/2``; the
    gate is then shortened along the same solution family until
    ``N**2 * Theta_1 = target`` exactly.  If no closure exists at the
    requested time, or the family ends before the target is met, the
    request is retried at successively shorter times.
    """
    if not T > 0:
        raise DomainError("gate time must be positive")
    if target_theta <= 0:
        raise DomainError("Protocol II produces positive gate phases only; target must be > 0")
    x1 = 0.5 * nu * T
    last = None
    for _ in range(MAX_RETRIES):
        try:
            return _design_II_at(eta, nu, x1, target_theta)
        except NoConvergence as exc:
            last = exc
            x1 *= RETRY_SHRINK
    raise NoConvergence(f"no Protocol II design at or below nu*T={nu * T}: {last}")


def _design_II_at(eta, nu, x1, target_theta):
    sols = protocol_II_solutions(x1)
    if not sols:
        raise NoConvergence(f"no Protocol II closure at nu*tau1={x1}")
    thetas = [_protocol_II_theta(x1, x2, x3, eta) for x2, x3 in sols]
    best = int(np.argmax(thetas))
    theta1 = thetas[best]
    if theta1 <= 0:
        raise NoConvergence(f"Protocol II closures at nu*tau1={x1} give no positive phase")
    scale_N = max(1, math.ceil(math.sqrt(target_theta / theta1)))
    per_unit = target_theta / scale_N**2
    ref = [sols[best][0] / x1, sols[best][1] / x1]

    def excess(x):
        x2, x3 = _track(x, ref)
        return _protocol_II_theta(x, x2, x3, eta) - per_unit

    root = x1
    if theta1 - per_unit != 0.0:
        hi = lo = x1
        for _ in range(400):
            hi, lo = lo, lo * RETRY_SHRINK
            x2, x3 = _track(lo, ref)
            ref[:] = [x2 / lo, x3 / lo]
            if excess(lo) < 0:
                break
        else:
            raise NoConvergence("could not bracket the target phase along the Protocol II family")
        root = newton_bisect(excess, lo, hi, xtol=1e-15)
    x2, x3 = _track(root, ref)
    seq = expand_protocol_II(root / nu, x2 / nu, x3 / nu, scale_N)
    design = _design("II", seq, eta, nu, scale_N, tau1=float(root / nu), tau2=float(x2 / nu), tau3=float(x3 / nu))
    _require_closed(design)
    return design


def _require_closed(design: GateDesign):
    if not design.accepted:
        raise NoConvergence(
            f"closure residuals {design.residual_Cc:.2e}, {design.residual_Cr:.2e} exceed {RESIDUAL_TOL}"
        )


@dataclass(frozen=True)
class FactorizedGate:
    """``exp(i theta sz1 sz2) exp(-i com_angle a^dag a) exp(-i stretch_angle b^dag b)``."""

    theta: float
    com_angle: float
    stretch_angle: float

    def qubit_phases(self) -> dict:
        from .fastgate import QUBIT_CONFIGS

        return {k: complex(np.exp(1j * self.theta * s1 * s2)) for k, (s1, s2) in QUBIT_CONFIGS.items()}


def factorized_gate(design: GateDesign, nu: float = 1.0) -> FactorizedGate:
    if not design.accepted:
        raise DesignRejected(
            f"design residuals {design.residual_Cc:.2e}, {design.residual_Cr:.2e} exceed {RESIDUAL_TOL}"
        )
    T = design.total_time_T
    return FactorizedGate(design.theta, nu * T, SQRT3 * nu * T)
