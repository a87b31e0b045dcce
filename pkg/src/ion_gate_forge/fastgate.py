"""Closed-form engine for kicked two-ion phase gates.

A gate is a time-ordered list of kick events ``(z_k, t_k)``.  Each event
displaces the COM mode by ``p = 2 z eta_c (s1 + s2)`` and the stretch mode
by ``p = z eta_r (s1 - s2)``, where ``s1, s2 = +-1`` are the sigma_z
eigenvalues of the two ions.  Between events the modes rotate freely at
``nu`` and ``sqrt(3) nu``.  Coherent amplitudes follow
``alpha -> alpha - i p`` at a kick and ``alpha -> alpha exp(-i nu dt)``
in between.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

SQRT3 = math.sqrt(3.0)
QUBIT_CONFIGS = {"pp": (1, 1), "pm": (1, -1), "mp": (-1, 1), "mm": (-1, -1)}
MODES = ("com", "stretch")


@dataclass(frozen=True)
class PulseSequence:
    """Kick events ``(z, t)`` with strictly increasing times (units of 1/nu)."""

    events: tuple = ()

    def __post_init__(self):
        events = tuple((float(z), float(t)) for z, t in self.events)
        for (_, t0), (_, t1) in zip(events, events[1:]):
            if not t1 > t0:
                raise DomainError(f"event times must be strictly increasing ({t0} then {t1})")
        object.__setattr__(self, "events", events)

    @classmethod
    def merged(cls, events) -> "PulseSequence":
        """Sort events and combine those at equal times by summing weights."""
        acc = {}
        for z, t in events:
            acc[float(t)] = acc.get(float(t), 0.0) + float(z)
        return cls(tuple((z, t) for t, z in sorted(acc.items())))

    def __len__(self):
        return len(self.events)

    @property
    def z(self) -> np.ndarray:
        return np.array([e[0] for e in self.events], dtype=float)

    @property
    def t(self) -> np.ndarray:
        return np.array([e[1] for e in self.events], dtype=float)

    @property
    def pulse_pairs(self) -> float:
        return float(np.sum(np.abs(self.z)))

    @property
    def duration(self) -> float:
        return self.events[-1][1] - self.events[0][1] if self.events else 0.0

    @property
    def t_first(self) -> float:
        return self.events[0][1] if self.events else 0.0

    def shifted(self, dt: float) -> "PulseSequence":
        return PulseSequence(tuple((z, t + dt) for z, t in self.events))

    def scaled(self, factor: float) -> "PulseSequence":
        return PulseSequence(tuple((factor * z, t) for z, t in self.events))


def kick_scale(mode: str, config, eta: float) -> float:
    """Displacement per unit kick weight for one mode and qubit configuration."""
    s1, s2 = QUBIT_CONFIGS[config] if isinstance(config, str) else config
    if mode == "com":
        return 2.0 * eta / math.sqrt(2.0) * (s1 + s2)
    if mode == "stretch":
        return eta * (4.0 / 3.0) ** 0.25 * (s1 - s2)
    raise ValueError(f"unknown mode {mode!r}")


def mode_frequency(mode: str, nu: float) -> float:
    return nu if mode == "com" else SQRT3 * nu


def commensurability(seq: PulseSequence, nu: float = 1.0) -> tuple[complex, complex]:
    """``(sum z e^{-i nu t}, sum z e^{-i sqrt3 nu t})``; both vanish for a closed gate."""
    z, t = seq.z, seq.t
    return complex(np.sum(z * np.exp(-1j * nu * t))), complex(np.sum(z * np.exp(-1j * SQRT3 * nu * t)))


def gate_phase(seq: PulseSequence, eta: float, nu: float = 1.0) -> float:
    """Two-qubit phase Theta of ``exp(i Theta sz1 sz2)`` produced by the sequence."""
    z, t = seq.z, seq.t
    if z.size < 2:
        return 0.0
    dt = nu * (t[:, None] - t[None, :])
    kernel = np.sin(SQRT3 * dt) / SQRT3 - np.sin(dt)
    pairs = np.triu(np.outer(z, z) * kernel, k=1)
    return float(4.0 * eta**2 * pairs.sum())


def _rotation_angles(seq: PulseSequence, nu_mode: float) -> np.ndarray:
    # cumulative free-rotation angle at each event, measured from the first event
    return nu_mode * (seq.t - seq.t_first)


def final_amplitude(seq: PulseSequence, nu_mode: float, kick: float, alpha0: complex) -> complex:
    """Coherent amplitude right after the last kick."""
    if not seq.events:
        return complex(alpha0)
    theta = _rotation_angles(seq, nu_mode)
    p = kick * seq.z
    return complex(alpha0 * np.exp(-1j * theta[-1]) - 1j * np.sum(p * np.exp(1j * (theta - theta[-1]))))


def closure_defect(seq: PulseSequence, nu_mode: float, kick: float) -> float:
    """``|sum p_k e^{i theta_k}|``: distance of the final amplitude from free evolution."""
    if not seq.events:
        return 0.0
    theta = _rotation_angles(seq, nu_mode)
    return float(abs(np.sum(kick * seq.z * np.exp(1j * theta))))


def accumulated_phase(seq: PulseSequence, nu_mode: float, kick: float, alpha0: complex) -> float:
    """Phase xi in ``U|alpha> = e^{i xi} |alpha~>`` for one mode."""
    if not seq.events:
        return 0.0
    theta = _rotation_angles(seq, nu_mode)
    p = kick * seq.z
    # sin(theta_k - theta_m) for k < m
    kernel = np.sin(theta[:, None] - theta[None, :])
    quad = np.triu(np.outer(p, p) * kernel, k=1).sum()
    lin = np.real(alpha0 * np.sum(p * np.exp(-1j * theta)))
    return float(-quad - lin)


@dataclass(frozen=True)
class TrajectorySample:
    t: float
    X: float
    P: float
    mode: str | None = None
    qubit_config: tuple | None = None

    @property
    def amplitude(self) -> complex:
        return complex(self.X, self.P) / math.sqrt(2.0)


def coherent_trajectory(
    seq: PulseSequence,
    nu_mode: float,
    kick: float,
    alpha0: complex,
    sample_dt: float,
    t_start: float | None = None,
    t_end: float | None = None,
    mode: str | None = None,
    qubit_config: tuple | None = None,
) -> list[TrajectorySample]:
    """Phase-space samples ``(X + iP)/sqrt2 = <a>`` along the kicked orbit.

    Kick instants are sampled twice, before and after the jump.  The orbit
    starts at ``t_start`` (default: first event) and runs to ``t_end``
    (default: last event).
    """
    if not sample_dt > 0:
        raise DomainError("sample_dt must be positive")
    t_start = seq.t_first if t_start is None else float(t_start)
    t_end = (seq.events[-1][1] if seq.events else t_start) if t_end is None else float(t_end)
    if seq.events and t_start > seq.t_first:
        raise DomainError("trajectory must start at or before the first kick")

    out = []
    root2 = math.sqrt(2.0)

    def emit(t, a):
        out.append(TrajectorySample(t, root2 * a.real, root2 * a.imag, mode, qubit_config))

    def free(a, dt):
        return a * complex(math.cos(nu_mode * dt), -math.sin(nu_mode * dt))

    t_now, a_now = t_start, complex(alpha0)
    first = 0
    for z, tk in seq.events:
        n = first
        while t_now + n * sample_dt < tk - 1e-12 * max(1.0, abs(tk)):
            emit(t_now + n * sample_dt, free(a_now, n * sample_dt))
            n += 1
        pre = free(a_now, tk - t_now)
        emit(tk, pre)
        post = pre - 1j * kick * z
        emit(tk, post)
        t_now, a_now, first = tk, post, 1
    n = first
    while t_now + n * sample_dt < t_end - 1e-12 * max(1.0, abs(t_end)):
        emit(t_now + n * sample_dt, free(a_now, n * sample_dt))
        n += 1
    if t_end > t_now or not out:
        emit(t_end, free(a_now, t_end - t_now))
    return out


def _max_abs_cos(hi: float, span: float) -> float:
    """``max |cos x|`` for ``x`` in ``[hi - span, hi]``."""
    lo = hi - span
    if math.ceil(lo / math.pi) * math.pi <= hi:
        return 1.0
    return max(abs(math.cos(lo)), abs(math.cos(hi)))


def max_excursion(seq: PulseSequence, eta: float, nu: float = 1.0) -> tuple[float, float]:
    """Largest stretch-mode position and momentum over the gate, ground-state units.

    Position is ``<x>/a0 = 2 Re beta`` and momentum ``<p> a0 = Im beta`` with
    ``a0`` the stretch-mode ground-state size; maxima are exact along the
    free arcs and taken over the qubit configurations that drive the mode.
    """
    if not seq.events:
        return 0.0, 0.0
    nu_r = SQRT3 * nu
    x_max = p_max = 0.0
    for config in ("pm", "mp"):
        kick = kick_scale("stretch", config, eta)
        beta = 0j
        events = seq.events
        for i, (z, tk) in enumerate(events):
            beta = beta - 1j * kick * z
            r, ang = abs(beta), math.atan2(beta.imag, beta.real)
            span = nu_r * (events[i + 1][1] - tk) if i + 1 < len(events) else 0.0
            x_max = max(x_max, 2.0 * r * _max_abs_cos(ang, span))
            p_max = max(p_max, r * _max_abs_cos(ang - math.pi / 2, span))
            beta = beta * complex(math.cos(span), -math.sin(span))
    return x_max, p_max
