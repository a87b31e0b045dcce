import math
import time

import numpy as np
import pytest

from conftest import ETA
from ion_gate_forge.errors import DesignRejected, DomainError
from ion_gate_forge.fastgate import QUBIT_CONFIGS, PulseSequence, commensurability, gate_phase, max_excursion
from ion_gate_forge.protocols import (
    GateDesign,
    custom_design,
    design_protocol_I,
    design_protocol_II,
    expand_protocol_I,
    expand_protocol_II,
    factorized_gate,
    protocol_I_times,
)

PERIOD = 2 * math.pi


def test_expand_protocol_I_events():
    seq = expand_protocol_I(0.5, 0.6, 0.1, 1)
    assert seq.events == ((0.5, -0.6), (1.0, -0.1), (-1.0, 0.1), (-0.5, 0.6))
    assert seq.duration == pytest.approx(1.2)


def test_expand_protocol_I_antisymmetry():
    g, t1, t2, n = 0.7, 2.9, 0.4, 3
    cc, cr = commensurability(expand_protocol_I(g, t1, t2, n))
    assert cc.real == pytest.approx(0, abs=1e-13) and cr.real == pytest.approx(0, abs=1e-13)
    assert cc.imag == pytest.approx(2 * n * (g * math.sin(t1) + math.sin(t2)), abs=1e-13)


@pytest.mark.parametrize("args", [(1.2, 0.6, 0.1, 1), (0.5, 0.1, 0.6, 1), (0.5, 0.6, 0.1, 0)])
def test_expand_protocol_I_domain(args):
    with pytest.raises(DomainError):
        expand_protocol_I(*args)


def test_expand_protocol_II():
    seq = expand_protocol_II(0.9, 0.5, 0.2, 1)
    assert seq.pulse_pairs == 14 and seq.duration == pytest.approx(1.8)
    cc, _ = commensurability(seq)
    assert cc.real == pytest.approx(0, abs=1e-13)
    assert cc.imag == pytest.approx(2 * (-2 * math.sin(0.9) + 3 * math.sin(0.5) - 2 * math.sin(0.2)), abs=1e-13)
    assert expand_protocol_II(0.9, 0.5, 0.2, 3).pulse_pairs == 42


def test_expanders_deterministic():
    assert expand_protocol_II(0.9, 0.5, 0.2, 2) == expand_protocol_II(0.9, 0.5, 0.2, 2)


@pytest.mark.parametrize("gamma", [0.05, 0.3, 0.6, 0.9, 0.99])
def test_protocol_I_times_close(gamma):
    x1, x2 = protocol_I_times(gamma)
    assert gamma * math.sin(x1) + math.sin(x2) == pytest.approx(0, abs=1e-12)
    s = math.sqrt(3)
    assert gamma * math.sin(s * x1) + math.sin(s * x2) == pytest.approx(0, abs=1e-12)


def test_design_protocol_I(design_I):
    assert abs(design_I.tau1 / PERIOD - 0.538) <= 0.01
    assert abs(design_I.total_time_T / PERIOD - 1.08) <= 0.02
    assert design_I.residual_Cc <= 1e-9 and design_I.residual_Cr <= 1e-9
    assert gate_phase(design_I.sequence(), ETA) == pytest.approx(design_I.theta, abs=1e-12)
    assert design_I.theta == pytest.approx(math.pi / 4, abs=1e-12)
    assert design_I.total_time_T == pytest.approx(2 * design_I.tau1)


def test_design_protocol_I_speed():
    start = time.perf_counter()
    design_protocol_I(ETA)
    assert time.perf_counter() - start < 1.0


def test_design_rejects_zero_target():
    with pytest.raises(DomainError):
        design_protocol_I(ETA, 1.0, 0.0)
    with pytest.raises(DomainError):
        design_protocol_II(ETA, 1.0, 1.0, 0.0)


def test_design_protocol_II(design_II):
    assert design_II.residual_Cc <= 1e-9 and design_II.residual_Cr <= 1e-9
    assert design_II.theta == pytest.approx(math.pi / 4, abs=1e-9)
    assert design_II.pulse_pairs_Np == 14 * design_II.scale_N
    assert design_II.total_time_T <= 0.3 * PERIOD + 1e-12
    cc, cr = commensurability(design_II.sequence())
    assert max(abs(cc), abs(cr)) <= 1e-9


def test_protocol_II_smallest_N(design_II):
    # one fewer repetition cannot reach the target at the requested time
    from ion_gate_forge.protocols import _protocol_II_theta, protocol_II_solutions

    x1 = 0.15 * PERIOD
    best = max(_protocol_II_theta(x1, a, b, ETA) for a, b in protocol_II_solutions(x1))
    assert (design_II.scale_N - 1) ** 2 * best < math.pi / 4 <= design_II.scale_N**2 * best


def test_protocol_II_trend():
    rows = []
    for T in np.geomspace(0.02, 0.2, 6):
        d = design_protocol_II(ETA, 1.0, T * PERIOD)
        rows.append((d.pulse_pairs_Np, *max_excursion(d.sequence(), ETA)))
    rows = np.array(rows)
    assert np.all(np.diff(rows, axis=0) <= 0)


def test_design_json_roundtrip(design_I, design_II):
    for d in (design_I, design_II):
        again = GateDesign.from_json(d.to_json())
        assert again == d
        assert "events" not in d.to_dict()


def test_custom_design_roundtrip():
    d = custom_design(PulseSequence(((1.0, 0.0), (-1.0, 0.5))), ETA)
    again = GateDesign.from_json(d.to_json())
    assert again.sequence() == d.sequence()
    assert not d.accepted


def test_factorized_gate(design_I):
    f = factorized_gate(design_I)
    phases = f.qubit_phases()
    assert phases["pp"] == pytest.approx(np.exp(1j * math.pi / 4))
    assert phases["pm"] == pytest.approx(np.exp(-1j * math.pi / 4))
    assert f.com_angle == pytest.approx(design_I.total_time_T)
    assert f.stretch_angle == pytest.approx(math.sqrt(3) * design_I.total_time_T)


def test_factorized_gate_zero_theta():
    d = custom_design(PulseSequence(), ETA)
    assert all(v == 1 for v in factorized_gate(d).qubit_phases().values())
    assert set(factorized_gate(d).qubit_phases()) == set(QUBIT_CONFIGS)


def test_factorized_gate_rejects_open():
    with pytest.raises(DesignRejected):
        factorized_gate(custom_design(PulseSequence(((1.0, 0.0),)), ETA))
