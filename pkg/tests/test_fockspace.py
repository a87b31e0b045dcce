import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ion_gate_forge.errors import BasisMismatch, NonHermitian, TruncationLeakage
from ion_gate_forge.fockspace import (
    FockSpace,
    Operator,
    StateVector,
    adaptive_dim,
    coherent_state,
    displacement_op,
    kick_matrix,
    ladder_ops,
    number_op,
    number_state,
    propagate,
    state_fidelity,
    tensor,
    thermal_dim,
    thermal_state,
    top_population,
)


def test_space_rejects_tiny_dim():
    with pytest.raises(ValueError):
        FockSpace(1)


def test_ladder_elements_dim2():
    a, adag = ladder_ops(FockSpace(2))
    assert a.matrix[0, 1] == 1.0
    assert np.allclose(a.matrix @ np.array([1, 0]), 0)
    assert np.array_equal(adag.matrix, a.matrix.T)


def test_ladder_sqrt_rule():
    a, _ = ladder_ops(FockSpace(3))
    assert a.matrix[1, 2] == pytest.approx(math.sqrt(2), abs=1e-15)


def test_commutator_deviates_only_at_top():
    a, adag = (op.matrix for op in ladder_ops(FockSpace(32)))
    comm = a @ adag - adag @ a - np.eye(32)
    assert np.max(np.abs(comm[:31, :31])) <= 1e-13
    assert abs(comm[31, 31]) > 1


def test_operators_match_space():
    space = FockSpace(7)
    for op in (*ladder_ops(space), number_op(space), displacement_op(space, 0.1)):
        assert op.matrix.shape == (7, 7)


def test_displacement_zero_is_identity():
    assert np.array_equal(displacement_op(FockSpace(16), 0.0).matrix, np.eye(16))


def test_displacement_vacuum_overlap():
    d = displacement_op(FockSpace(32), 0.1)
    assert abs(d.matrix[0, 0]) == pytest.approx(math.exp(-0.005), abs=1e-9)


def test_displacement_truncation_convergence():
    small = displacement_op(FockSpace(64), 1.5).matrix[:32, :32]
    large = displacement_op(FockSpace(128), 1.5).matrix[:32, :32]
    assert np.max(np.abs(small - large)) <= 1e-9


def test_displacement_moves_coherent_state():
    space = FockSpace(64)
    alpha = 0.4 + 0.3j
    out = displacement_op(space, 0.7) @ coherent_state(space, alpha)
    target = coherent_state(space, alpha - 0.7j)
    assert state_fidelity(out, target) == pytest.approx(1.0, abs=1e-12)
    # phase -p Re(alpha)
    assert np.angle(target.inner(out)) == pytest.approx(-0.7 * alpha.real, abs=1e-12)


def test_displacement_leakage_guard():
    with pytest.raises(TruncationLeakage):
        displacement_op(FockSpace(16), 3.0)


@given(st.floats(-2.0, 2.0))
@settings(max_examples=30, deadline=None)
def test_displacement_inverse(p):
    space = FockSpace(64)
    prod = (displacement_op(space, p) @ displacement_op(space, -p)).matrix
    keep = 64 - math.ceil(64 / 10)
    assert np.max(np.abs(prod[:keep, :keep] - np.eye(keep))) <= 1e-9


@given(st.floats(-3.0, 3.0), st.sampled_from([8, 32, 100]))
@settings(max_examples=30, deadline=None)
def test_kick_is_unitary(p, dim):
    u = Operator(kick_matrix(dim, p), dim)
    assert u.unitarity_error() <= 1e-10


def test_coherent_vacuum():
    assert np.array_equal(coherent_state(FockSpace(8), 0).amplitudes, np.eye(8)[0])


def test_coherent_mean_number():
    psi = coherent_state(FockSpace(32), 1.0)
    assert psi.expect(number_op(FockSpace(32))).real == pytest.approx(1.0, abs=1e-9)


def test_coherent_eigenrelation():
    space = FockSpace(32)
    alpha = 0.7 + 0.2j
    psi = coherent_state(space, alpha)
    a, _ = ladder_ops(space)
    assert np.linalg.norm((a @ psi).amplitudes - alpha * psi.amplitudes) <= 1e-8


def test_coherent_guard_raises():
    with pytest.raises(TruncationLeakage):
        coherent_state(FockSpace(32), 4.0)
    coherent_state(FockSpace(64), 4.0)


@given(st.complex_numbers(max_magnitude=2.0))
@settings(max_examples=40, deadline=None)
def test_coherent_doubling_dim(alpha):
    small = coherent_state(FockSpace(32), alpha).amplitudes
    large = coherent_state(FockSpace(64), alpha).amplitudes
    assert np.max(np.abs(small - large[:32])) < 1e-12


def test_thermal_zero_is_vacuum():
    rho = thermal_state(FockSpace(8), 0.0)
    assert rho.matrix[0, 0] == 1.0 and rho.trace() == 1.0


def test_thermal_geometric_law():
    p = thermal_state(FockSpace(64), 1.0).populations()
    assert p[0] == pytest.approx(0.5, abs=1e-10)
    assert p[1] == pytest.approx(0.25, abs=1e-10)


def test_thermal_mean():
    space = FockSpace(64)
    assert thermal_state(space, 2.0).expect(number_op(space)).real == pytest.approx(2.0, abs=1e-6)


def test_thermal_tail_guard():
    with pytest.raises(TruncationLeakage):
        thermal_state(FockSpace(16), 5.0)
    assert thermal_dim(5.0) == 128
    thermal_state(FockSpace(128), 5.0)


def test_thermal_density_valid():
    errs = thermal_state(FockSpace(64), 1.0).validity_errors()
    assert errs["hermiticity"] <= 1e-12 and errs["trace"] <= 1e-12 and errs["min_eigenvalue"] >= -1e-12


def test_propagate_zero_hamiltonian():
    space = FockSpace(8)
    psi = coherent_state(space, 0.3)
    out = propagate(Operator(np.zeros((8, 8)), space.dim), 3.0, psi)
    assert np.array_equal(out.amplitudes, psi.amplitudes)


def test_propagate_full_period():
    space = FockSpace(16)
    psi = coherent_state(space, 0.5)
    out = propagate(number_op(space), 2 * math.pi, psi)
    assert np.max(np.abs(out.amplitudes - psi.amplitudes)) <= 1e-12


def test_propagate_pi_pulse():
    omega = 0.7
    h = Operator(0.5 * omega * np.array([[0, 1], [1, 0]]), 2)
    out = propagate(h, math.pi / omega, StateVector(np.array([1, 0]), 2))
    assert np.allclose(out.amplitudes, [0, -1j], atol=1e-12)


def test_propagate_rejects_non_hermitian():
    with pytest.raises(NonHermitian):
        propagate(Operator(np.array([[0, 1], [0, 0]]), 2), 1.0, StateVector(np.array([1, 0]), 2))


def test_propagate_rejects_basis_mismatch():
    with pytest.raises(BasisMismatch):
        propagate(number_op(FockSpace(4)), 1.0, number_state(FockSpace(5), 0))


@given(st.integers(0, 2**31 - 1), st.integers(2, 64), st.floats(-3, 3), st.floats(-3, 3))
@settings(max_examples=25, deadline=None)
def test_propagate_semigroup(seed, dim, s, t):
    rng = np.random.default_rng(seed)
    m = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    h = Operator(0.5 * (m + m.conj().T), dim)
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    psi = StateVector(v / np.linalg.norm(v), dim)
    once = propagate(h, s + t, psi)
    twice = propagate(h, s, propagate(h, t, psi))
    assert np.max(np.abs(once.amplitudes - twice.amplitudes)) <= 1e-10
    assert abs(once.norm() - 1.0) <= 1e-10


def test_fidelity_examples():
    space = FockSpace(32)
    psi = coherent_state(space, 0.3)
    assert state_fidelity(psi, psi) == pytest.approx(1.0, abs=1e-14)
    assert state_fidelity(number_state(space, 0), number_state(space, 1)) == 0.0
    assert state_fidelity(number_state(space, 0), psi) == pytest.approx(math.exp(-0.09), abs=1e-9)


def test_fidelity_mixed_forms_agree():
    space = FockSpace(32)
    a, b = coherent_state(space, 0.3), coherent_state(space, -0.2j)
    pure = state_fidelity(a, b)
    assert state_fidelity(a, b.to_density()) == pytest.approx(pure, abs=1e-12)
    assert state_fidelity(a.to_density(), b.to_density()) == pytest.approx(pure, abs=1e-8)


def test_tensor_dims():
    op = tensor(number_op(FockSpace(2)), number_op(FockSpace(3)))
    assert op.dims == (2, 3) and op.matrix.shape == (6, 6)


def test_top_population():
    assert top_population(np.r_[np.zeros(18), 0.5, 0.5]) == 1.0
    assert top_population(np.r_[1.0, np.zeros(19)]) == 0.0


def test_adaptive_dim_doubles():
    assert adaptive_dim(lambda d: 1.0 if d < 128 else 0.0) == 128
    with pytest.raises(TruncationLeakage):
        adaptive_dim(lambda d: 1.0, max_dim=256)
