"""Truncated Fock-space linear algebra.

States and operators carry an ordered tuple of factor dimensions (``dims``)
so that composite spaces such as ``internal (x) motion`` can be checked for
compatibility.  Everything here is immutable: arrays are copied on
construction and flagged read-only.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache, reduce

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import BasisMismatch, NonHermitian, TruncationLeakage

LEAKAGE_TOL = 1e-10
DEFAULT_DIM = 32
MAX_DIM = 4096


def _frozen(array, dtype=complex):
    out = np.array(array, dtype=dtype, copy=True)
    out.setflags(write=False)
    return out


def _as_dims(dims):
    if isinstance(dims, (int, np.integer)):
        return (int(dims),)
    return tuple(int(d) for d in dims)


@dataclass(frozen=True)
class FockSpace:
    """Number states ``|0>, ..., |dim-1>`` of one harmonic mode."""

    dim: int

    def __post_init__(self):
        if int(self.dim) != self.dim or self.dim < 2:
            raise ValueError(f"Fock dimension must be an integer >= 2, got {self.dim!r}")
        object.__setattr__(self, "dim", int(self.dim))

    @property
    def top_levels(self) -> int:
        """Number of levels making up the top 10% of the space."""
        return max(1, math.ceil(self.dim / 10))

    def doubled(self) -> "FockSpace":
        return FockSpace(2 * self.dim)


@dataclass(frozen=True, eq=False)
class StateVector:
    amplitudes: np.ndarray
    dims: tuple

    def __post_init__(self):
        amps = _frozen(np.ravel(self.amplitudes))
        dims = _as_dims(self.dims)
        if amps.size != int(np.prod(dims)):
            raise BasisMismatch(f"{amps.size} amplitudes do not fit dims {dims}")
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "dims", dims)

    def __len__(self):
        return self.amplitudes.size

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def populations(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def inner(self, other: "StateVector") -> complex:
        """``<self|other>``."""
        _check_dims(self.dims, other.dims)
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def expect(self, op: "Operator") -> complex:
        _check_dims(self.dims, op.dims)
        return complex(np.vdot(self.amplitudes, op.matrix @ self.amplitudes))

    def kron(self, other: "StateVector") -> "StateVector":
        return StateVector(np.kron(self.amplitudes, other.amplitudes), self.dims + other.dims)

    def to_density(self) -> "DensityOperator":
        return DensityOperator(np.outer(self.amplitudes, self.amplitudes.conj()), self.dims)


@dataclass(frozen=True, eq=False)
class Operator:
    matrix: np.ndarray
    dims: tuple

    def __post_init__(self):
        mat = _frozen(self.matrix)
        dims = _as_dims(self.dims)
        n = int(np.prod(dims))
        if mat.shape != (n, n):
            raise BasisMismatch(f"matrix shape {mat.shape} does not match dims {dims}")
        object.__setattr__(self, "matrix", mat)
        object.__setattr__(self, "dims", dims)

    @classmethod
    def identity(cls, dims) -> "Operator":
        dims = _as_dims(dims)
        return cls(np.eye(int(np.prod(dims))), dims)

    def dag(self) -> "Operator":
        return Operator(self.matrix.conj().T, self.dims)

    def __matmul__(self, other):
        if isinstance(other, Operator):
            _check_dims(self.dims, other.dims)
            return Operator(self.matrix @ other.matrix, self.dims)
        if isinstance(other, StateVector):
            _check_dims(self.dims, other.dims)
            return StateVector(self.matrix @ other.amplitudes, self.dims)
        return NotImplemented

    def __add__(self, other):
        _check_dims(self.dims, other.dims)
        return Operator(self.matrix + other.matrix, self.dims)

    def __sub__(self, other):
        _check_dims(self.dims, other.dims)
        return Operator(self.matrix - other.matrix, self.dims)

    def __mul__(self, scalar):
        return Operator(scalar * self.matrix, self.dims)

    __rmul__ = __mul__

    def kron(self, other: "Operator") -> "Operator":
        return Operator(np.kron(self.matrix, other.matrix), self.dims + other.dims)

    def hermiticity_error(self) -> float:
        return float(np.max(np.abs(self.matrix - self.matrix.conj().T)))

    def unitarity_error(self) -> float:
        n = self.matrix.shape[0]
        return float(np.max(np.abs(self.matrix.conj().T @ self.matrix - np.eye(n))))

    def is_hermitian(self, tol=1e-12) -> bool:
        return self.hermiticity_error() <= tol

    def is_unitary(self, tol=1e-10) -> bool:
        return self.unitarity_error() <= tol


@dataclass(frozen=True, eq=False)
class DensityOperator:
    matrix: np.ndarray
    dims: tuple

    def __post_init__(self):
        mat = _frozen(self.matrix)
        dims = _as_dims(self.dims)
        n = int(np.prod(dims))
        if mat.shape != (n, n):
            raise BasisMismatch(f"matrix shape {mat.shape} does not match dims {dims}")
        object.__setattr__(self, "matrix", mat)
        object.__setattr__(self, "dims", dims)

    def trace(self) -> complex:
        return complex(np.trace(self.matrix))

    def expect(self, op: Operator) -> complex:
        _check_dims(self.dims, op.dims)
        return complex(np.trace(self.matrix @ op.matrix))

    def populations(self) -> np.ndarray:
        return np.real(np.diag(self.matrix)).copy()

    def validity_errors(self) -> dict:
        """Deviations from Hermiticity, unit trace and positivity."""
        evals = np.linalg.eigvalsh(0.5 * (self.matrix + self.matrix.conj().T))
        return {
            "hermiticity": float(np.max(np.abs(self.matrix - self.matrix.conj().T))),
            "trace": abs(self.trace() - 1.0),
            "min_eigenvalue": float(evals.min()),
        }


def _check_dims(a, b):
    if tuple(a) != tuple(b):
        raise BasisMismatch(f"basis {tuple(a)} does not match {tuple(b)}")


def tensor(*ops: Operator) -> Operator:
    return reduce(lambda x, y: x.kron(y), ops)


def ladder_ops(space: FockSpace) -> tuple[Operator, Operator]:
    """Lowering and raising operators with ``<n-1|a|n> = sqrt(n)``."""
    a = np.diag(np.sqrt(np.arange(1, space.dim, dtype=float)), 1)
    return Operator(a, space.dim), Operator(a.T, space.dim)


def number_op(space: FockSpace) -> Operator:
    return Operator(np.diag(np.arange(space.dim, dtype=float)), space.dim)


def number_state(space: FockSpace, n: int) -> StateVector:
    if not 0 <= n < space.dim:
        raise TruncationLeakage(f"number state |{n}> outside dim={space.dim}")
    amps = np.zeros(space.dim, dtype=complex)
    amps[n] = 1.0
    return StateVector(amps, space.dim)


def top_population(populations, dim=None) -> float:
    """Population held in the top 10% of levels of a single mode."""
    populations = np.asarray(populations)
    dim = populations.size if dim is None else dim
    k = max(1, math.ceil(dim / 10))
    return float(np.sum(populations[-k:]))


@lru_cache(maxsize=64)
def _quadrature_eig(dim: int):
    # a + a^dagger is real symmetric tridiagonal with zero diagonal
    evals, evecs = eigh_tridiagonal(np.zeros(dim), np.sqrt(np.arange(1, dim, dtype=float)))
    evals.setflags(write=False)
    evecs.setflags(write=False)
    return evals, evecs


def kick_matrix(dim: int, p: float) -> np.ndarray:
    """Dense ``exp(-i p (a + a^dagger))`` on a ``dim``-level truncation."""
    if p == 0.0:
        return np.eye(dim, dtype=complex)
    evals, evecs = _quadrature_eig(dim)
    return (evecs * np.exp(-1j * p * evals)) @ evecs.T


def apply_kick(amplitudes: np.ndarray, p: float) -> np.ndarray:
    """Apply ``exp(-i p (a + a^dagger))`` to a single-mode amplitude vector."""
    if p == 0.0:
        return amplitudes
    evals, evecs = _quadrature_eig(amplitudes.size)
    return evecs @ (np.exp(-1j * p * evals) * (evecs.T @ amplitudes))


def displacement_op(space: FockSpace, p: float, check: bool = True) -> Operator:
    """Kick operator ``exp(-i p (a + a^dagger))``; maps ``|alpha>`` to ``|alpha - i p>``."""
    mat = kick_matrix(space.dim, float(p))
    if check:
        leak = top_population(np.abs(mat[:, 0]) ** 2)
        if leak > LEAKAGE_TOL:
            raise TruncationLeakage(
                f"displacement p={p} leaks {leak:.2e} into the top levels of dim={space.dim}",
                population=leak,
            )
    return Operator(mat, space.dim)


def coherent_guard(alpha_abs: float) -> float:
    """Conservative truncation estimate for a coherent state of modulus ``alpha_abs``."""
    return alpha_abs**2 + 6.0 * alpha_abs + 10.0


def coherent_state(space: FockSpace, alpha: complex) -> StateVector:
    """Truncated coherent state; raises if the tail or the top levels carry > 1e-10."""
    alpha = complex(alpha)
    n = np.arange(space.dim)
    if alpha == 0:
        return StateVector((n == 0).astype(complex), space.dim)
    # alpha^n / sqrt(n!) in log space to avoid overflow
    log_mag = n * math.log(abs(alpha)) - 0.5 * np.array([math.lgamma(k + 1) for k in n])
    amps = np.exp(log_mag - 0.5 * abs(alpha) ** 2 + 1j * n * np.angle(alpha))
    probs = np.abs(amps) ** 2
    leak = max(0.0, 1.0 - probs.sum()) + top_population(probs)
    if leak > LEAKAGE_TOL:
        raise TruncationLeakage(
            f"coherent state |alpha|={abs(alpha):.3g} leaks {leak:.2e} at dim={space.dim}", population=leak
        )
    return StateVector(amps / np.linalg.norm(amps), space.dim)


def thermal_populations(nbar: float, dim: int) -> np.ndarray:
    if nbar < 0:
        raise ValueError("mean phonon number must be non-negative")
    if nbar == 0:
        probs = np.zeros(dim)
        probs[0] = 1.0
        return probs
    ratio = nbar / (1.0 + nbar)
    tail = ratio**dim
    if tail > LEAKAGE_TOL:
        raise TruncationLeakage(f"thermal tail {tail:.2e} beyond dim={dim} for nbar={nbar}")
    probs = ratio ** np.arange(dim) / (1.0 + nbar)
    return probs / probs.sum()


def thermal_state(space: FockSpace, nbar: float) -> DensityOperator:
    return DensityOperator(np.diag(thermal_populations(nbar, space.dim)), space.dim)


def thermal_dim(nbar: float, start: int = DEFAULT_DIM) -> int:
    """Smallest power-of-two dimension (>= start) whose thermal tail passes the guard."""
    dim = start
    while nbar > 0 and (nbar / (1.0 + nbar)) ** dim > LEAKAGE_TOL:
        dim *= 2
    return dim


def _eigh_hermitian(H: Operator, tol: float = 1e-10):
    err = H.hermiticity_error()
    if err > tol:
        raise NonHermitian(f"generator deviates from Hermitian by {err:.2e}")
    return np.linalg.eigh(0.5 * (H.matrix + H.matrix.conj().T))


def expm_hermitian(H: Operator, t: float) -> Operator:
    """``exp(-i H t)`` by eigendecomposition."""
    evals, evecs = _eigh_hermitian(H)
    return Operator((evecs * np.exp(-1j * evals * t)) @ evecs.conj().T, H.dims)


def propagate(H: Operator, t: float, psi: StateVector) -> StateVector:
    _check_dims(H.dims, psi.dims)
    evals, evecs = _eigh_hermitian(H)
    amps = evecs @ (np.exp(-1j * evals * t) * (evecs.conj().T @ psi.amplitudes))
    return StateVector(amps, psi.dims)


def _psd_sqrt(mat):
    evals, evecs = np.linalg.eigh(0.5 * (mat + mat.conj().T))
    return (evecs * np.sqrt(np.clip(evals, 0.0, None))) @ evecs.conj().T


def state_fidelity(a, b) -> float:
    """Fidelity between pure or mixed states (squared-overlap convention)."""
    _check_dims(a.dims, b.dims)
    if isinstance(a, StateVector) and isinstance(b, StateVector):
        f = abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2
    elif isinstance(a, StateVector):
        f = np.real(np.vdot(a.amplitudes, b.matrix @ a.amplitudes))
    elif isinstance(b, StateVector):
        f = np.real(np.vdot(b.amplitudes, a.matrix @ b.amplitudes))
    else:
        root = _psd_sqrt(a.matrix)
        inner = _psd_sqrt(root @ b.matrix @ root)
        f = np.real(np.trace(inner)) ** 2
    return float(min(1.0, max(0.0, f)))


def adaptive_dim(leakage_of, start: int = DEFAULT_DIM, max_dim: int = MAX_DIM) -> int:
    """Double ``start`` until ``leakage_of(dim)`` drops below the leakage tolerance."""
    dim = start
    while dim <= max_dim:
        if leakage_of(dim) < LEAKAGE_TOL:
            return dim
        dim *= 2
    raise TruncationLeakage(f"no truncation up to dim={max_dim} passes the leakage guard")


def partial_trace_last(psi: StateVector) -> np.ndarray:
    """Reduced density matrix of the last tensor factor."""
    last = psi.dims[-1]
    rest = len(psi) // last
    m = psi.amplitudes.reshape(rest, last)
    return m.T @ m.conj()
