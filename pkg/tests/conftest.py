import math

import numpy as np
import pytest
from scipy.linalg import null_space

from ion_gate_forge.fastgate import PulseSequence
from ion_gate_forge.protocols import design_protocol_I, design_protocol_II

ETA = 0.178
SEED = 20260415


def random_sequence(rng, max_events=8, max_z=3):
    n = int(rng.integers(1, max_events + 1))
    z = rng.integers(1, max_z + 1, n) * rng.choice([-1, 1], n)
    t = np.sort(rng.uniform(0, 2 * math.pi, n))
    return PulseSequence(tuple(zip(z.astype(float), t)))


def closed_sequence(rng, n=6):
    """Real-weighted sequence whose COM and stretch sums vanish."""
    t = np.sort(rng.uniform(0, 2 * math.pi, n))
    s3 = math.sqrt(3)
    m = np.vstack([np.cos(t), np.sin(t), np.cos(s3 * t), np.sin(s3 * t)])
    z = null_space(m)[:, 0]
    z *= 2.0 / np.max(np.abs(z))
    return PulseSequence(tuple(zip(z, t)))


@pytest.fixture(scope="session")
def design_I():
    return design_protocol_I(ETA)


@pytest.fixture(scope="session")
def design_II():
    return design_protocol_II(ETA, 1.0, 0.3 * 2 * math.pi)


@pytest.fixture
def rng():
    return np.random.default_rng(SEED)
