import sys

import numpy as np
import pytest
from hypothesis import strategies as st


def random_density(rng, dim=2, rank=None):
    rank = dim if rank is None else rank
    g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    m = g @ g.conj().T
    return m / np.trace(m).real


def random_hermitian(rng, dim=4, scale=1.0):
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return scale * (g + g.conj().T) / 2


def random_qubit_with_floor(rng, floor):
    while True:
        r = random_density(rng, 2)
        if r[0, 0].real >= floor:
            return r


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


@st.composite
def qubit_states(draw):
    """Valid qubit density matrices parametrised by a Bloch vector."""
    x = draw(st.floats(-1, 1))
    y = draw(st.floats(-1, 1))
    z = draw(st.floats(-1, 1))
    n = np.sqrt(x * x + y * y + z * z)
    if n > 1:
        x, y, z = x / n, y / n, z / n
    return 0.5 * np.array([[1 + z, x - 1j * y], [x + 1j * y, 1 - z]])


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = sorted(getattr(mod, "REPORT", []), key=lambda s: int(s.split("[")[1].split("]")[0]))
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
