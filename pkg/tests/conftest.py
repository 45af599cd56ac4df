import numpy as np
import pytest

from su4lindblad.basis import enumerate_basis
from su4lindblad.state import CoefficientState

# filled by tests/test_acceptance.py, printed after the run
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_state(rng, n_atoms, n_max, hermitian=False):
    table = enumerate_basis(n_atoms)
    shape = (len(table), n_max + 1, n_max + 1)
    st = CoefficientState(rng.normal(size=shape) + 1j * rng.normal(size=shape), table, n_max)
    return 0.5 * (st + st.adjoint()) if hermitian else st
