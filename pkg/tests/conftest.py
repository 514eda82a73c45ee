import functools

import numpy as np
import pytest

from bmsakit.pauli import PauliString

ACCEPTANCE_LINES = []


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def dense_pauli(label):
    return PauliString.from_label(label).to_matrix()


@functools.lru_cache(maxsize=None)
def all_stabilizer_states(n):
    """Every stabilizer state on n qubits as columns (from the basis enumeration)."""
    from bmsakit.bmsa import iter_bases

    return np.hstack([key.basis_states() for key in iter_bases(n)])


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
