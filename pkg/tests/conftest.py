import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from nullcone import Tensor

settings.register_profile(
    "default", deadline=None, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


def random_complex_tensor(rng, dims):
    return Tensor(rng.normal(size=dims) + 1j * rng.normal(size=dims))


def random_int_tensor(rng, dims, lo=-3, hi=3):
    return Tensor.from_array(rng.integers(lo, hi + 1, size=dims))


def random_unitary(rng, n):
    Q, R = np.linalg.qr(rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)))
    return Q * (np.diag(R) / np.abs(np.diag(R)))


def random_sl(rng, n, scale=1.0):
    A = np.eye(n) + scale * (rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)))
    return A / np.linalg.det(A) ** (1.0 / n)


@pytest.fixture
def rng():
    return np.random.default_rng(20240517)


#: "[PASS] criterion ..." lines collected by the acceptance module
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
