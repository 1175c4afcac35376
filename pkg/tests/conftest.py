import numpy as np
import pytest

from sensorphonon.bath import BathKernel, BathParams
from sensorphonon.model import EmitterParams, SensorParams

FIG2_BATH = BathParams(alpha=0.027, nu_c=2.2, temperature=4.0)
GAMMA = 1.0 / 700.0


def random_hermitian(rng, n):
    m = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return 0.5 * (m + m.conj().T)


def random_density(rng, n):
    m = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    rho = m @ m.conj().T
    return rho / np.trace(rho)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def fig2_kernel():
    k = BathKernel(FIG2_BATH)
    k.table()
    return k


@pytest.fixture
def fig2_emitter():
    return EmitterParams(rabi=0.05, gamma=GAMMA)


@pytest.fixture
def fig2_sensor():
    return SensorParams(linewidth=1e-4, coupling=1e-6)


# one pass/fail line per acceptance criterion, printed at the end of the session
ACCEPTANCE_LINES = []


@pytest.fixture
def criterion(request):
    """Record ``(label, passed, detail)`` for the acceptance summary, then assert."""

    def report(label, passed, detail):
        line = f"{'PASS' if passed else 'FAIL'}  {label}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert passed, f"{label}: {detail}"

    return report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
