import numpy as np
import pytest

from crsched.model import ScenarioConfig

_ACCEPTANCE: list[tuple[str, bool, str]] = []


@pytest.fixture(scope="session")
def acceptance_log():
    return _ACCEPTANCE


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in _ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}")


def random_config(rng, N=None, energy=3.0, queue=3.0, data=2.0, isr=(0.05, 20.0), name="rand"):
    """Small random instance with gains drawn so every cap can bind."""
    if N is None:
        N = int(rng.integers(1, 4))
    rho = rng.uniform(0.1, 1.0)
    g11 = rng.uniform(0.5, 2.0, N)
    ratio = np.exp(rng.uniform(np.log(isr[0]), np.log(isr[1]), N))
    g21 = rho * g11 / ratio
    return ScenarioConfig(
        N=N,
        tau=1.0,
        P0=1.0,
        N0=rng.uniform(0.1, 1.0),
        rho=rho,
        g11=g11,
        g12=rng.uniform(0.0, 1.0, N),
        g21=g21,
        g22=rng.uniform(0.1, 2.0, N),
        Ea0=rng.uniform(0, energy),
        Ea=rng.uniform(0, energy, N),
        Da=rng.uniform(0, data, N),
        Q0=rng.uniform(0, queue),
        name=name,
    )


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
