import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_field(rng, n_modes, decay=1.0):
    from marcus_csf.spectral import SpectralField

    k = np.arange(1, n_modes + 1, dtype=float)
    c = (rng.standard_normal(n_modes) + 1j * rng.standard_normal(n_modes)) * k**-decay
    return SpectralField(c)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
