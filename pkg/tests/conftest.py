import sys
import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "gateforge", deadline=None, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("gateforge")


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def random_hermitian(rng, d, radius=None):
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    h = (a + a.conj().T) / 2
    if radius is not None:
        h *= radius / np.abs(np.linalg.eigvalsh(h)).max()
    return h


def random_unitary(rng, d):
    q, r = np.linalg.qr(rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d)))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def multiset_distance(got, want):
    """Largest gap after greedily pairing each wanted value with its nearest match."""
    got = list(np.asarray(got, dtype=complex))
    worst = 0.0
    for z in np.asarray(want, dtype=complex):
        k = int(np.argmin([abs(g - z) for g in got]))
        worst = max(worst, abs(got.pop(k) - z))
    return worst


def pytest_terminal_summary(terminalreporter):
    acceptance = sys.modules.get("test_acceptance")
    if acceptance is not None and acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in acceptance.RESULTS:
            terminalreporter.write_line(line)
