import numpy as np
import pytest

from cssel.testbeds import gen_spectrum, geometric_spectrum


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_orthonormal(rng, n, k):
    return np.linalg.qr(rng.standard_normal((n, k)))[0]


def mixed_spectrum_matrix(i, m=40, n=30):
    """Seeded instance ``i`` from a rotating family of spectra."""
    t = min(m, n)
    kind = i % 4
    if kind == 0:
        sig = geometric_spectrum(t, 0.8)
    elif kind == 1:
        sig = 1.0 / np.arange(1, t + 1)
    elif kind == 2:
        sig = np.concatenate([np.full(5, 10.0), np.linspace(1.0, 0.1, t - 5)])
    else:
        return np.random.default_rng(1000 + i).standard_normal((m, n))
    return gen_spectrum(m, n, sig, seed=1000 + i)


# one verdict line per acceptance criterion, printed after the run
ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for line in ACCEPTANCE:
        terminalreporter.write_line(line)
