import numpy as np
import pytest

from gqr.constants import AMU
from gqr.gravity import SourceSpec
from gqr.scattering import TestParticleSpec

M_1E9_AMU = 1e9 * AMU


@pytest.fixture
def source():
    # d = 100 nm, symmetric about y = 0
    return SourceSpec(M_1E9_AMU, 1e-7, (-50e-9, 50e-9), 10e-9)


@pytest.fixture
def test_particle():
    return TestParticleSpec(1e6 * AMU, 1e-3, 1e-6)


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        ok, detail = results[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
