import numpy as np
import pytest

from finite_blt.lattice import LatticeParams, Signal


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def random_signal(rng, M, N):
    lat = LatticeParams(M, N)
    return Signal(lat, rng.standard_normal(lat.d) + 1j * rng.standard_normal(lat.d))


# one line per acceptance criterion, filled in by tests/test_acceptance.py
ACCEPTANCE_RESULTS: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_RESULTS):
        ok, detail = ACCEPTANCE_RESULTS[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
