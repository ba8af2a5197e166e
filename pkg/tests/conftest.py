import numpy as np
import pytest

from pqwolff import Measure, NFunction, SublinearLaw


@pytest.fixture(scope="session")
def nf23():
    return NFunction(2.0, 3.0, 3)


@pytest.fixture(scope="session")
def law23(nf23):
    return SublinearLaw(0.25, nf23)


@pytest.fixture(scope="session")
def ball():
    return Measure.uniform_ball(3)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE = {}


@pytest.fixture
def record():
    """record(criterion, ok, detail) stores one acceptance line and prints it."""
    def _record(num, ok, detail):
        line = f"[acceptance {num:2d}] {'PASS' if ok else 'FAIL'}  {detail}"
        ACCEPTANCE[num] = line
        print(line)
        return ok
    return _record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for num in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[num])
