import numpy as np
import pytest

from merext import BoundarySamples, annulus, unit_disc

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def disc():
    return unit_disc()


@pytest.fixture(scope="session")
def ring():
    """Annulus 0.5 < |z| < 1."""
    return annulus(0.5)


@pytest.fixture
def sample():
    def make(domain, func):
        return BoundarySamples.from_function(domain, func)
    return make


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or report.when != "call":
        return
    status = "PASS" if report.passed else "FAIL"
    ACCEPTANCE_LINES.append(f"{status}  criterion {marker.args[0]:>2}: {marker.args[1]}")


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion")
