import numpy as np
import pytest

from sketchlsr.linalg import RegressionProblem

_ACCEPTANCE = {}


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_problem(gen, n, d, kappa=1.0):
    """Gaussian-ish problem with prescribed condition number."""
    U, _ = np.linalg.qr(gen.standard_normal((n, d)))
    V, _ = np.linalg.qr(gen.standard_normal((d, d)))
    sigma = np.geomspace(kappa, 1.0, d)
    X = (U * sigma) @ V.T
    return RegressionProblem(X, gen.standard_normal(n))


@pytest.fixture
def make_problem():
    return random_problem


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance.py" in report.nodeid:
        name = report.nodeid.split("::")[-1]
        _ACCEPTANCE[name] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in _ACCEPTANCE.items():
        status = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{status}  {name}")
