import numpy as np
import pytest

from killing_lab import clifford, geometry, sasaki, warped

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def s3():
    return geometry.su2()


@pytest.fixture(scope="session")
def s3_spinor():
    from killing_lab.spinorfield import SpinorField, constant_killing_spinors

    rep = clifford.build_rep(3)
    s = constant_killing_spinors(geometry.su2(), rep, 0.5)[:, 0]
    return SpinorField(lambda x: s, rep, constant=True)


@pytest.fixture(scope="session")
def h4():
    return warped.build_warped(3, 0.5)


@pytest.fixture(scope="session")
def hopf_bundle():
    return sasaki.hopf()


@pytest.fixture(scope="session")
def m5_bundle():
    return sasaki.m5()


@pytest.fixture(scope="session")
def default_report():
    from killing_lab import harness

    return harness.run_suite("default")
