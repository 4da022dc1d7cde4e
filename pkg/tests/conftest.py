from pathlib import Path

import pytest
from hypothesis import settings

from toeplitz_ergodic import builtin_testfunction, parse_symbol

settings.register_profile("default", deadline=None, max_examples=40)
settings.load_profile("default")

GOLDEN = Path(__file__).parent / "golden"


@pytest.fixture(scope="session")
def cos2():
    return parse_symbol("cos2")


@pytest.fixture(scope="session")
def shift():
    return parse_symbol("mode:1")


@pytest.fixture(scope="session")
def zeta2():
    return parse_symbol("zeta2")


@pytest.fixture(scope="session")
def golden_dir():
    return GOLDEN


@pytest.fixture(scope="session")
def unit_plateau():
    # identically 1 on [0, 4], covering the whole range of |2 cos|^2
    return builtin_testfunction("plateau:0,4,0.5")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    report = getattr(config, "_acceptance_report", None)
    if report:
        terminalreporter.section("acceptance criteria")
        for k in sorted(report):
            terminalreporter.write_line(report[k])
