import sys

import pytest

from omitlab.params import SystemConfig

GAMMA_C = 6.43e6
J = 12.86e6
MHZ = 1e6


@pytest.fixture
def cfg():
    return SystemConfig()


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[number])
