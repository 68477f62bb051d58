import os
import sys

from hypothesis import HealthCheck, settings

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

import pytest


@pytest.fixture(scope="session")
def plan_n0():
    from radial_uniqueness import build_plan
    return build_plan(0)


@pytest.fixture(scope="session")
def cert_n0(plan_n0):
    from radial_uniqueness import execute
    return execute(plan_n0)


def pytest_terminal_summary(terminalreporter):
    import acceptance_log
    if acceptance_log.LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(acceptance_log.LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
