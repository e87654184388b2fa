"""Shared test setup: backend warmup and the acceptance summary block."""

import pytest

from hardyz.backends import get_backend

# collected by test_acceptance, printed once at the end of the run
ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session", autouse=True)
def _warm_backend():
    # compile the kernels once so timed assertions measure numerics, not JIT
    get_backend().warmup()
    yield


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in ACCEPTANCE_LINES:
        terminalreporter.write_line(line)
