from __future__ import annotations

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("kchroma", deadline=None, derandomize=True, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("kchroma")


def pytest_configure(config):
    config._acceptance_lines = {}


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config._acceptance_lines
    if lines:
        terminalreporter.section("acceptance criteria")
        for n in sorted(lines):
            terminalreporter.write_line(lines[n])


@pytest.fixture
def acceptance(request):
    """record(n, passed, detail): one summary line per criterion."""

    def record(n: int, passed: bool, detail: str) -> None:
        line = f"criterion {n:2d} {'PASS' if passed else 'FAIL'}: {detail}"
        request.config._acceptance_lines[n] = line
        print(line)

    return record
