"""Shared pytest plumbing for the acceptance gate.

Criterion checks register a one-line verdict through the ``criterion``
fixture; the lines are replayed in a dedicated terminal section after the
run so the state of every shipped guarantee is visible in one place, pass
or fail.
"""

import pytest

_lines = {}


@pytest.fixture
def criterion():
    """Record '[PASS|FAIL] criterion N: detail' and assert the verdict."""

    def check(num, ok, detail):
        _lines[num] = f"[{'PASS' if ok else 'FAIL'}] criterion {num}: {detail}"
        assert ok, f"criterion {num}: {detail}"

    return check


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _lines:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_lines):
        terminalreporter.write_line(_lines[num])
