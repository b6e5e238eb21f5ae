from __future__ import annotations

import pytest

from archspace.spaces import make_space

ACCEPTANCE_LINES: dict = {}


def report(number: int, ok: bool, detail: str) -> None:
    """Record (and print) one acceptance-criterion result line."""
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {detail}"
    ACCEPTANCE_LINES[number] = line
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[n])


@pytest.fixture
def fig6():
    return make_space("fig6_example")


def type_multiset(space) -> list:
    return sorted(m.type_name for m in space.modules.values())
