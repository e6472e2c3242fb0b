"""Shared fixtures.

The zero-range channel table takes a couple of minutes to build (the
nonadiabatic diagonal is finite-differenced at every grid point), so it
is built once per session and shared by the channel and acceptance
tests.  Acceptance checks report through record_acceptance so the
pass/fail lines survive pytest's capture and show up in the terminal
summary.
"""

import pytest

from halo2d import build_channel_table, solve_bound_states, zero_range

ACCEPTANCE_LINES = []


def record_acceptance(tag: str, ok: bool, detail: str) -> bool:
    line = f"[{'PASS' if ok else 'FAIL'}] {tag}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


@pytest.fixture(scope="session")
def zr_table():
    return build_channel_table(zero_range(1.0))


@pytest.fixture(scope="session")
def zr_states(zr_table):
    return solve_bound_states(zr_table)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("=", "acceptance checks")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
