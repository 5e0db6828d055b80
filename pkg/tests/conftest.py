"""Shared pytest plumbing: collect acceptance verdicts for the terminal summary."""

import pytest

VERDICTS: list[str] = []


def record_verdict(line: str) -> None:
    """Stash one acceptance verdict line for the end-of-run summary."""
    VERDICTS.append(line)


@pytest.hookimpl
def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in VERDICTS:
            terminalreporter.write_line(line)
