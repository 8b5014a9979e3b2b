"""Shared fixtures: the acceptance-verdict recorder and its summary section."""

import pytest

_VERDICTS = []


@pytest.fixture
def verdict():
    """Record one PASS/FAIL line for an acceptance criterion, then assert it."""

    def _record(criterion, problems):
        status = "FAIL" if problems else "PASS"
        _VERDICTS.append(f"{status} {criterion}")
        assert not problems, f"{criterion}: " + "; ".join(problems)

    return _record


def pytest_terminal_summary(terminalreporter):
    if _VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in _VERDICTS:
            terminalreporter.write_line(line)
