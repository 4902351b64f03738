"""Shared pytest hooks: collect acceptance-criterion result lines.

The acceptance tests each report one human-readable PASS/FAIL line. The
lines are printed as they happen and repeated in a dedicated section at
the end of the run so the verdicts survive output capturing.
"""

import pytest

_ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def acceptance():
    """Recorder callable: acceptance("[criterion N] PASS ...")."""

    def _record(line: str) -> None:
        _ACCEPTANCE_LINES.append(line)
        print(line)

    return _record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in _ACCEPTANCE_LINES:
        terminalreporter.write_line(line)
