"""Shared pytest plumbing: collect acceptance verdict lines and echo them
after the run so they are visible even with output capturing enabled."""

VERDICTS = []


def record_verdict(line: str) -> None:
    VERDICTS.append(line)


def pytest_terminal_summary(terminalreporter):
    if VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in VERDICTS:
            terminalreporter.write_line(line)
