"""Shared pytest wiring.

The acceptance tests append one line per criterion here; the terminal
summary hook prints the block after the run so the verdicts are visible
even when every test passes.
"""

acceptance_lines: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in acceptance_lines:
            terminalreporter.write_line(line)
