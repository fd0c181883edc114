"""Shared test configuration.

Registers a hypothesis profile suited to simulation-heavy properties and a
terminal-summary hook that prints one line per acceptance criterion after
the run (see test_acceptance.py).
"""

from hypothesis import HealthCheck, settings

settings.register_profile(
    "dwlab",
    deadline=None,
    max_examples=40,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("dwlab")

ACCEPTANCE_LINES: list[str] = []


def record_acceptance(line: str) -> None:
    ACCEPTANCE_LINES.append(line)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
