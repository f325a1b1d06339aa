import pytest
from mpmath import mp


@pytest.fixture(autouse=True)
def _restore_precision():
    """Every test starts at mpmath's default precision and leaves it there."""
    saved = mp.dps
    mp.dps = 15
    yield
    mp.dps = saved


ACCEPTANCE_LINES: list = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
