from pathlib import Path

import pytest
from hypothesis import settings

from kwfeas.kw import InequalitySystem

settings.register_profile("kwfeas", deadline=None, max_examples=60)
settings.load_profile("kwfeas")

DATA = Path(__file__).parent / "data"

# acceptance lines collected by tests/test_acceptance.py
ACCEPTANCE_LINES: list = []


@pytest.fixture(scope="session")
def benchmark_system() -> InequalitySystem:
    return InequalitySystem.from_text((DATA / "benchmark_system.txt").read_text(), nvars=4)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
