import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from kidsaudit import ratings, signatures
from kidsaudit.comments import PreprocessConfig


# filled in by tests/test_acceptance.py; one line per criterion
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def default_db():
    return signatures.default_database()


@pytest.fixture(scope="session")
def age_table():
    return ratings.AgeGroupTable.default()


@pytest.fixture(scope="session")
def pp_config():
    return PreprocessConfig.default()
