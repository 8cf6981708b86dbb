import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from shellkit.poset import Poset, build_poset  # noqa: E402

DIAMOND = [("0", "a"), ("0", "b"), ("a", "1"), ("b", "1")]


@pytest.fixture
def diamond():
    return build_poset(DIAMOND)


# lines printed by test_acceptance.criterion, replayed after the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
