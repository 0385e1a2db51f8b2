from __future__ import annotations

import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("starnls", deadline=None, max_examples=40)
settings.load_profile("starnls")


@pytest.fixture
def rng():
    return np.random.default_rng(20261018)


# acceptance criteria register their outcome here; printed after the run
ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[number])
