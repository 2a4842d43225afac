import json
from pathlib import Path

import numpy as np
import pytest

FIXTURES = Path(__file__).with_name("fixtures")


@pytest.fixture(scope="session")
def derived():
    return json.loads((FIXTURES / "derived_constants.json").read_text())


@pytest.fixture
def rng():
    return np.random.default_rng(20170601)


# Lines recorded by the acceptance suite; echoed after the run so they
# survive output capturing.
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
