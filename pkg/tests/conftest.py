import numpy as np
import pytest

from hemtdiscord.params import default_config
from hemtdiscord.sweep import operating_point

ACCEPTANCE = pytest.StashKey[list]()


@pytest.fixture(scope="session")
def defaults():
    return default_config()


@pytest.fixture(scope="session")
def op(defaults):
    return operating_point(*defaults)


@pytest.fixture
def rng():
    return np.random.default_rng(20240613)


@pytest.fixture
def acceptance_log(request):
    return request.config.stash.setdefault(ACCEPTANCE, [])


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
