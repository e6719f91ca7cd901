import sys
from pathlib import Path

import pytest
from hypothesis import settings

sys.path.insert(0, str(Path(__file__).parent))

from histner import bundled  # noqa: E402

settings.register_profile("default", max_examples=150, deadline=None)
settings.load_profile("default")


@pytest.fixture(scope="session")
def lexicon():
    return bundled.lexicon()


@pytest.fixture(scope="session")
def ruleset():
    return bundled.ruleset()


@pytest.fixture(scope="session")
def index():
    return bundled.index()


@pytest.fixture(scope="session")
def authority():
    return bundled.authority()


@pytest.fixture(scope="session")
def sample():
    return bundled.corpus("sample.tsv")


@pytest.fixture
def data():
    return bundled.data_path


_VERDICTS = []


@pytest.fixture
def verdict():
    """Record one acceptance line; shown in the terminal summary."""
    def record(number, ok, detail):
        line = "criterion %2d: %s  %s" % (number, "PASS" if ok else "FAIL", detail)
        _VERDICTS.append(line)
        print(line)
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if _VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_VERDICTS):
            terminalreporter.write_line(line)
