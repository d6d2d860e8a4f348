import pytest

from garlandlab.randomgen import sample_rng

ACCEPTANCE_KEY = pytest.StashKey[dict]()


@pytest.fixture
def rng():
    return sample_rng(12345)


@pytest.fixture
def acceptance_lines(request):
    return request.config.stash.setdefault(ACCEPTANCE_KEY, {})


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(ACCEPTANCE_KEY, {})
    if lines:
        terminalreporter.section("acceptance criteria")
        for number in sorted(lines):
            terminalreporter.write_line(lines[number])
