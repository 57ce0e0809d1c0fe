import pytest

from dirext.fixtures import cantor_extension, example25_function, twoline_extension


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.__dict__.get("acceptance_lines")
    if lines:
        terminalreporter.section("acceptance criteria")
        for n in sorted(lines):
            terminalreporter.write_line(lines[n])


@pytest.fixture(scope="session")
def twoline():
    return twoline_extension(alpha=0.5)


@pytest.fixture(scope="session")
def e25(twoline):
    return example25_function(twoline)


@pytest.fixture(scope="session")
def cantor():
    return cantor_extension(alpha=0.5)
