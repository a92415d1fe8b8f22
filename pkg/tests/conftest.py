import pytest

from primverify.constants import erdos_constant_C

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def C():
    return erdos_constant_C()


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
