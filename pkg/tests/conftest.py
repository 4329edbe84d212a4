import pytest

from relaysim.params import ReluctanceModel, table_i

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def params():
    return table_i()


@pytest.fixture(scope="session")
def relay():
    """Reference device with stops at 0 and 5 mm."""
    return table_i(z_min=0.0, z_max=5e-3)


@pytest.fixture(scope="session")
def sat_model():
    return ReluctanceModel.saturation(20e-6)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
