import numpy as np
import pytest

from signrank.distributions import DENSITY_NAMES, parse_density


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


ALL_DENSITY_SPECS = tuple(DENSITY_NAMES.values()) + (
    "hybrid-logistic-normal",
    "hybrid-laplace-normal",
    "normal",
)


@pytest.fixture(params=ALL_DENSITY_SPECS)
def density(request):
    return parse_density(request.param)


# acceptance verdicts, printed once at the end of the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
