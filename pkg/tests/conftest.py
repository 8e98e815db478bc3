import pytest
from hypothesis import settings

from abelstat.continuity import build_family, standard_family, standard_members
from abelstat.convergence import ConvergenceOptions

# Small horizon for unit tests; the acceptance module runs the defaults.
FAST = ConvergenceOptions(eps_grid=(0.1, 0.02), horizon=2**14, x_grid=(4, 14))

ACCEPTANCE_LINES: list[str] = []

# fixed example generation so repeated runs see the same cases
settings.register_profile("repro", derandomize=True, print_blob=True)
settings.load_profile("repro")


@pytest.fixture(scope="session")
def fast():
    return FAST


@pytest.fixture(scope="session")
def fast_family():
    return build_family("standard-fast", standard_members(), FAST, provenance="catalog:standard")


@pytest.fixture(scope="session")
def family():
    return standard_family()


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
