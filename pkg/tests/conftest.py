import os

import pytest
from hypothesis import HealthCheck, settings

from stefansim.manufactured import manufactured_spec
from stefansim.solver import SolveOptions, solve

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", max_examples=400, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

# a narrower scan than the default range keeps the solver fixtures quick;
# the full-range scan is exercised by the acceptance tests
NARROW = SolveOptions(beta_range=(0.5, 2.0), bracket_grid=12)


@pytest.fixture(scope="session")
def manufactured_solution():
    return solve(manufactured_spec(), NARROW)


@pytest.fixture(scope="session")
def affine_solution():
    """Converged run with 1% affine coefficients (printed balance, fast alpha0)."""
    spec = manufactured_spec(interface="printed", slope=0.01)
    return solve(spec, NARROW.replace(interface="printed"))


# one PASS/FAIL line per acceptance criterion, repeated in the terminal summary
ACCEPTANCE = pytest.StashKey[list]()


@pytest.fixture
def verdict(request):
    lines = request.config.stash.setdefault(ACCEPTANCE, [])

    def record(number, ok, detail=""):
        line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}".rstrip()
        lines.append(line)
        print(line)
        return ok
    return record


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
