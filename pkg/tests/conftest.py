"""Shared fixtures: hypothesis profiles, cached chains, acceptance recorder."""

import os

import pytest
from hypothesis import HealthCheck, settings

from gibbsrates import (
    BetaBinomialFamily,
    PoissonGammaFamily,
    bb_xchain,
    compare,
    pg_xchain,
)

settings.register_profile(
    "fast", max_examples=25, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.register_profile(
    "thorough",
    max_examples=400,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "fast"))


@pytest.fixture(scope="session")
def bb100():
    """The n=100 flat-prior model with its exact x-chain and stationary law."""
    fam = BetaBinomialFamily(n=100)
    matrix, stationary = bb_xchain(fam)
    return fam, matrix, stationary


@pytest.fixture(scope="session")
def pg_default():
    """The shape=rate=1 Poisson-gamma model truncated at the default 400."""
    fam = PoissonGammaFamily()
    matrix, stationary = pg_xchain(fam)
    return fam, matrix, stationary


@pytest.fixture(scope="session")
def compare100():
    """The headline n=100 comparison report (no Monte Carlo cross-check)."""
    return compare(n=100, max_steps=400, target=0.01, d=1000.0, r=0.001)


def pytest_configure(config):
    config._acceptance_lines = []


@pytest.fixture
def acceptance(request):
    """Record one PASS/FAIL line per acceptance criterion for the summary."""

    def record(line: str) -> None:
        request.config._acceptance_lines.append(line)
        print(line)

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "_acceptance_lines", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
