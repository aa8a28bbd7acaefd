"""Shared fixtures and hypothesis settings."""

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from kernrom.fom import build_advdiff, gaussian_ic, latin_hypercube
from kernrom.odeint import integrate
from kernrom.reduce import SnapshotSet

settings.register_profile(
    "kernrom",
    max_examples=40,
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("kernrom")

CRITERIA: list[str] = []


def record_criterion(number: int, title: str, passed: bool, detail: str) -> bool:
    """Log one acceptance verdict; all verdicts are repeated in the terminal summary."""
    line = f"criterion {number:2d} {'PASS' if passed else 'FAIL'}  {title}: {detail}"
    CRITERIA.append(line)
    print(line)
    return passed


def pytest_terminal_summary(terminalreporter):
    if CRITERIA:
        terminalreporter.section("acceptance criteria")
        for line in sorted(CRITERIA):
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def small_advdiff():
    """Advection-diffusion model with three training trajectories and a test trajectory."""
    fom = build_advdiff(32)
    t = np.linspace(0.0, 1.0, 33)
    params = latin_hypercube(3, [(0.25, 0.35), (0.05, 0.15)], seed=0)
    trajs = [integrate(fom.rhs, fom.jacobian, gaussian_ic(fom.grid, *mu), t).states for mu in params]
    test = integrate(fom.rhs, fom.jacobian, gaussian_ic(fom.grid, 0.3, 0.1), t).states
    return fom, SnapshotSet(t, params, trajs), test


SMOKE_CONFIG = """\
# small advection-diffusion pipeline
problem = advdiff
fom.n_q = 32
fom.n_t = 32
sampling.M = 3
reduction.r = 2, 4
rom.methods = kernel-fm, kernel-rbf, kernel-hybrid, opinf, intrusive
kernel.gamma_grid = 1e-10, 1e-6, 1e-2
"""


@pytest.fixture
def smoke_config(tmp_path):
    path = tmp_path / "smoke.cfg"
    path.write_text(SMOKE_CONFIG)
    return path
