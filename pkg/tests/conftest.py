import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from funcfrail import cox  # noqa: E402
from funcfrail.pipeline import SurvivalDataset  # noqa: E402
from funcfrail.smoothing import SamplingGrid  # noqa: E402


def random_design(rng, n=30, p=2, K=1, groups=None, ties=False, censor=0.3):
    """Small synthetic Cox design; ``groups`` sets a shared frailty structure."""
    Z = rng.standard_normal((n, p))
    S = rng.standard_normal((n, K))
    eta = 0.5 * Z.sum(axis=1) + 0.3 * S.sum(axis=1)
    T = rng.exponential(size=n) * np.exp(-eta)
    if ties:
        T = np.ceil(T * 4) / 4 + 0.25
    status = (rng.random(n) > censor).astype(int)
    status[0] = 1
    group = None if groups is None else rng.integers(0, groups, n)
    if group is not None:
        group[:groups] = np.arange(groups)
    return cox.CoxDesign.build(T, status, Z, S, group)


def strong_signal(n=120, seed=0, noise=0.0):
    """One dominant functional component driving the hazard."""
    g = SamplingGrid.uniform(51)
    rng = np.random.default_rng(seed)
    phi = np.sqrt(2) * np.sin(np.pi * g.points)
    xi = rng.standard_normal(n) * 2
    X = np.outer(xi, phi) + 0.05 * np.outer(rng.standard_normal(n), np.cos(3 * np.pi * g.points))
    X = X + noise * rng.standard_normal(X.shape)
    Z = rng.standard_normal((n, 1))
    eta = 0.8 * xi + 0.5 * Z[:, 0]
    T = rng.exponential(size=n) * np.exp(-eta)
    status = (rng.random(n) < 0.85).astype(int)
    return SurvivalDataset(time=T, status=status, Z=Z, curves=X, grid=g)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_configure(config):
    config.acceptance_lines = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "acceptance_lines", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)


@pytest.fixture
def report(request):
    """Print a verdict line now and repeat it in the terminal summary."""

    def emit(line):
        print(line)
        request.config.acceptance_lines.append(line)

    return emit
