import time

import pytest

from deptheval import RobustnessConfig, SensitivityConfig, run_robustness, run_sensitivity


@pytest.fixture(scope="session")
def robustness_runs_n500():
    """Ten seeded full-size noise sweeps, shared across tests; returns
    (elapsed_seconds, [(depth_curve, disparity_curve), ...])."""
    start = time.monotonic()
    runs = [run_robustness(RobustnessConfig(n=500, seed=seed)) for seed in range(10)]
    return time.monotonic() - start, runs


@pytest.fixture(scope="session")
def sensitivity_runs_n100():
    """Ten seeded block-corruption sweeps at n=100, sizes 100..10 step 10."""
    start = time.monotonic()
    runs = [
        run_sensitivity(SensitivityConfig(n=100, seed=seed))
        for seed in range(10)
    ]
    return time.monotonic() - start, runs
