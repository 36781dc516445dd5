"""Shared fixtures: the synthetic benchmark splits used by the slower
hardening and acceptance tests."""

import pytest

from robustids.data import benchmark_raw, prepare_splits

BENCHMARK_SEED = 11
SPLIT_SEED = 5


@pytest.fixture(scope="session")
def benchmark_splits():
    raw = benchmark_raw(seed=BENCHMARK_SEED)
    processed, _ = prepare_splits(raw, (0.72, 0.08, 0.2), seed=SPLIT_SEED)
    return processed
