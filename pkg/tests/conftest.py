import numpy as np
import pytest

from chowla.config import LabConfig
from chowla.sieve import factor_oracle, sieve_range


@pytest.fixture(scope="session")
def small_segment():
    """λ, μ and μ²_50 over [1, 20000]."""
    return sieve_range(1, 20_000, 50, block=4096)


@pytest.fixture(scope="session")
def oracle_values():
    """Naive (λ, μ) lists over [1, 2000] from the factorization oracle."""
    facts = [factor_oracle(n) for n in range(1, 2001)]
    return [f.liouville for f in facts], [f.mobius for f in facts]


@pytest.fixture
def lab_config(tmp_path):
    return LabConfig(cache_dir=str(tmp_path / "cache"))


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)
