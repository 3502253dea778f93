import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from totientlab.samples import generate_dataset


@pytest.fixture(scope="session")
def ds64_10k():
    """64-bit modulus samples, seed 1 (shared across acceptance checks)."""
    return list(generate_dataset(64, 10_000, 1))


@pytest.fixture(scope="session")
def ds128_10k():
    return list(generate_dataset(128, 10_000, 1))


@pytest.fixture(scope="session")
def ds64_100k_fresh():
    """A fresh 64-bit population (seed 2), disjoint from any training."""
    return list(generate_dataset(64, 100_000, 2))


@pytest.fixture(scope="session")
def ds32_1k():
    """32-bit moduli (16-bit primes), the Fermat-search population."""
    return list(generate_dataset(32, 1_000, 3))


@pytest.fixture(scope="session")
def ds10bit_500():
    return list(generate_dataset(10, 500, 4))
