import numpy as np
import pytest

from sparserank.core import SparsityPattern, WeightedSparseMatrix


def random_pattern(rng, max_n=12, max_nnz=40) -> SparsityPattern:
    """Small random pattern for oracle comparisons."""
    n = int(rng.integers(1, max_n + 1))
    nnz = int(rng.integers(0, min(max_nnz, n * n) + 1))
    lin = rng.choice(n * n, size=nnz, replace=False)
    return SparsityPattern(n, lin // n, lin % n)


def pattern_of(n, entries) -> SparsityPattern:
    return SparsityPattern.from_entries(n, entries)


def ones_matrix(pattern) -> WeightedSparseMatrix:
    return WeightedSparseMatrix(pattern, np.ones(pattern.nnz), "all-ones")


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)
