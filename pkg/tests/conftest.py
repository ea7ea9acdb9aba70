"""
Shared fixtures for the chern-fqh tests.

Run with: pytest tests/ -v
"""

import os
import sys

import pytest

# Add project to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from chern_fqh.algebra.exactlinalg import IntSymMatrix  # noqa: E402


def b_family(k: int, b: int) -> IntSymMatrix:
    """K with b + 1 on the diagonal and b elsewhere."""
    return IntSymMatrix.from_rows([[b + int(i == j) for j in range(k)] for i in range(k)])


@pytest.fixture
def k_b1() -> IntSymMatrix:
    return b_family(2, 1)


@pytest.fixture
def k_tenthree() -> IntSymMatrix:
    return IntSymMatrix.from_rows([[10, 3], [3, 2]])
