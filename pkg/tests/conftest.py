import numpy as np
import pytest

from prs.codec import CodeParams
from prs.gf import FieldContext


@pytest.fixture(scope="session")
def gf16():
    return FieldContext(4)


@pytest.fixture(scope="session")
def gf256():
    return FieldContext(8)


@pytest.fixture(scope="session")
def gf1024():
    return FieldContext(10)


@pytest.fixture(scope="session")
def params16(gf16):
    # k_hat = 9 is the smallest group that fits a 32-bit CRC at m = 4
    return CodeParams(gf16, 9)


@pytest.fixture(scope="session")
def params256(gf256):
    return CodeParams(gf256, 20)


def corrupt_positions(received, positions, rng, n):
    """XOR each named node's symbols with uniform nonzero noise, in place."""
    for j in positions:
        received[:, j] ^= rng.integers(1, n + 1, size=received.shape[0])
    return received
