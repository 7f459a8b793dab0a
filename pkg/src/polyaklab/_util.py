"""Shared numeric helpers."""

import numpy as np


def make_rng(seed: int) -> np.random.Generator:
    """Counter-based, platform-independent generator for a 64-bit seed."""
    return np.random.Generator(np.random.Philox(int(seed)))


def ipow(base: float, n: int) -> float:
    """base**n for integer n >= 0 by repeated squaring.

    Avoids the platform-dependent exp/log path of libm pow for the large
    integer exponents that appear in 2K-th powers.
    """
    if n < 0:
        raise ValueError("ipow expects a nonnegative integer exponent")
    result = 1.0
    b = float(base)
    e = int(n)
    while e:
        if e & 1:
            result *= b
        b *= b
        e >>= 1
    return result
