"""Unit conversions and the log-distance path-loss model.

Solver code works in linear units (mW, Hz); dB and dBm only appear at the
configuration and reporting boundaries.
"""

from typing import Union

import numpy as np

ArrayLike = Union[float, np.ndarray]


def db_to_linear(x: ArrayLike) -> ArrayLike:
    """Convert dB to a linear ratio (or dBm to mW): ``10 ** (x / 10)``."""
    return np.power(10.0, np.asarray(x, dtype=float) / 10.0)


def linear_to_db(x: ArrayLike) -> ArrayLike:
    """Convert a positive linear ratio (or mW) to dB (or dBm)."""
    return 10.0 * np.log10(np.asarray(x, dtype=float))


def path_loss_db(
    d: ArrayLike,
    a: float = 35.0,
    b: float = 34.0,
    min_distance: float = 1.0,
) -> ArrayLike:
    """Path loss ``a * log10(max(d, min_distance)) + b`` in dB.

    Args:
        d: Distance(s) in meters
        a: Slope in dB per decade
        b: Intercept in dB at one meter
        min_distance: Clamp applied before the logarithm

    Returns:
        Path loss in dB, same shape as ``d``
    """
    d = np.maximum(np.asarray(d, dtype=float), min_distance)
    return a * np.log10(d) + b
