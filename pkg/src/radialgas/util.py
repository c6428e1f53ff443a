"""Small shared helpers: smooth bump profiles and window functions."""

import numpy as np

__all__ = ["bump", "bump_prime", "smoothstep"]


def bump(y):
    """The standard C-infinity bump exp(1/(y**2 - 1)) on |y| < 1, 0 outside.

    Normalised to bump(0) = exp(-1); callers rescale as needed.
    """
    y = np.asarray(y, dtype=float)
    out = np.zeros_like(y)
    inside = np.abs(y) < 1.0
    yi = y[inside]
    out[inside] = np.exp(1.0 / (yi * yi - 1.0))
    return out


def bump_prime(y):
    """Derivative of bump: -2y/(y**2-1)**2 * exp(1/(y**2-1)) inside, 0 outside."""
    y = np.asarray(y, dtype=float)
    out = np.zeros_like(y)
    inside = np.abs(y) < 1.0
    yi = y[inside]
    d = yi * yi - 1.0
    out[inside] = -2.0 * yi / (d * d) * np.exp(1.0 / d)
    return out


def smoothstep(x, lo, hi):
    """C1 cubic ramp: 0 for x <= lo, 1 for x >= hi, 3t**2-2t**3 between."""
    x = np.asarray(x, dtype=float)
    t = np.clip((x - lo) / (hi - lo), 0.0, 1.0)
    return t * t * (3.0 - 2.0 * t)
