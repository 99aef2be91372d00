"""Cylinder-wave special functions: J0, J1, Y0, Y1 and first-kind Hankels.

Self-contained Chebyshev evaluations, accurate to ~1e-14 absolute for
real arguments (coefficients generated offline at 50-digit precision by
tools/gen_bessel_coeffs.py). Two regions per function: a power region on
[0, SPLIT] with the Y-functions' logarithmic parts peeled off analytically,
and a modulus/phase asymptotic region on (SPLIT, inf).

The time convention is exp(-i*omega*t), so outgoing cylinder waves use the
first-kind Hankel functions H = J + iY.
"""
from __future__ import annotations

import numpy as np

from ._bessel_coeffs import (J0_INNER, J1_INNER, P0_OUTER, P1_OUTER, Q0_OUTER,
                             Q1_OUTER, SPLIT, Y0_INNER, Y1_INNER)


def _clenshaw(t: np.ndarray, coeffs) -> np.ndarray:
    """Evaluate a Chebyshev series sum_k c_k T_k(t) on t in [-1, 1]."""
    b1 = np.zeros_like(t)
    b2 = np.zeros_like(t)
    for c in coeffs[:0:-1]:
        b1, b2 = 2.0 * t * b1 - b2 + c, b1
    return t * b1 - b2 + coeffs[0]


def _eval_pair(x: np.ndarray, order: int) -> tuple[np.ndarray, np.ndarray]:
    """(J_order, Y_order) for nonnegative real x, vectorized."""
    x = np.asarray(x, dtype=np.float64)
    j = np.empty_like(x)
    y = np.empty_like(x)
    lo = x <= SPLIT
    if lo.any():
        xl = x[lo]
        t = 2.0 * (xl / SPLIT) ** 2 - 1.0
        with np.errstate(divide="ignore", invalid="ignore"):
            ln = (2.0 / np.pi) * np.log(xl / 2.0)  # -> -inf at x=0, as Y does
            if order == 0:
                jl = _clenshaw(t, J0_INNER)
                yl = ln * jl + _clenshaw(t, Y0_INNER)
            else:
                jl = xl * _clenshaw(t, J1_INNER)
                yl = ln * jl - 2.0 / (np.pi * xl) + xl * _clenshaw(t, Y1_INNER)
        j[lo], y[lo] = jl, yl
    hi = ~lo
    if hi.any():
        xh = x[hi]
        z = SPLIT / xh
        t = 2.0 * z * z - 1.0
        amp = np.sqrt(2.0 / (np.pi * xh))
        chi = xh - (np.pi / 4.0 if order == 0 else 3.0 * np.pi / 4.0)
        if order == 0:
            p, q = _clenshaw(t, P0_OUTER), _clenshaw(t, Q0_OUTER)
        else:
            p, q = _clenshaw(t, P1_OUTER), _clenshaw(t, Q1_OUTER)
        c, s = np.cos(chi), np.sin(chi)
        j[hi] = amp * (p * c - q * z * s)
        y[hi] = amp * (p * s + q * z * c)
    return j, y


def bessel_j0(x):
    """J0 for real x (even continuation for negative arguments)."""
    return _eval_pair(np.abs(x), 0)[0]


def bessel_j1(x):
    """J1 for real x (odd continuation for negative arguments)."""
    x = np.asarray(x, dtype=np.float64)
    return np.sign(x) * _eval_pair(np.abs(x), 1)[0]


def bessel_y0(x):
    """Y0 for x >= 0 (singular at 0)."""
    x = np.asarray(x, dtype=np.float64)
    if (x < 0).any():
        raise ValueError("bessel_y0 requires x >= 0")
    return _eval_pair(x, 0)[1]


def bessel_y1(x):
    """Y1 for x >= 0 (singular at 0)."""
    x = np.asarray(x, dtype=np.float64)
    if (x < 0).any():
        raise ValueError("bessel_y1 requires x >= 0")
    return _eval_pair(x, 1)[1]


def hankel1_0(x) -> np.ndarray:
    """Outgoing cylinder wave H0 = J0 + i*Y0 for x > 0."""
    x = np.asarray(x, dtype=np.float64)
    if (x < 0).any():
        raise ValueError("hankel1_0 requires x >= 0")
    j, y = _eval_pair(x, 0)
    return j + 1j * y


def hankel1_1(x) -> np.ndarray:
    """Outgoing cylinder wave H1 = J1 + i*Y1 for x > 0."""
    x = np.asarray(x, dtype=np.float64)
    if (x < 0).any():
        raise ValueError("hankel1_1 requires x >= 0")
    j, y = _eval_pair(x, 1)
    return j + 1j * y
