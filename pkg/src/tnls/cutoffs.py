"""Smooth frequency and space cutoffs.

All projection multipliers in the package are built from one concrete smooth
even step ``eta1``: it equals 1 on [-1, 1], vanishes outside (-2, 2), and in
between follows the standard exponential mollifier partition

    eta1(y) = b(2 - |y|) / (b(2 - |y|) + b(|y| - 1)),   b(s) = exp(-1/s),

with b extended by 0 for s <= 0.  ``eta3`` is the separable 3-D version
``eta1(y1)^2 * eta1(y2)^2 * eta1(y3)^2`` used as the low-pass symbol, and
``eta_ball`` is the radial step eta1(|x|) used to truncate functions of a
space variable.  Everything is vectorized over numpy arrays and smooth (all
derivatives vanish at the matching points), which is what makes the dyadic
projections and rescaled profiles built on top of them well behaved.
"""

from __future__ import annotations

import numpy as np

__all__ = ["mollifier", "eta1", "eta3", "eta_ball"]


def mollifier(s):
    """exp(-1/s) for s > 0, continued by 0 for s <= 0, elementwise."""
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)
    pos = s > 0.0
    # np.errstate: the masked divide only runs where pos is True
    with np.errstate(divide="ignore", over="ignore"):
        out[pos] = np.exp(-1.0 / s[pos])
    return out


def eta1(y):
    """Smooth even step: 1 on |y| <= 1, 0 on |y| >= 2, strictly between
    elsewhere.  Accepts scalars or arrays, returns float64 of the same shape.
    """
    a = np.abs(np.asarray(y, dtype=float))
    hi = mollifier(2.0 - a)
    lo = mollifier(a - 1.0)
    denom = hi + lo
    # Denominator only vanishes where both branches vanish, i.e. nowhere in
    # (1, 2); outside that band the explicit values are used.
    out = np.empty_like(a)
    flat = a <= 1.0
    dead = a >= 2.0
    mid = ~(flat | dead)
    out[flat] = 1.0
    out[dead] = 0.0
    out[mid] = hi[mid] / denom[mid]
    if out.ndim == 0:
        return float(out)
    return out


def eta3(y1, y2, y3):
    """Separable 3-D low-pass symbol eta1(y1)^2 eta1(y2)^2 eta1(y3)^2."""
    return eta1(y1) ** 2 * eta1(y2) ** 2 * eta1(y3) ** 2


def eta_ball(x1, x2, x3):
    """Radial step eta1(|x|): 1 on the unit ball, 0 outside radius 2."""
    r = np.sqrt(
        np.asarray(x1, dtype=float) ** 2
        + np.asarray(x2, dtype=float) ** 2
        + np.asarray(x3, dtype=float) ** 2
    )
    return eta1(r)
