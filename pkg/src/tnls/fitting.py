"""Least-squares power-law fits shared by the sweep experiments."""

from typing import NamedTuple

import numpy as np


class PowerFit(NamedTuple):
    slope: float
    intercept: float
    r_squared: float
    residuals: tuple


def fit_loglog(xs, ys) -> PowerFit:
    """Fit log y = slope * log x + intercept by least squares.

    Returns the slope, intercept, coefficient of determination and the
    per-point residuals in log space.  All inputs must be positive; a
    constant y series gets r_squared = 1 when the fit is exact and 0
    otherwise.
    """
    x = np.log(np.asarray(xs, dtype=float))
    y = np.log(np.asarray(ys, dtype=float))
    if x.size < 2:
        raise ValueError("at least two points are needed for a fit")
    n = x.size
    sx, sy = x.sum(), y.sum()
    sxx, sxy = (x * x).sum(), (x * y).sum()
    denom = n * sxx - sx * sx
    if denom == 0.0:
        raise ValueError("degenerate abscissae: all x equal")
    slope = (n * sxy - sx * sy) / denom
    intercept = (sy - slope * sx) / n
    resid = y - (slope * x + intercept)
    ss_res = float((resid**2).sum())
    ss_tot = float(((y - y.mean()) ** 2).sum())
    if ss_tot == 0.0:
        r2 = 1.0 if ss_res == 0.0 else 0.0
    else:
        r2 = 1.0 - ss_res / ss_tot
    return PowerFit(float(slope), float(intercept), float(r2), tuple(resid))
