"""Exponential-sum kernel bounds and rational time structure.

The band-limited free kernel on the torus factorizes over coordinates:

    K_M(x, t) = k(x1, t) k(x2, t) k(x3, t),
    k(y, t) = sum_{|n| <= 2M} e^{-i (t n^2 + y n)} eta1(n / M)^2,

so all suprema over x reduce to 1-D suprema, which we take over a
heavily oversampled FFT grid.  The size of |K_M| is governed by how
well t/(2pi) is approximated by rationals with small denominator;
``dirichlet_approx`` extracts the best such approximation with
denominator up to M by continued fractions in exact integer
arithmetic, and ``majorant`` turns it into the standard major-arc
bound.  Window suprema (``extinction_sup``, ``window_linf_lp``) are
sampled lower bounds: the time grid puts at least eight points per
M^(-2) near the lower window edge, thins geometrically upward, and a
second pass refines around the coarse maximizer; resolution metadata
is available on request.  Nothing here is a certified enclosure.
"""

import math
from fractions import Fraction
from typing import NamedTuple, Optional, Union

import numpy as np
from scipy import fft as _fft

from ._threads import get_workers
from .cutoffs import eta1
from .fields import SpectralField, TorusField
from .spectral import forward_transform

TWO_PI = 2.0 * math.pi

# pi to 50 digits, enough to fix t/(2 pi) at 1e-18 for any float t.
_PI = Fraction(31415926535897932384626433832795028841971693993751, 10**49)

_FIXED_DIGITS = 18


class DirichletApprox(NamedTuple):
    """Rational structure of a time: t/(2 pi) = a/q + beta with
    gcd(a, q) = 1, 1 <= q <= M and |beta| <= 1/(M q)."""

    a: int
    q: int
    beta: float


def kernel_1d(M: int, y, t: float) -> np.ndarray:
    """The 1-D factor k(y, t); y may be a scalar or an array."""
    n = np.arange(-2 * M, 2 * M + 1)
    w = eta1(n / M) ** 2
    y_arr = np.asarray(y, dtype=float)
    phase = np.exp(-1j * (t * n**2 + np.multiply.outer(y_arr, n)))
    out = phase @ w
    return out if y_arr.ndim else complex(out)


def kernel_eval(M: int, x, t: float) -> complex:
    """K_M(x, t) as the product of the three separable 1-D sums."""
    x1, x2, x3 = (float(c) for c in x)
    return complex(
        kernel_1d(M, x1, t) * kernel_1d(M, x2, t) * kernel_1d(M, x3, t)
    )


def _theta_fixed(t: float) -> Fraction:
    """t/(2 pi) rounded to a fixed-point rational at 1e-18."""
    theta = Fraction(t) / (2 * _PI)
    scale = 10**_FIXED_DIGITS
    return Fraction(round(theta * scale), scale)


def dirichlet_approx(t: float, M: int) -> DirichletApprox:
    """Best rational approximation of t/(2 pi) with denominator <= M.

    Continued-fraction convergents are computed in exact integer
    arithmetic; the last convergent with q <= M minimizes |q theta - a|
    and satisfies the |beta| <= 1/(M q) pigeonhole bound.
    """
    if M < 1:
        raise ValueError("M must be at least 1")
    theta = _theta_fixed(t)

    # Convergent recurrence on the continued-fraction digits of theta.
    p_prev, q_prev = 1, 0
    p_cur, q_cur = int(math.floor(theta)), 1
    frac = theta - int(math.floor(theta))
    while q_cur <= M and frac != 0:
        digit = int(1 / frac)
        frac = 1 / frac - digit
        p_prev, p_cur = p_cur, digit * p_cur + p_prev
        q_prev, q_cur = q_cur, digit * q_cur + q_prev
        if q_cur > M:
            p_cur, q_cur = p_prev, q_prev
            break
    a, q = p_cur, q_cur
    beta = float(theta - Fraction(a, q))
    if abs(beta) > 1.0 / (M * q) * (1.0 + 1e-9):
        raise RuntimeError(
            f"approximation bound violated for t = {t}, M = {M}: "
            f"q = {q}, |beta| = {abs(beta):.3e}"
        )
    return DirichletApprox(a=a, q=q, beta=beta)


def majorant(M: int, t: float) -> float:
    """Major-arc bound [M / (sqrt(q) (1 + M |beta|^(1/2)))]^3."""
    approx = dirichlet_approx(t, M)
    base = M / (math.sqrt(approx.q) * (1.0 + M * math.sqrt(abs(approx.beta))))
    return base**3


def _sup_1d(M: int, t: float, oversample: int = 64) -> float:
    """sup over y of |k(y, t)| on an oversampled FFT grid."""
    J = oversample * M
    n = np.arange(-2 * M, 2 * M + 1)
    coeffs = np.zeros(J, dtype=complex)
    np.add.at(coeffs, n % J, np.exp(-1j * t * n.astype(float) ** 2) * eta1(n / M) ** 2)
    vals = _fft.fft(coeffs, workers=get_workers())
    return float(np.abs(vals).max())


def kernel_sup(M: int, t: float) -> float:
    """sup over x in the torus of |K_M(x, t)| = (sup_y |k(y, t)|)^3."""
    return _sup_1d(M, t)**3


def _geometric_tgrid(t_lo: float, t_hi: float, step_scale: float) -> np.ndarray:
    """Grid from t_lo to t_hi with spacing step_scale * t, both ends kept."""
    if t_hi < t_lo:
        raise ValueError("empty time window")
    if t_hi == t_lo:
        return np.asarray([t_lo])
    r = 1.0 + step_scale
    count = int(math.ceil(math.log(t_hi / t_lo) / math.log(r)))
    ts = t_lo * r ** np.arange(count + 1)
    ts[-1] = t_hi
    return ts


def _refined_sup(
    value_at,
    ts: np.ndarray,
    refine_step: float,
    refine_points: int = 33,
) -> tuple:
    """Coarse max over ts, then a uniform local pass around the argmax."""
    coarse = np.array([value_at(t) for t in ts])
    j = int(np.argmax(coarse))
    lo = ts[max(0, j - 1)]
    hi = ts[min(len(ts) - 1, j + 1)]
    n_fine = max(refine_points, int(math.ceil((hi - lo) / refine_step)) + 1)
    fine_ts = np.linspace(lo, hi, n_fine)
    fine = np.array([value_at(t) for t in fine_ts])
    best = float(max(coarse[j], fine.max()))
    t_best = float(fine_ts[int(np.argmax(fine))]) if fine.max() >= coarse[j] else float(ts[j])
    return best, t_best, len(ts) + n_fine


def extinction_sup(M: int, S: float, details: bool = False):
    """Sampled sup of |K_M| over the torus and t in [S M^(-2), 1/S].

    Requires 1 <= S <= M (an empty window otherwise).  The x supremum
    is exact up to FFT-grid resolution thanks to the separable product;
    the t supremum uses the geometric grid plus local refinement.
    """
    if not 1.0 <= S <= M:
        raise ValueError(f"S must lie in [1, M], got {S}")
    t_lo = S / M**2
    t_hi = 1.0 / S
    ts = _geometric_tgrid(t_lo, t_hi, 1.0 / (8.0 * S))
    value, t_best, n_eval = _refined_sup(
        lambda t: kernel_sup(M, t), ts, refine_step=1.0 / (32.0 * M**2)
    )
    if not details:
        return value
    return value, {
        "t_at_sup": t_best,
        "t_evaluations": n_eval,
        "window": [t_lo, t_hi],
        "normalized": value * S**1.5 / M**3,
    }


def _field_on_reduced_lattice(data: SpectralField, l2_rtol: float = 1e-8):
    """Smallest sublattice carrying all but a certified sliver of data.

    Returns (coeff array of size G^3 in FFT layout, G).  The dropped
    coefficients have l1 mass at most l2_rtol times the field's L^2
    norm, which bounds the pointwise error of any free evolution
    evaluated on the sublattice.
    """
    lattice = data.lattice
    M = lattice.M
    absc = np.abs(data.coeffs)
    total_l2 = float(np.sqrt(np.sum(absc**2)))
    if total_l2 == 0.0:
        return np.zeros((16, 16, 16), dtype=complex), 16
    fmax = np.maximum.reduce(np.meshgrid(*(np.abs(lattice.freq),) * 3, indexing="ij"))
    G = 16
    while G < M:
        dropped = float(absc[fmax >= G // 2].sum())
        if dropped <= l2_rtol * total_l2:
            break
        G *= 2
    G = min(G, M)
    if G == M:
        return data.coeffs.copy(), M
    fr = np.concatenate([np.arange(0, G // 2), np.arange(-(G // 2) + 1, 0)])
    src = (fr % M).astype(np.intp)
    dst = (fr % G).astype(np.intp)
    rc = np.zeros((G, G, G), dtype=complex)
    rc[np.ix_(dst, dst, dst)] = data.coeffs[np.ix_(src, src, src)]
    return rc, G


def window_linf_lp(
    f_N: Union[TorusField, SpectralField],
    N: int,
    T: float,
    p: float = math.inf,
    details: bool = False,
):
    """Sampled sup over T N^(-2) <= |t| <= 1/T of the L^p norm of the
    free evolution of ``f_N``.

    Both time signs are scanned.  The evolution runs on the smallest
    sublattice certified to carry the data, so the value is a rectangle
    rule (or lattice max, for p = inf) on that grid.
    """
    if not 1.0 <= T <= N:
        raise ValueError(f"T must lie in [1, N], got {T}")
    data = f_N if isinstance(f_N, SpectralField) else forward_transform(f_N)
    rc, G = _field_on_reduced_lattice(data)
    fg = np.fft.fftfreq(G, 1.0 / G).astype(np.int64)
    fg2 = (fg * fg).astype(float)
    scale = G**3 / TWO_PI**1.5
    cell = (TWO_PI / G) ** 3

    def norm_at(t: float) -> float:
        ph = np.exp(-1j * t * fg2)
        spun = rc * ph[:, None, None] * ph[None, :, None] * ph[None, None, :]
        vals = _fft.ifftn(spun, workers=get_workers())
        a = np.abs(vals) * scale
        if math.isinf(p):
            return float(a.max())
        amax = float(a.max())
        if amax == 0.0:
            return 0.0
        return amax * (float(np.sum((a / amax) ** p)) * cell) ** (1.0 / p)

    t_lo = T / N**2
    t_hi = 1.0 / T
    ts = _geometric_tgrid(t_lo, t_hi, 1.0 / (8.0 * T))
    best_val, best_t, evals = -1.0, 0.0, 0
    for sign in (1.0, -1.0):
        value, t_at, n_eval = _refined_sup(
            lambda t: norm_at(sign * t), ts, refine_step=1.0 / (32.0 * N**2)
        )
        evals += n_eval
        if value > best_val:
            best_val, best_t = value, sign * t_at
    if not details:
        return best_val
    return best_val, {
        "t_at_sup": best_t,
        "t_evaluations": evals,
        "window": [t_lo, t_hi],
        "lattice": G,
    }
