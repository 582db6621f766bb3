"""Fourier analysis on the torus: transforms, propagator, projections, norms.

Conventions.  With x on (R/2piZ)^3 and integer frequencies xi,

    (F f)(xi) = (2pi)^{-3/2} * integral of f(x) exp(-i x.xi) dx,
    f(x)      = (2pi)^{-3/2} * sum over xi of (F f)(xi) exp(i x.xi),

and the integral is evaluated exactly for band-limited f by the rectangle
rule on the lattice, so

    coeffs(xi) = (2pi)^{3/2} M^{-3} * sum_k f(x_k) exp(-i x_k.xi).

Under this normalization Parseval reads ||f||_{L^2}^2 = sum |coeffs|^2 and
the constant function 1 has coeffs(0) = (2pi)^{3/2}.

The free Schroedinger propagator e^{i t Laplacian} acts diagonally as
multiplication by exp(-i t |xi|^2).  Littlewood-Paley projections use the
separable symbol eta3(xi/N) from :mod:`tnls.cutoffs`: P_{<=N} multiplies by
eta3(xi/N), the dyadic shell P_N is P_{<=N} - P_{<=N/2} for N >= 2 and
P_1 = P_{<=1}.  The shells telescope exactly by construction; they are not
idempotent (the symbol is smooth, not an indicator).

All reductions (norms, pairings) go through numpy's pairwise summation in a
fixed array order, so results are bit-reproducible and independent of the FFT
worker count.
"""

from __future__ import annotations

import warnings
from typing import NamedTuple

import numpy as np
import scipy.fft as _fft

from ._threads import get_workers
from .cutoffs import eta1
from .fields import Lattice, SpectralField, TorusField

__all__ = [
    "forward_transform",
    "inverse_transform",
    "propagate",
    "dyadic_shells",
    "lp_multiplier",
    "lp_project",
    "cube_project",
    "cube_partition",
    "frame_operator",
    "sobolev_norm",
    "h_dot1_norm",
    "lebesgue_norm",
    "Pairings",
    "inner_products",
]

_TWO_PI = 2.0 * np.pi
_FWD = _TWO_PI ** 1.5  # (2pi)^{3/2}


def forward_transform(f: TorusField) -> SpectralField:
    """Map physical samples to Fourier coefficients.

    coeffs(xi) = (2pi)^{3/2} M^{-3} sum_k f(x_k) exp(-i x_k.xi); Nyquist rows
    are zeroed by the SpectralField constructor.
    """
    M = f.lattice.M
    c = _fft.fftn(f.values, workers=get_workers())
    c *= _FWD / M**3
    return SpectralField(f.lattice, c, f.timestamp)


def inverse_transform(F: SpectralField) -> TorusField:
    """Evaluate the Fourier series on the lattice:
    f(x_k) = (2pi)^{-3/2} sum_xi coeffs(xi) exp(i x_k.xi)."""
    M = F.lattice.M
    v = _fft.ifftn(F.coeffs, workers=get_workers())
    v *= M**3 / _FWD
    return TorusField(F.lattice, v, F.timestamp)


def propagate(F: SpectralField, t: float) -> SpectralField:
    """Apply the free propagator e^{i t Laplacian}: multiply each coefficient
    by exp(-i t |xi|^2).  Unitary on every Sobolev space; advances the
    timestamp by t."""
    phase = np.exp(F.lattice.xi_sq * (-1j * t))
    return SpectralField(F.lattice, F.coeffs * phase, F.timestamp + t)


def dyadic_shells(lattice: Lattice) -> list[int]:
    """Dyadic shell indices 1, 2, 4, ..., M/2 usable on this lattice."""
    out = [1]
    while out[-1] < lattice.M // 2:
        out.append(out[-1] * 2)
    return out


def _is_dyadic(N: int) -> bool:
    return N >= 1 and (N & (N - 1)) == 0


def _clamp_dyadic(lattice: Lattice, N: int) -> int:
    if not _is_dyadic(N):
        raise ValueError(f"projection frequency must be dyadic (2^k), got {N}")
    cap = lattice.M // 2
    if N > cap:
        warnings.warn(
            f"projection frequency {N} exceeds M/2 = {cap}; clamped",
            RuntimeWarning,
            stacklevel=3,
        )
        return cap
    return N


def lp_multiplier(lattice: Lattice, N: int, kind: str = "shell") -> np.ndarray:
    """Real symbol of P_{<=N} (kind='leq') or the dyadic shell P_N
    (kind='shell') on the full 3-D frequency lattice."""
    if kind not in ("leq", "shell"):
        raise ValueError(f"kind must be 'leq' or 'shell', got {kind!r}")
    freq = lattice.freq.astype(np.float64)

    def low(n):
        w = eta1(freq / n) ** 2
        return w[:, None, None] * w[None, :, None] * w[None, None, :]

    if kind == "leq" or N == 1:
        return low(N)
    return low(N) - low(N // 2)


def lp_project(F: SpectralField, N: int, kind: str = "shell") -> SpectralField:
    """Littlewood-Paley projection of a spectral field.

    kind='leq' applies P_{<=N}; kind='shell' applies the dyadic difference
    P_N (with P_1 = P_{<=1}).  N must be a power of two; N > M/2 is clamped
    to M/2 with a RuntimeWarning.
    """
    N = _clamp_dyadic(F.lattice, N)
    mult = lp_multiplier(F.lattice, N, kind)
    return SpectralField(F.lattice, F.coeffs * mult, F.timestamp)


def cube_project(F: SpectralField, center, side: int) -> SpectralField:
    """Sharp restriction to the frequency cube of the given side anchored at
    center: per axis, frequencies in [c - side//2, c - side//2 + side).

    Cubes of one side taken over a translated partition of the lattice are
    mutually orthogonal and sum to the identity.
    """
    side = int(side)
    if side < 1:
        raise ValueError(f"cube side must be >= 1, got {side}")
    center = [int(c) for c in center]
    if len(center) != 3:
        raise ValueError("cube center must have three integer components")
    freq = F.lattice.freq
    masks = []
    for c in center:
        lo = c - side // 2
        masks.append((freq >= lo) & (freq < lo + side))
    m = (
        masks[0][:, None, None]
        & masks[1][None, :, None]
        & masks[2][None, None, :]
    )
    return SpectralField(F.lattice, np.where(m, F.coeffs, 0.0), F.timestamp)


def cube_partition(lattice: Lattice, side: int) -> list[tuple[int, int, int]]:
    """Centers of a partition of the frequency lattice into cubes of the
    given side (side must divide M).  Feeding these to :func:`cube_project`
    tiles the identity."""
    side = int(side)
    M = lattice.M
    if side < 1 or M % side != 0:
        raise ValueError(f"side {side} does not divide M = {M}")
    corners = range(-M // 2, M // 2, side)
    centers = [c + side // 2 for c in corners]
    return [(a, b, c) for a in centers for b in centers for c in centers]


def frame_operator(F: SpectralField, t0: float, x0) -> SpectralField:
    """Renormalization to the frame (t0, x0):
    (Pi_{t0,x0} f)(x) = (e^{-i t0 Laplacian} f)(x - x0).

    Acts diagonally by the unimodular multiplier
    exp(i t0 |xi|^2 - i x0.xi), hence is an isometry of every H^s, and
    composes additively in t0 at x0 = 0.
    """
    x0 = np.asarray(x0, dtype=float)
    if x0.shape != (3,):
        raise ValueError("x0 must be a 3-vector")
    lat = F.lattice
    f = lat.freq.astype(np.float64)
    phase = lat.xi_sq * (1j * t0)
    phase = phase - 1j * (
        x0[0] * f[:, None, None]
        + x0[1] * f[None, :, None]
        + x0[2] * f[None, None, :]
    )
    return SpectralField(lat, F.coeffs * np.exp(phase), F.timestamp)


def sobolev_norm(F: SpectralField, s: float) -> float:
    """H^s norm: (sum <xi>^{2s} |coeffs|^2)^{1/2}, <xi>^2 = 1 + |xi|^2."""
    w = (1.0 + F.lattice.xi_sq) ** s
    return float(np.sqrt(np.sum(w * (F.coeffs.real**2 + F.coeffs.imag**2))))


def h_dot1_norm(F: SpectralField) -> float:
    """Homogeneous H^1 seminorm: (sum |xi|^2 |coeffs|^2)^{1/2}."""
    w = F.lattice.xi_sq
    return float(np.sqrt(np.sum(w * (F.coeffs.real**2 + F.coeffs.imag**2))))


def lebesgue_norm(f: TorusField, p: float) -> float:
    """L^p norm by the rectangle rule on the sampling grid; p = inf gives the
    max of |f| over the grid."""
    a = np.abs(f.values)
    if np.isinf(p):
        return float(a.max())
    p = float(p)
    if p < 1.0:
        raise ValueError(f"Lebesgue exponent must be >= 1, got {p}")
    vol = f.lattice.cell_volume
    m = float(a.max())
    if m == 0.0:
        return 0.0
    # factor out the max so that large p cannot overflow
    return m * float(np.sum((a / m) ** p) * vol) ** (1.0 / p)


class Pairings(NamedTuple):
    l2: complex
    h1: complex
    l6: float


def inner_products(f: TorusField, g: TorusField) -> Pairings:
    """L^2, H^1 and L^6-type pairings of two physical fields.

    l2 = integral f conj(g); h1 adds the gradient pairing (computed
    spectrally as sum <xi>^2 Ff conj(Fg)); l6 = integral |f|^3 |g|^3, the
    cross term controlling sixth-power expansions.
    """
    if f.lattice != g.lattice:
        raise ValueError("fields live on different lattices")
    Ff = forward_transform(f)
    Fg = forward_transform(g)
    l2 = complex(np.sum(Ff.coeffs * np.conj(Fg.coeffs)))
    h1 = complex(np.sum((1.0 + f.lattice.xi_sq) * Ff.coeffs * np.conj(Fg.coeffs)))
    vol = f.lattice.cell_volume
    l6 = float(np.sum(np.abs(f.values) ** 3 * np.abs(g.values) ** 3) * vol)
    return Pairings(l2=l2, h1=h1, l6=l6)
