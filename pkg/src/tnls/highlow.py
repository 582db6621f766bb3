"""High-low frequency interaction coefficients and their Schur sums.

The localized pump profile

    W(x, t) = N^4 eta3(N x) eta1(N^2 t)

(with x in the fundamental cube, where the chart is the identity) has a
space-time transform that factorizes into four 1-D integrals:

    (F W)(xi, tau) = N^{-1} A2(xi1/N) A2(xi2/N) A2(xi3/N) A1(tau/N^2),
    A1(u) = integral of eta1(s) e^{-ius} ds,
    A2(u) = integral of eta1(s)^2 e^{-ius} ds,

both real and even.  The interaction coefficient between two high modes
p, q outside the band B N is

    c_{p,q} = (1 - eta3)(p/(BN)) (1 - eta3)(q/(BN))
              * (F W)(p - q, |q|^2 - |p|^2),

real and symmetric in (p, q).  The transform here is the plain
unnormalized integral; that choice fixes the free constant left open by
the Fourier normalization and makes c_{p,p} = integral of W.

The 1-D integrals are computed as an exact closed form on the plateau
[-1, 1] plus composite Gauss-Legendre panels on the transition bands;
the panel count grows with |u| so that large frequency transfers stay
resolved (a fixed 64-node rule would not resolve them).  Schur row sums
enumerate q over the full |q|_inf <= P_max box in deterministic slab
order, with a numerically estimated tail for what the box cuts off.
"""

import math
from typing import NamedTuple, Sequence

import numpy as np
from numpy.polynomial import legendre as _leg

from .cutoffs import eta1, eta3

_PANEL_NODES = 32
_PANEL_SPAN = 16.0   # max |u| * width per panel, a few cycles of e^{ius}


def _transition_rule(u_max: float):
    """Composite Gauss-Legendre nodes and weights on [1, 2]."""
    panels = max(1, int(math.ceil(u_max / _PANEL_SPAN)))
    base_x, base_w = _leg.leggauss(_PANEL_NODES)
    edges = np.linspace(1.0, 2.0, panels + 1)
    half = 0.5 * (edges[1:] - edges[:-1])
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * base_x[None, :]).ravel()
    weights = (half[:, None] * base_w[None, :]).ravel()
    return nodes, weights


def cutoff_transform(u, squared: bool = False):
    """A1(u) (or A2(u) when squared) for scalar or array u.

    The plateau contributes 2 sin(u)/u exactly; the transition bands are
    integrated by composite panels sized to the largest |u| requested.
    """
    u_arr = np.atleast_1d(np.asarray(u, dtype=float))
    out = np.empty_like(u_arr)
    plateau = 2.0 * np.sinc(u_arr / math.pi)
    nodes, weights = _transition_rule(float(np.abs(u_arr).max()) if u_arr.size else 1.0)
    profile = eta1(nodes)
    if squared:
        profile = profile**2
    wprof = weights * profile
    # chunk the u axis so the outer product stays small
    step = max(1, int(4e6 // max(1, nodes.size)))
    for lo in range(0, u_arr.size, step):
        blk = u_arr.ravel()[lo : lo + step]
        trans = 2.0 * np.cos(np.multiply.outer(blk, nodes)) @ wprof
        out.ravel()[lo : lo + step] = trans
    out += plateau
    if np.ndim(u) == 0:
        return float(out[0])
    return out.reshape(np.shape(u))


def _require_dyadic(value: int, name: str) -> int:
    v = int(value)
    if v < 1 or (v & (v - 1)) != 0:
        raise ValueError(f"{name} must be a dyadic integer >= 1, got {value}")
    return v


def _band_factor(vecs: np.ndarray, BN: float) -> np.ndarray:
    """1 - eta3(v / BN) for an (..., 3) integer array."""
    v = np.asarray(vecs, dtype=float)
    return 1.0 - eta3(v[..., 0] / BN, v[..., 1] / BN, v[..., 2] / BN)


def hflf_coefficients(N: int, B: int, p, q):
    """Interaction coefficient c_{p,q}; p and q are integer 3-vectors or
    (..., 3) arrays of them (broadcast together).

    Real-valued; returned as float (arrays) to make the symmetry plain.
    """
    N = _require_dyadic(N, "N")
    B = _require_dyadic(B, "B")
    p_arr = np.asarray(p, dtype=float)
    q_arr = np.asarray(q, dtype=float)
    if p_arr.shape[-1] != 3 or q_arr.shape[-1] != 3:
        raise ValueError("p and q must be 3-vectors")
    BN = float(B * N)
    fp = _band_factor(p_arr, BN)
    fq = _band_factor(q_arr, BN)
    diff = p_arr - q_arr
    tau = np.sum(q_arr**2, axis=-1) - np.sum(p_arr**2, axis=-1)
    val = (
        fp
        * fq
        / N
        * cutoff_transform(diff[..., 0] / N, squared=True)
        * cutoff_transform(diff[..., 1] / N, squared=True)
        * cutoff_transform(diff[..., 2] / N, squared=True)
        * cutoff_transform(tau / N**2)
    )
    if np.ndim(val) == 0:
        return float(val)
    return val


def envelope(N: int, p, q) -> np.ndarray:
    """The reference decay profile (1+|p-q|/N)^{-10} (1+||q|^2-|p|^2|/N^2)^{-10}."""
    p_arr = np.asarray(p, dtype=float)
    q_arr = np.asarray(q, dtype=float)
    d = np.sqrt(np.sum((p_arr - q_arr) ** 2, axis=-1))
    tau = np.abs(np.sum(q_arr**2, axis=-1) - np.sum(p_arr**2, axis=-1))
    return (1.0 + d / N) ** -10 * (1.0 + tau / N**2) ** -10


class EnvelopeFit(NamedTuple):
    """One-constant domination |c| <= constant * envelope over a scan."""

    constant: float
    near_constant: float
    p_at: tuple
    q_at: tuple


class SchurRow(NamedTuple):
    p: tuple
    row_sum: float
    tail_estimate: float
    flagged: bool


_DIRECTIONS = (
    (1.0, 0.0, 0.0),
    (1.0, 1.0, 0.0),
    (1.0, 1.0, 1.0),
)


def _row_points(N: int, B: int, P_max: int) -> list:
    """Deterministic representative p set: a radius ladder just outside
    the band along three lattice directions, admissible rows only."""
    BN = B * N
    radii = sorted(
        {
            BN + 1,
            int(round(1.25 * BN)),
            int(round(1.5 * BN)),
            2 * BN,
            2 * BN + 2 * N,
            min(3 * BN, P_max),
            P_max,
        }
    )
    points = []
    for r in radii:
        if r < BN + 1 or r > P_max:
            continue
        for d in _DIRECTIONS:
            norm = math.sqrt(sum(c * c for c in d))
            p = tuple(int(round(r * c / norm)) for c in d)
            if max(abs(c) for c in p) <= BN:
                continue
            if max(abs(c) for c in p) > P_max:
                continue
            if p not in points:
                points.append(p)
    return points


def _tau_table(N: int, tau_lo: int, tau_hi: int) -> np.ndarray:
    return cutoff_transform(np.arange(tau_lo, tau_hi + 1, dtype=float) / N**2)


def hflf_schur_sums(N: int, B: int, P_max: int):
    """Row sums sum_q |c_{p,q}| over the box |q|_inf <= P_max for a
    representative set of rows p.

    Returns (max row sum, rows).  Each row records a numerical estimate
    of the mass the box cut off (the next 4N layers outside it, bounded
    by the separable factor structure); rows where that estimate is not
    negligible against the row sum are flagged as P_max-limited.  An
    empty admissible set (band swallows the box) gives (0.0, []).
    """
    N = _require_dyadic(N, "N")
    B = _require_dyadic(B, "B")
    P_max = int(P_max)
    if P_max < 1:
        raise ValueError("P_max must be >= 1")
    rows_p = _row_points(N, B, P_max)
    if not rows_p:
        return 0.0, []

    qv = np.arange(-P_max, P_max + 1)
    band_axis = eta1(qv / (B * N)) ** 2
    tau_lo = -3 * P_max**2 - 1
    tau_hi = 3 * P_max**2 + 1
    taus = _tau_table(N, tau_lo, tau_hi)
    abs_taus = np.abs(taus)

    rows = []
    for p in rows_p:
        fp = float(_band_factor(np.asarray(p, dtype=float), float(B * N)))
        a1 = np.abs(cutoff_transform((p[0] - qv) / N, squared=True))
        a2 = np.abs(cutoff_transform((p[1] - qv) / N, squared=True))
        a3 = np.abs(cutoff_transform((p[2] - qv) / N, squared=True))
        p_sq = p[0] ** 2 + p[1] ** 2 + p[2] ** 2
        q23_sq = qv[:, None] ** 2 + qv[None, :] ** 2
        cross = np.multiply.outer(a2, a3)
        band23 = np.multiply.outer(band_axis, band_axis)
        total = 0.0
        for i1 in range(qv.size):
            tau_idx = (q23_sq + (qv[i1] ** 2 - p_sq)) - tau_lo
            slab = cross * abs_taus[tau_idx] * (1.0 - band_axis[i1] * band23)
            total += a1[i1] * float(np.sum(slab))
        row_sum = fp * total / N

        # mass just outside the box, axis by axis (three symmetric caps)
        # Mass outside the box: any q there has |q| > P_max >= |p|, so the
        # transfer (q^2 - p^2)/N^2 is at least tau_out and the time factor
        # is pinned to its decayed range.
        tau_out = max(0, (P_max + 1) ** 2 - p_sq)
        probe = np.linspace(tau_out, tau_out + 8 * N**2, 129) / N**2
        tau_cap = float(np.abs(cutoff_transform(probe)).max())
        outside = np.arange(P_max + 1, P_max + 4 * N + 1)
        axis_sums = (float(a1.sum()), float(a2.sum()), float(a3.sum()))
        tail = 0.0
        for axis in range(3):
            gap = (
                np.abs(cutoff_transform((p[axis] - outside) / N, squared=True)).sum()
                + np.abs(cutoff_transform((p[axis] + outside) / N, squared=True)).sum()
            )
            others = math.prod(s for i, s in enumerate(axis_sums) if i != axis)
            tail += fp * float(gap) * others * tau_cap / N
        flagged = row_sum == 0.0 or tail > 1e-3 * row_sum
        rows.append(SchurRow(p=p, row_sum=row_sum, tail_estimate=tail, flagged=flagged))
    best = max(r.row_sum for r in rows)
    return best, rows


def envelope_fit(N: int, B: int, P_max: int, stride: int = 1) -> EnvelopeFit:
    """Fit the single domination constant max |c| / envelope over the
    representative rows against the full q box, and the same maximum
    restricted to |p - q|_inf <= 2N (the near region).

    Domination by one constant means the global and near constants agree:
    the ratio never grows in the tails.
    """
    N = _require_dyadic(N, "N")
    B = _require_dyadic(B, "B")
    rows_p = _row_points(N, B, P_max)
    if not rows_p:
        return EnvelopeFit(0.0, 0.0, (0, 0, 0), (0, 0, 0))
    qv = np.arange(-P_max, P_max + 1, stride)
    grid = np.stack(
        np.meshgrid(qv, qv, qv, indexing="ij"), axis=-1
    ).reshape(-1, 3)
    best = 0.0
    near_best = 0.0
    at = (rows_p[0], (0, 0, 0))
    for p in rows_p:
        p_arr = np.asarray(p)
        c = np.abs(hflf_coefficients(N, B, p_arr, grid))
        e = envelope(N, p_arr, grid)
        ratio = c / e
        k = int(np.argmax(ratio))
        if ratio[k] > best:
            best = float(ratio[k])
            at = (p, tuple(int(v) for v in grid[k]))
        near = np.max(np.abs(grid - p_arr), axis=-1) <= 2 * N
        if np.any(near):
            near_best = max(near_best, float(ratio[near].max()))
    return EnvelopeFit(
        constant=best, near_constant=near_best, p_at=at[0], q_at=at[1]
    )
