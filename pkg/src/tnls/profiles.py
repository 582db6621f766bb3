"""Concentrating profiles on the torus and their orthogonality diagnostics.

A Euclidean profile is a function on R^3 with a declared support radius
(at most pi, so the identity chart onto the fundamental cube makes sense;
larger radii are rejected rather than wrapped).  ``rescale_to_torus``
produces the concentrated field

    f_N(y) = N^(1/2) eta(N y / N^(1/2)) phi(N y),

where eta is the radial unit step of the cutoff module; ``make_profile``
follows with the frame renormalization (a free flow plus a translation,
an isometry of every Sobolev norm).  ``frame_divergence`` measures how
far apart two frames are, symmetrized over the argument order since the
finite-separation value, unlike the limit criterion it discretizes, is
order-dependent.  ``orthogonality_decay`` and ``pythagorean_report``
tabulate pairings and norm defects against that divergence; no boolean
"orthogonal" verdict is ever emitted, only tables.

Euclidean norms are computed by tensor-product Gauss-Legendre quadrature
on the support box; gradients are analytic where a closed form exists
and central differences otherwise.
"""

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional, Sequence, Union

import numpy as np
from numpy.polynomial import legendre as _leg

from .cutoffs import eta_ball, mollifier
from .fields import Lattice, SpectralField, TorusField
from .spectral import (
    dyadic_shells,
    forward_transform,
    frame_operator,
    h_dot1_norm,
    inner_products,
    inverse_transform,
    lp_project,
    propagate,
)

_QUAD_NODES = 72


def _box_rule(radius: float, n: int = _QUAD_NODES):
    """1-D Gauss-Legendre nodes and weights scaled to [-radius, radius]."""
    x, w = _leg.leggauss(n)
    return x * radius, w * radius


class EuclideanProfile:
    """A profile on R^3: an evaluator, a declared support radius, and the
    quadrature H^1-dot norm computed at construction.

    kind is one of "gaussian-like bump", "closed-form callable",
    "sampled grid".  The radius is a hard support bound for the bump and
    grid kinds and an effective decay radius for the gaussian-like kind;
    either way it must not exceed pi.
    """

    def __init__(
        self,
        kind: str,
        support_radius: float,
        func: Callable,
        grad: Optional[Callable] = None,
    ):
        if not 0.0 < support_radius <= math.pi:
            raise ValueError(
                f"support radius must lie in (0, pi], got {support_radius}"
            )
        self.kind = kind
        self.support_radius = float(support_radius)
        self.func = func
        self.grad = grad
        self.h1_norm = euclidean_h1dot(self)

    def __call__(self, x1, x2, x3):
        return self.func(x1, x2, x3)

    def scaled(self, factor: complex) -> "EuclideanProfile":
        """The profile multiplied by a constant."""
        f = self.func
        g = self.grad
        scaled_grad = None
        if g is not None:
            scaled_grad = lambda x1, x2, x3: tuple(factor * c for c in g(x1, x2, x3))
        return EuclideanProfile(
            self.kind,
            self.support_radius,
            lambda x1, x2, x3: factor * f(x1, x2, x3),
            scaled_grad,
        )


def euclidean_l2(phi: EuclideanProfile) -> float:
    """L^2(R^3) norm by tensor Gauss-Legendre on the support box."""
    x, w = _box_rule(phi.support_radius)
    vals = phi(x[:, None, None], x[None, :, None], x[None, None, :])
    w3 = w[:, None, None] * w[None, :, None] * w[None, None, :]
    return float(np.sqrt(np.sum(w3 * np.abs(vals) ** 2)))


def euclidean_h1dot(phi: EuclideanProfile) -> float:
    """H^1-dot (R^3) seminorm by quadrature; central differences when no
    analytic gradient is attached."""
    x, w = _box_rule(phi.support_radius)
    grids = (x[:, None, None], x[None, :, None], x[None, None, :])
    w3 = w[:, None, None] * w[None, :, None] * w[None, None, :]
    if phi.grad is not None:
        g = phi.grad(*grids)
        dens = sum(np.abs(c) ** 2 for c in g)
    else:
        h = phi.support_radius * 1e-5
        dens = 0.0
        for axis in range(3):
            shift = [g.copy() if i == axis else g for i, g in enumerate(grids)]
            shift[axis] = grids[axis] + h
            hi = phi(*shift)
            shift[axis] = grids[axis] - h
            lo = phi(*shift)
            dens = dens + np.abs((hi - lo) / (2.0 * h)) ** 2
    return float(np.sqrt(np.sum(w3 * dens)))


def bump_profile(radius: float = 1.0, amplitude: complex = 1.0) -> EuclideanProfile:
    """The default smooth compactly supported bump c * b(1 - |x/R|^2),
    with b the exponential mollifier and c fixed so that amplitude 1
    gives H^1-dot norm exactly 1 (by quadrature)."""

    def raw(x1, x2, x3):
        s = 1.0 - (np.asarray(x1) ** 2 + np.asarray(x2) ** 2 + np.asarray(x3) ** 2) / radius**2
        return mollifier(s)

    def raw_grad(x1, x2, x3):
        arrs = [np.asarray(c, dtype=float) for c in (x1, x2, x3)]
        s = 1.0 - (arrs[0] ** 2 + arrs[1] ** 2 + arrs[2] ** 2) / radius**2
        # b'(s) = b(s)/s^2; where b underflows to zero the product is zero
        safe = s > 1e-6
        fac = np.where(safe, mollifier(s) / np.where(safe, s, 1.0) ** 2, 0.0)
        return tuple(fac * (-2.0 * a / radius**2) for a in arrs)

    probe = EuclideanProfile("gaussian-like bump", radius, raw, raw_grad)
    c = amplitude / probe.h1_norm
    return probe.scaled(c)


def gaussian_profile(
    sigma: float = 0.4,
    amplitude: complex = 1.0,
    support_radius: Optional[float] = None,
) -> EuclideanProfile:
    """A gaussian A exp(-|x|^2 / (2 sigma^2)); the declared radius (default
    min(pi, 6 sigma)) is where the tail is treated as negligible."""
    radius = min(math.pi, 6.0 * sigma) if support_radius is None else support_radius

    def func(x1, x2, x3):
        r2 = np.asarray(x1) ** 2 + np.asarray(x2) ** 2 + np.asarray(x3) ** 2
        return amplitude * np.exp(-r2 / (2.0 * sigma**2))

    def grad(x1, x2, x3):
        v = func(x1, x2, x3)
        return tuple(-np.asarray(c) / sigma**2 * v for c in (x1, x2, x3))

    return EuclideanProfile("gaussian-like bump", radius, func, grad)


def callable_profile(
    func: Callable,
    support_radius: float,
    grad: Optional[Callable] = None,
) -> EuclideanProfile:
    return EuclideanProfile("closed-form callable", support_radius, func, grad)


def grid_profile(samples: np.ndarray, support_radius: float) -> EuclideanProfile:
    """A profile given by samples on a uniform grid over the support box,
    evaluated by trilinear interpolation and zero outside."""
    from scipy.interpolate import RegularGridInterpolator

    samples = np.asarray(samples, dtype=complex)
    if samples.ndim != 3 or len(set(samples.shape)) != 1:
        raise ValueError("samples must be a cubic 3-D array")
    n = samples.shape[0]
    axis = np.linspace(-support_radius, support_radius, n)
    interp = RegularGridInterpolator(
        (axis, axis, axis), samples, bounds_error=False, fill_value=0.0
    )

    def func(x1, x2, x3):
        pts = np.broadcast_arrays(
            np.asarray(x1, dtype=float),
            np.asarray(x2, dtype=float),
            np.asarray(x3, dtype=float),
        )
        stacked = np.stack([p.ravel() for p in pts], axis=-1)
        return interp(stacked).reshape(pts[0].shape)

    return EuclideanProfile("sampled grid", support_radius, func)


@dataclass(frozen=True)
class Frame:
    """A concentration frame (N, t0, x0) with N >= 1."""

    N: float
    t0: float
    x0: tuple = (0.0, 0.0, 0.0)

    def __post_init__(self):
        if self.N < 1.0:
            raise ValueError(f"frame scale must be >= 1, got {self.N}")
        if len(self.x0) != 3:
            raise ValueError("x0 must be a 3-vector")


@dataclass(frozen=True)
class FrameSequence:
    """An indexed family of frames with its declared classification."""

    frames: tuple
    euclidean: bool = False

    def __post_init__(self):
        object.__setattr__(self, "frames", tuple(self.frames))

    def __len__(self):
        return len(self.frames)

    def __getitem__(self, k):
        return self.frames[k]


def rescale_to_torus(phi: EuclideanProfile, N: float, lattice: Lattice) -> TorusField:
    """Sample the concentrated profile on the lattice.

    Requires N >= 1 and a lattice that resolves the concentration scale:
    M < 4N is rejected as under-resolved (M >= 8N is the comfortable
    regime).  Linear in phi.
    """
    if N < 1.0:
        raise ValueError(f"scale must be >= 1, got {N}")
    if lattice.M < 4 * N:
        raise ValueError(
            f"lattice M = {lattice.M} cannot resolve scale N = {N} (M < 4N)"
        )
    y1, y2, y3 = lattice.centered()
    root = math.sqrt(N)
    cut = eta_ball(root * y1, root * y2, root * y3)
    vals = math.sqrt(N) * cut * phi(N * y1, N * y2, N * y3)
    return TorusField(lattice, vals.astype(complex))


def make_profile(phi: EuclideanProfile, frame: Frame, lattice: Lattice) -> TorusField:
    """rescale_to_torus followed by the frame renormalization.

    The trivial frame (t0 = 0, x0 = 0) is the identity and returns the
    rescale output as is, without a band-limiting round trip.
    """
    f = rescale_to_torus(phi, frame.N, lattice)
    if frame.t0 == 0.0 and not any(frame.x0):
        return f
    F = frame_operator(forward_transform(f), frame.t0, frame.x0)
    return inverse_transform(F)


def _torus_dist(a, b) -> float:
    d = np.abs(np.asarray(a, dtype=float) - np.asarray(b, dtype=float))
    d = np.minimum(d % (2.0 * math.pi), 2.0 * math.pi - d % (2.0 * math.pi))
    return float(np.sqrt(np.sum(d**2)))


def frame_divergence(A: Frame, B: Frame) -> float:
    """Separation of two frames, symmetrized by taking both argument
    orders: max over orders of
    |ln(N_A/N_B)| + N_A^2 |t_A - t_B| + N_A dist(x_A, x_B)."""

    def one_sided(P: Frame, Q: Frame) -> float:
        return (
            abs(math.log(P.N / Q.N))
            + P.N**2 * abs(P.t0 - Q.t0)
            + P.N * _torus_dist(P.x0, Q.x0)
        )

    return max(one_sided(A, B), one_sided(B, A))


class OrthogonalityRow(NamedTuple):
    k: int
    divergence: float
    h1: float
    cubic: float
    l2: float
    truncated: bool


def orthogonality_decay(
    phi: EuclideanProfile,
    psi: EuclideanProfile,
    frames_a: Union[FrameSequence, Sequence[Frame]],
    frames_b: Union[FrameSequence, Sequence[Frame]],
    lattices: Union[Lattice, Sequence[Lattice]],
) -> list:
    """Tabulate the three pairings of the two profile families against
    frame divergence.

    Rows where the lattice cannot resolve a frame scale (M < 4N) carry
    NaN pairings and are flagged truncated instead of raising.
    """
    fa = list(frames_a.frames if isinstance(frames_a, FrameSequence) else frames_a)
    fb = list(frames_b.frames if isinstance(frames_b, FrameSequence) else frames_b)
    if len(fa) != len(fb):
        raise ValueError("frame sequences must have equal length")
    if isinstance(lattices, Lattice):
        lats = [lattices] * len(fa)
    else:
        lats = list(lattices)
        if len(lats) != len(fa):
            raise ValueError("one lattice per frame index is required")
    rows = []
    for k, (A, B, lat) in enumerate(zip(fa, fb, lats)):
        d = frame_divergence(A, B)
        if lat.M < 4 * max(A.N, B.N):
            rows.append(OrthogonalityRow(k, d, math.nan, math.nan, math.nan, True))
            continue
        u = make_profile(phi, A, lat)
        v = make_profile(psi, B, lat)
        pair = inner_products(u, v)
        rows.append(
            OrthogonalityRow(
                k, d, abs(pair.h1), pair.l6, abs(pair.l2), False
            )
        )
    return rows


@dataclass
class PythagoreanReport:
    """Norm expansions of f = g + sum of profiles + remainder.

    For L^2 and H^1-dot the defect is ||f||^2 minus the sum of the
    squares of the pieces; for L^6 it is the same with sixth powers.
    Relative defects are measured against the total (zero total gives a
    zero relative defect).
    """

    l2_total: float
    l2_pieces: float
    h1dot_total: float
    h1dot_pieces: float
    l6_total: float
    l6_pieces: float

    @property
    def l2_defect(self) -> float:
        return self.l2_total - self.l2_pieces

    @property
    def h1dot_defect(self) -> float:
        return self.h1dot_total - self.h1dot_pieces

    @property
    def l6_defect(self) -> float:
        return self.l6_total - self.l6_pieces

    def relative(self) -> dict:
        def rel(d, t):
            return abs(d) / t if t > 0.0 else 0.0

        return {
            "l2": rel(self.l2_defect, self.l2_total),
            "h1dot": rel(self.h1dot_defect, self.h1dot_total),
            "l6": rel(self.l6_defect, self.l6_total),
        }


def pythagorean_report(
    g: TorusField,
    profiles: Sequence[TorusField],
    remainder: TorusField,
) -> PythagoreanReport:
    """Orthogonality defects of the synthesis g + sum(profiles) + R."""
    pieces = [g, *profiles, remainder]
    lat = g.lattice
    for piece in pieces:
        if piece.lattice != lat:
            raise ValueError("all pieces must share one lattice")
    total_vals = sum(p.values for p in pieces)
    f = TorusField(lat, total_vals)

    def l2h1(field: TorusField):
        F = forward_transform(field)
        a2 = F.coeffs.real**2 + F.coeffs.imag**2
        return float(np.sum(a2)), float(np.sum(lat.xi_sq * a2))

    def l6(field: TorusField) -> float:
        return float(np.sum(np.abs(field.values) ** 6) * lat.cell_volume)

    f_l2, f_h1 = l2h1(f)
    p_l2, p_h1 = 0.0, 0.0
    for piece in pieces:
        a, b = l2h1(piece)
        p_l2 += a
        p_h1 += b
    return PythagoreanReport(
        l2_total=f_l2,
        l2_pieces=p_l2,
        h1dot_total=f_h1,
        h1dot_pieces=p_h1,
        l6_total=l6(f),
        l6_pieces=sum(l6(p) for p in pieces),
    )


def remainder_smallness(
    data: Union[TorusField, SpectralField],
    times: Optional[np.ndarray] = None,
) -> tuple:
    """Diagnostic sup over dyadic shells and sampled times of
    N^(-1/2) max |free flow of the shell projection|.

    A sampled lower bound on the true supremum; returns the best value
    and the per-shell table.
    """
    F = data if isinstance(data, SpectralField) else forward_transform(data)
    if times is None:
        times = np.linspace(-1.0, 1.0, 33)
    per_shell = {}
    for N in dyadic_shells(F.lattice):
        piece = lp_project(F, N, kind="shell")
        if not np.any(piece.coeffs):
            per_shell[N] = 0.0
            continue
        best = 0.0
        for t in np.asarray(times, dtype=float):
            spun = inverse_transform(propagate(piece, float(t)))
            best = max(best, float(np.abs(spun.values).max()))
        per_shell[N] = best / math.sqrt(N)
    value = max(per_shell.values()) if per_shell else 0.0
    return value, per_shell
