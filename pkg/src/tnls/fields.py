"""Lattice and field containers for the torus (R/2piZ)^3.

A ``Lattice`` fixes the discretization: M equispaced samples per dimension at
x = 2*pi*k/M and the dual integer frequencies in FFT layout.  ``TorusField``
holds physical samples, ``SpectralField`` holds Fourier coefficients under the
symmetric (2*pi)^{-3/2} convention (see :mod:`tnls.spectral`).  Fields are
value objects: operations never mutate them, they return new instances.

The Nyquist rows (any frequency component equal to -M/2) are zeroed whenever a
SpectralField is constructed.  The propagator phase exp(-i*t*|xi|^2) and the
projection symbols are even in xi; keeping the unpaired -M/2 mode would break
that symmetry, so the usable band is |xi_i| <= M/2 - 1.
"""

from __future__ import annotations

import numpy as np

__all__ = ["Lattice", "TorusField", "SpectralField"]


class Lattice:
    """Cubic sampling lattice: M points per dimension, M even and >= 4.

    Caches the 1-D coordinate and frequency arrays and (lazily) the 3-D
    |xi|^2 table, all shared by every field on the lattice.
    """

    def __init__(self, M: int):
        M = int(M)
        if M < 4 or M % 2 != 0:
            raise ValueError(f"lattice size must be even and >= 4, got {M}")
        self.M = M
        self.x = 2.0 * np.pi * np.arange(M) / M
        self.freq = np.fft.fftfreq(M, d=1.0 / M).astype(np.int64)
        self._xi_sq = None
        self._nyquist = None

    @property
    def shape(self):
        return (self.M, self.M, self.M)

    @property
    def cell_volume(self) -> float:
        """Volume (2*pi/M)^3 of one sampling cell, the rectangle-rule weight."""
        return (2.0 * np.pi / self.M) ** 3

    @property
    def xi_sq(self) -> np.ndarray:
        """|xi|^2 on the full 3-D frequency lattice, FFT layout, float64."""
        if self._xi_sq is None:
            f2 = (self.freq.astype(np.float64)) ** 2
            self._xi_sq = (
                f2[:, None, None] + f2[None, :, None] + f2[None, None, :]
            )
        return self._xi_sq

    @property
    def nyquist_mask(self) -> np.ndarray:
        """Boolean mask of the rows with any frequency component == -M/2."""
        if self._nyquist is None:
            ny = self.freq == -(self.M // 2)
            self._nyquist = (
                ny[:, None, None] | ny[None, :, None] | ny[None, None, :]
            )
        return self._nyquist

    def grids(self):
        """Broadcastable physical coordinate arrays (x1, x2, x3)."""
        x = self.x
        return x[:, None, None], x[None, :, None], x[None, None, :]

    def centered(self):
        """Coordinates folded to the fundamental cube (-pi, pi]^3,
        broadcastable like :meth:`grids`."""
        y = self.x.copy()
        y[y > np.pi] -= 2.0 * np.pi
        return y[:, None, None], y[None, :, None], y[None, None, :]

    def freq_grids(self):
        """Broadcastable integer frequency arrays (xi1, xi2, xi3)."""
        f = self.freq
        return f[:, None, None], f[None, :, None], f[None, None, :]

    def __eq__(self, other):
        return isinstance(other, Lattice) and other.M == self.M

    def __hash__(self):
        return hash(("Lattice", self.M))

    def __repr__(self):
        return f"Lattice(M={self.M})"


def _check_values(lattice: Lattice, arr: np.ndarray, what: str) -> np.ndarray:
    arr = np.ascontiguousarray(arr, dtype=np.complex128)
    if arr.shape != lattice.shape:
        raise ValueError(
            f"{what} shape {arr.shape} does not match lattice {lattice.shape}"
        )
    if not np.all(np.isfinite(arr.view(np.float64))):
        raise ValueError(f"{what} contains non-finite entries")
    return arr


class TorusField:
    """Physical samples u(x_k) on a Lattice, with an optional timestamp."""

    def __init__(self, lattice: Lattice, values, timestamp: float = 0.0):
        self.lattice = lattice
        self.values = _check_values(lattice, np.asarray(values), "field values")
        self.timestamp = float(timestamp)

    def copy(self) -> "TorusField":
        return TorusField(self.lattice, self.values.copy(), self.timestamp)

    def __repr__(self):
        return (
            f"TorusField(M={self.lattice.M}, t={self.timestamp:.6g}, "
            f"max|u|={np.abs(self.values).max():.3e})"
        )


class SpectralField:
    """Fourier coefficients on the dual lattice, FFT index layout.

    Construction zeroes the Nyquist rows; every SpectralField therefore
    satisfies coeffs[any xi_i == -M/2] == 0.
    """

    def __init__(self, lattice: Lattice, coeffs, timestamp: float = 0.0):
        self.lattice = lattice
        c = _check_values(lattice, np.asarray(coeffs), "coefficients")
        mask = lattice.nyquist_mask
        if np.any(c[mask] != 0):
            c = c.copy()
            c[mask] = 0.0
        self.coeffs = c
        self.timestamp = float(timestamp)

    def copy(self) -> "SpectralField":
        return SpectralField(self.lattice, self.coeffs.copy(), self.timestamp)

    def __repr__(self):
        return (
            f"SpectralField(M={self.lattice.M}, t={self.timestamp:.6g}, "
            f"l2={np.linalg.norm(self.coeffs):.3e})"
        )
