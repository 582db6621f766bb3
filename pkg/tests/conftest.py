"""Shared fixtures and helpers for the test suite."""

import numpy as np
import pytest

from tnls.fields import Lattice, SpectralField, TorusField
from tnls.spectral import inverse_transform


def rng_for(seed: int) -> np.random.Generator:
    """Counter-based generator so every test owns an independent stream."""
    return np.random.Generator(np.random.Philox(key=seed))


def random_spectral(
    lattice: Lattice, rng: np.random.Generator, decay: float = 0.0
) -> SpectralField:
    """Random band-limited spectral field (Nyquist rows vanish by
    construction).  decay > 0 damps coefficients by exp(-|xi|^2 / decay^2)
    to make smooth fields."""
    shape = lattice.shape
    c = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    if decay > 0.0:
        c *= np.exp(-lattice.xi_sq / decay**2)
    c[lattice.nyquist_mask] = 0.0
    return SpectralField(lattice, c)


def random_field(
    lattice: Lattice, rng: np.random.Generator, decay: float = 0.0
) -> TorusField:
    """Physical-space counterpart of :func:`random_spectral`."""
    return inverse_transform(random_spectral(lattice, rng, decay))


@pytest.fixture
def lat8() -> Lattice:
    return Lattice(8)


@pytest.fixture
def lat16() -> Lattice:
    return Lattice(16)
