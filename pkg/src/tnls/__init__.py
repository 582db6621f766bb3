"""Spectral laboratory for the quintic Schrodinger equation on the 3-torus.

The package splits into a numerical library and an experiment harness:

- :mod:`tnls.fields` / :mod:`tnls.spectral`: lattices, physical and
  spectral fields, the Fourier transform pair, derived norms.
- :mod:`tnls.cutoffs`: the smooth bump hierarchy shared by every
  frequency and space truncation.
- :mod:`tnls.evolution`: split-step integration of the quintic flow
  with selectable dealiasing, plus mass and energy.
- :mod:`tnls.spacetime`: the critical window norm, dispersive and
  trilinear inequality ratios.
- :mod:`tnls.weyl`: one-dimensional Weyl sums, kernel bounds, and the
  window extinction estimates.
- :mod:`tnls.profiles`: concentrating profiles, frames, divergence,
  pairing decay, and energy decoupling reports.
- :mod:`tnls.highlow`: high-low frequency interaction coefficients and
  their Schur row sums.
- :mod:`tnls.fieldio`: snapshot and trajectory files.
- :mod:`tnls.harness`: configs, reports, experiment runners, CLI.
"""

from .fields import Lattice, SpectralField, TorusField
from .spectral import forward_transform, inverse_transform, sobolev_norm

__all__ = [
    "Lattice",
    "SpectralField",
    "TorusField",
    "forward_transform",
    "inverse_transform",
    "sobolev_norm",
]
