"""Tests for profiles, frames, and orthogonality diagnostics."""

import math

import numpy as np
import pytest
from scipy.integrate import quad

from tnls.cutoffs import mollifier
from tnls.fields import Lattice, SpectralField, TorusField
from tnls.profiles import (
    EuclideanProfile,
    Frame,
    FrameSequence,
    bump_profile,
    callable_profile,
    euclidean_h1dot,
    euclidean_l2,
    frame_divergence,
    gaussian_profile,
    grid_profile,
    make_profile,
    orthogonality_decay,
    pythagorean_report,
    remainder_smallness,
    rescale_to_torus,
)
from tnls.spectral import (
    forward_transform,
    h_dot1_norm,
    inverse_transform,
    lp_project,
    propagate,
    sobolev_norm,
)


def zero_field(lat: Lattice) -> TorusField:
    return TorusField(lat, np.zeros(lat.shape, dtype=complex))


class TestEuclideanProfile:
    def test_default_bump_normalized(self):
        phi = bump_profile()
        assert phi.h1_norm == pytest.approx(1.0, rel=1e-8)
        assert phi.support_radius == 1.0

    def test_bump_vanishes_outside_support(self):
        phi = bump_profile()
        assert phi(1.2, 0.0, 0.0) == 0.0
        assert phi(0.8, 0.8, 0.8) == 0.0

    def test_bump_h1_matches_radial_quadrature(self):
        """Independent 1-D radial integral of |phi'|^2 against the box rule."""
        phi = bump_profile()
        c = abs(phi(0.0, 0.0, 0.0)) / mollifier(1.0)

        def dphi(r):
            s = 1.0 - r * r
            if s <= 1e-9:
                return 0.0
            return c * math.exp(-1.0 / s) / s**2 * 2.0 * r

        val, _ = quad(lambda r: 4 * math.pi * r * r * dphi(r) ** 2, 0, 1, limit=200)
        assert phi.h1_norm == pytest.approx(math.sqrt(val), rel=1e-6)

    def test_bump_l2_matches_radial_quadrature(self):
        phi = bump_profile()
        c = abs(phi(0.0, 0.0, 0.0)) / mollifier(1.0)
        val, _ = quad(
            lambda r: 4 * math.pi * r * r * (c * math.exp(-1.0 / (1.0 - r * r))) ** 2,
            0,
            1,
            limit=200,
        )
        assert euclidean_l2(phi) == pytest.approx(math.sqrt(val), rel=1e-6)

    def test_gaussian_h1_matches_radial_quadrature(self):
        sigma = 0.4
        g = gaussian_profile(sigma=sigma)
        val, _ = quad(
            lambda r: 4
            * math.pi
            * r**2
            * (r / sigma**2 * math.exp(-r * r / (2 * sigma**2))) ** 2,
            0,
            10,
            limit=200,
        )
        assert g.h1_norm == pytest.approx(math.sqrt(val), rel=1e-8)

    def test_rejects_radius_beyond_pi(self):
        with pytest.raises(ValueError):
            callable_profile(lambda x1, x2, x3: np.zeros_like(x1), 3.5)
        with pytest.raises(ValueError):
            gaussian_profile(sigma=1.0, support_radius=4.0)

    def test_rejects_nonpositive_radius(self):
        with pytest.raises(ValueError):
            callable_profile(lambda x1, x2, x3: np.zeros_like(x1), 0.0)

    def test_grid_profile_interpolates(self):
        phi = bump_profile()
        n = 64
        axis = np.linspace(-1.0, 1.0, n)
        samples = phi(axis[:, None, None], axis[None, :, None], axis[None, None, :])
        g = grid_profile(samples, 1.0)
        assert g.kind == "sampled grid"
        assert euclidean_l2(g) == pytest.approx(euclidean_l2(phi), rel=5e-2)
        assert g(2.0, 0.0, 0.0) == 0.0

    def test_scaled_is_linear(self):
        phi = bump_profile()
        doubled = phi.scaled(2.0)
        assert euclidean_l2(doubled) == pytest.approx(2 * euclidean_l2(phi), rel=1e-12)
        assert doubled.h1_norm == pytest.approx(2.0, rel=1e-8)

    def test_finite_difference_gradient_fallback(self):
        """A callable without analytic gradient gets central differences."""
        sigma = 0.4
        with_grad = gaussian_profile(sigma=sigma)
        without = callable_profile(
            lambda x1, x2, x3: np.exp(
                -(np.asarray(x1) ** 2 + np.asarray(x2) ** 2 + np.asarray(x3) ** 2)
                / (2 * sigma**2)
            ),
            with_grad.support_radius,
        )
        assert without.h1_norm == pytest.approx(with_grad.h1_norm, rel=1e-6)


class TestRescaleToTorus:
    def test_scale_one_small_support_is_identity(self):
        """With N = 1 and support inside radius 1/2 the cutoff is inert."""
        half = bump_profile(radius=0.5)
        lat = Lattice(32)
        f = rescale_to_torus(half, 1, lat)
        y1, y2, y3 = lat.centered()
        np.testing.assert_allclose(f.values, half(y1, y2, y3), atol=1e-15)

    def test_rejects_underresolved_lattice(self):
        phi = bump_profile()
        with pytest.raises(ValueError):
            rescale_to_torus(phi, 8, Lattice(16))
        rescale_to_torus(phi, 8, Lattice(32))

    def test_rejects_small_scale(self):
        with pytest.raises(ValueError):
            rescale_to_torus(bump_profile(), 0.5, Lattice(16))

    def test_l2_scaling_law(self):
        """The lattice L^2 norm tracks N^{-1} ||phi||_{L^2(R^3)}."""
        phi = bump_profile()
        target = euclidean_l2(phi)
        for N, M in ((4, 64), (16, 192)):
            F = forward_transform(rescale_to_torus(phi, N, Lattice(M)))
            l2 = math.sqrt(float(np.sum(np.abs(F.coeffs) ** 2)))
            assert l2 * N == pytest.approx(target, rel=2e-2)

    def test_h1dot_approaches_euclidean(self):
        """Scaling is H^1-dot invariant; the sampled norm converges to 1."""
        phi = bump_profile()
        F = forward_transform(rescale_to_torus(phi, 16, Lattice(256)))
        assert h_dot1_norm(F) == pytest.approx(1.0, rel=3e-2)

    def test_linear_in_profile(self):
        a, b = 1.7, -0.6 + 0.2j
        g1 = gaussian_profile(sigma=0.3)
        g2 = gaussian_profile(sigma=0.45)
        combo = callable_profile(
            lambda x1, x2, x3: a * g1(x1, x2, x3) + b * g2(x1, x2, x3),
            max(g1.support_radius, g2.support_radius),
        )
        lat = Lattice(32)
        f = rescale_to_torus(combo, 4, lat)
        f1 = rescale_to_torus(g1, 4, lat)
        f2 = rescale_to_torus(g2, 4, lat)
        np.testing.assert_allclose(
            f.values, a * f1.values + b * f2.values, atol=1e-12
        )


class TestMakeProfile:
    def test_trivial_frame_equals_rescale(self):
        phi = bump_profile()
        lat = Lattice(32)
        a = make_profile(phi, Frame(4, 0.0), lat)
        b = rescale_to_torus(phi, 4, lat)
        np.testing.assert_array_equal(a.values, b.values)

    def test_h1_independent_of_frame_point(self):
        phi = bump_profile()
        lat = Lattice(64)
        frames = [
            Frame(4, 0.0),
            Frame(4, 0.3, (1.0, 2.0, 3.0)),
            Frame(4, -0.7, (0.0, math.pi, 0.1)),
        ]
        norms = [
            sobolev_norm(forward_transform(make_profile(phi, fr, lat)), 1.0)
            for fr in frames
        ]
        for n in norms[1:]:
            assert n == pytest.approx(norms[0], rel=1e-12)

    def test_composition_against_dense_oracle(self):
        """Frame (4, 0.01, (pi,0,0)) recomputed with raw FFT calls."""
        phi = bump_profile()
        lat = Lattice(64)
        f = rescale_to_torus(phi, 4, lat)
        got = make_profile(phi, Frame(4, 0.01, (math.pi, 0.0, 0.0)), lat)

        c = np.fft.fftn(f.values) * (2 * math.pi) ** 1.5 / lat.M**3
        fr = np.fft.fftfreq(lat.M, 1.0 / lat.M).astype(float)
        x2 = fr[:, None, None] ** 2 + fr[None, :, None] ** 2 + fr[None, None, :] ** 2
        ny = (
            (fr[:, None, None] == -32)
            | (fr[None, :, None] == -32)
            | (fr[None, None, :] == -32)
        )
        c[ny] = 0.0
        c *= np.exp(1j * 0.01 * x2)
        vals = np.fft.ifftn(c) * lat.M**3 / (2 * math.pi) ** 1.5
        vals = np.roll(vals, lat.M // 2, axis=0)
        np.testing.assert_allclose(got.values, vals, atol=1e-12)


class TestFrames:
    def test_validation(self):
        with pytest.raises(ValueError):
            Frame(0.5, 0.0)
        with pytest.raises(ValueError):
            Frame(2.0, 0.0, (0.0, 0.0))

    def test_divergence_identical(self):
        A = Frame(4, 0.2, (1.0, 0.0, 2.0))
        assert frame_divergence(A, A) == 0.0

    def test_divergence_scale_doubling(self):
        assert frame_divergence(Frame(4, 0.0), Frame(8, 0.0)) == pytest.approx(
            math.log(2.0), rel=1e-14
        )

    def test_divergence_time_offset(self):
        assert frame_divergence(
            Frame(4, 0.0, (0.0, 0.0, 0.0)), Frame(4, 0.5, (0.0, 0.0, 0.0))
        ) == pytest.approx(8.0, rel=1e-14)

    def test_divergence_symmetric(self):
        A = Frame(2, 0.0, (0.0, 0.0, 0.0))
        B = Frame(8, 0.1, (1.0, 0.0, 0.0))
        assert frame_divergence(A, B) == frame_divergence(B, A)

    def test_divergence_uses_torus_metric(self):
        A = Frame(4, 0.0, (0.1, 0.0, 0.0))
        B = Frame(4, 0.0, (2 * math.pi - 0.1, 0.0, 0.0))
        assert frame_divergence(A, B) == pytest.approx(4 * 0.2, rel=1e-12)

    def test_sequence_container(self):
        seq = FrameSequence([Frame(2, 0.0), Frame(4, 0.0)], euclidean=True)
        assert len(seq) == 2
        assert seq[1].N == 4
        assert seq.euclidean


class TestOrthogonalityDecay:
    def test_same_frame_pairing_near_euclidean(self):
        """Identical frames: the H^1 pairing approaches the R^3 H^1-dot
        pairing of the (normalized) profile with itself."""
        phi = bump_profile()
        rows = orthogonality_decay(
            phi, phi, [Frame(4, 0.0)], [Frame(4, 0.0)], Lattice(64)
        )
        assert rows[0].divergence == 0.0
        assert rows[0].h1 == pytest.approx(1.0, rel=5e-2)

    def test_x_separation_kills_pairings(self):
        """Smooth well-resolved profiles separated by pi: all pairings die."""
        gau = gaussian_profile(sigma=0.3)
        rows = orthogonality_decay(
            gau,
            gau,
            [Frame(4, 0.0, (0.0, 0.0, 0.0))],
            [Frame(4, 0.0, (math.pi, 0.0, 0.0))],
            Lattice(128),
        )
        assert rows[0].h1 <= 1e-8
        assert rows[0].cubic <= 1e-8
        assert rows[0].l2 <= 1e-8

    def test_bump_value_pairings_vanish_when_disjoint(self):
        """The compact bump's value-based pairing is exactly disjoint."""
        phi = bump_profile()
        rows = orthogonality_decay(
            phi,
            phi,
            [Frame(4, 0.0, (0.0, 0.0, 0.0))],
            [Frame(4, 0.0, (math.pi, 0.0, 0.0))],
            Lattice(96),
        )
        assert rows[0].cubic <= 1e-10

    def test_scale_separation_sweep(self):
        """N_B = 4 N_A pairings decrease as N_A grows, each row on a
        lattice resolving its finer scale."""
        phi = bump_profile()
        fa = [Frame(n, 0.0) for n in (2, 4, 8)]
        fb = [Frame(4 * n, 0.0) for n in (2, 4, 8)]
        lats = [Lattice(64), Lattice(128), Lattice(256)]
        rows = orthogonality_decay(phi, phi, fa, fb, lats)
        h1s = [r.h1 for r in rows]
        assert h1s[0] > h1s[1] > h1s[2]
        for r in rows:
            assert r.divergence == pytest.approx(math.log(4.0), rel=1e-12)

    def test_length_mismatch_rejected(self):
        phi = bump_profile()
        with pytest.raises(ValueError):
            orthogonality_decay(phi, phi, [Frame(2, 0.0)], [], Lattice(16))

    def test_unresolvable_scale_flagged(self):
        phi = bump_profile()
        rows = orthogonality_decay(
            phi, phi, [Frame(40, 0.0)], [Frame(40, 0.0)], Lattice(64)
        )
        assert rows[0].truncated
        assert math.isnan(rows[0].h1)


class TestPythagoreanReport:
    def test_single_profile_defects_vanish(self):
        lat = Lattice(32)
        p = rescale_to_torus(bump_profile(), 4, lat)
        rep = pythagorean_report(zero_field(lat), [p], zero_field(lat))
        assert rep.l2_defect == 0.0
        assert rep.h1dot_defect == 0.0
        assert rep.l6_defect == 0.0
        assert rep.relative() == {"l2": 0.0, "h1dot": 0.0, "l6": 0.0}

    def test_disjoint_supports(self):
        """Exact translation of a smooth profile: all defects at rounding."""
        gau = gaussian_profile(sigma=0.3)
        lat = Lattice(192)
        p1 = rescale_to_torus(gau, 4, lat)
        p2 = TorusField(lat, np.roll(p1.values, lat.M // 2, axis=0))
        rep = pythagorean_report(zero_field(lat), [p1, p2], zero_field(lat))
        assert abs(rep.l2_defect) <= 1e-10
        assert abs(rep.h1dot_defect) <= 1e-10
        assert abs(rep.l6_defect) <= 1e-10

    def test_two_scales_with_background(self):
        phi = bump_profile()
        lat = Lattice(64)
        g = TorusField(lat, 0.15 * rescale_to_torus(phi, 1, lat).values)
        p1 = make_profile(phi, Frame(2, 0.0, (2.0, 0.0, 0.0)), lat)
        p2 = make_profile(phi, Frame(8, 0.0, (0.0, -2.0, 1.0)), lat)
        rep = pythagorean_report(g, [p1, p2], zero_field(lat))
        rel = rep.relative()
        assert rel["h1dot"] <= 5e-2
        assert rel["l2"] <= 5e-2

    def test_lattice_mismatch_rejected(self):
        with pytest.raises(ValueError):
            pythagorean_report(
                zero_field(Lattice(16)),
                [zero_field(Lattice(32))],
                zero_field(Lattice(16)),
            )


class TestRemainderSmallness:
    def test_zero_remainder(self):
        value, table = remainder_smallness(zero_field(Lattice(16)))
        assert value == 0.0
        assert all(v == 0.0 for v in table.values())

    def test_single_shell_matches_direct_scan(self):
        lat = Lattice(16)
        rng = np.random.default_rng(31)
        coeffs = rng.standard_normal(lat.shape) + 1j * rng.standard_normal(lat.shape)
        F = lp_project(SpectralField(lat, coeffs.astype(complex)), 4, kind="shell")
        times = np.linspace(-0.5, 0.5, 9)
        value, table = remainder_smallness(F, times)

        piece = lp_project(F, 4, kind="shell")
        best = 0.0
        for t in times:
            vals = inverse_transform(propagate(piece, float(t))).values
            best = max(best, float(np.abs(vals).max()))
        assert table[4] == pytest.approx(best / 2.0, rel=1e-12)
        assert value == max(table.values())
