"""Tests for transforms, propagator, projections and norms.

The forward transform is checked against a direct O(M^6) DFT summation
oracle implementing the quadrature definition independently of any FFT.
"""

import numpy as np
import pytest

from tnls.cutoffs import eta1
from tnls.fields import Lattice, SpectralField, TorusField
from tnls.spectral import (
    cube_partition,
    cube_project,
    dyadic_shells,
    forward_transform,
    frame_operator,
    h_dot1_norm,
    inner_products,
    inverse_transform,
    lebesgue_norm,
    lp_project,
    propagate,
    sobolev_norm,
)

from conftest import random_field, random_spectral, rng_for

TWO_PI = 2.0 * np.pi


def dft_oracle(f: TorusField) -> np.ndarray:
    """Brute-force quadrature DFT: coeffs(xi) = (2pi)^{3/2} M^-3 sum_k
    f(x_k) exp(-i x_k . xi), with the package's Nyquist convention applied.
    """
    M = f.lattice.M
    freq = f.lattice.freq
    x = f.lattice.x
    out = np.zeros((M, M, M), dtype=complex)
    for a, xi1 in enumerate(freq):
        for b, xi2 in enumerate(freq):
            for c, xi3 in enumerate(freq):
                if -(M // 2) in (xi1, xi2, xi3):
                    continue
                phase = np.exp(
                    -1j
                    * (
                        xi1 * x[:, None, None]
                        + xi2 * x[None, :, None]
                        + xi3 * x[None, None, :]
                    )
                )
                out[a, b, c] = np.sum(f.values * phase)
    return out * (TWO_PI**1.5 / M**3)


def single_mode(lattice: Lattice, xi, amplitude=1.0) -> TorusField:
    x1, x2, x3 = lattice.grids()
    vals = amplitude * np.exp(1j * (xi[0] * x1 + xi[1] * x2 + xi[2] * x3))
    return TorusField(lattice, vals)


class TestForwardTransform:
    def test_matches_bruteforce_dft_oracle(self):
        """Random 4^3 field agrees with the direct summation oracle."""
        lat = Lattice(4)
        rng = rng_for(101)
        f = TorusField(
            lat, rng.standard_normal(lat.shape) + 1j * rng.standard_normal(lat.shape)
        )
        F = forward_transform(f)
        expected = dft_oracle(f)
        np.testing.assert_allclose(F.coeffs, expected, rtol=0, atol=1e-12)

    def test_constant_field(self, lat8):
        """f == 1 has the single coefficient (2pi)^{3/2} at xi = 0."""
        f = TorusField(lat8, np.ones(lat8.shape))
        F = forward_transform(f)
        assert abs(F.coeffs[0, 0, 0] - TWO_PI**1.5) < 1e-12
        rest = F.coeffs.copy()
        rest[0, 0, 0] = 0.0
        assert np.abs(rest).max() < 1e-12

    def test_single_mode_lands_on_its_frequency(self, lat8):
        f = single_mode(lat8, (1, 0, 0), amplitude=2.0 - 1.0j)
        F = forward_transform(f)
        assert abs(F.coeffs[1, 0, 0] - (2.0 - 1.0j) * TWO_PI**1.5) < 1e-12

    def test_nyquist_rows_zeroed(self, lat8):
        rng = rng_for(102)
        f = TorusField(
            lat8,
            rng.standard_normal(lat8.shape) + 1j * rng.standard_normal(lat8.shape),
        )
        F = forward_transform(f)
        assert np.all(F.coeffs[lat8.nyquist_mask] == 0.0)

    def test_linearity(self, lat8):
        rng = rng_for(103)
        f = random_field(lat8, rng)
        g = random_field(lat8, rng)
        lhs = forward_transform(
            TorusField(lat8, 2.0 * f.values - 1.5j * g.values)
        ).coeffs
        rhs = 2.0 * forward_transform(f).coeffs - 1.5j * forward_transform(g).coeffs
        np.testing.assert_allclose(lhs, rhs, rtol=0, atol=1e-12)


class TestInverseTransform:
    def test_round_trip_left(self, lat16):
        """inverse(forward(f)) recovers band-limited f to 1e-12."""
        f = random_field(lat16, rng_for(104))
        g = inverse_transform(forward_transform(f))
        scale = np.abs(f.values).max()
        np.testing.assert_allclose(
            g.values, f.values, rtol=0, atol=1e-12 * scale
        )

    def test_round_trip_right(self, lat16):
        F = random_spectral(lat16, rng_for(105))
        G = forward_transform(inverse_transform(F))
        scale = np.abs(F.coeffs).max()
        np.testing.assert_allclose(G.coeffs, F.coeffs, rtol=0, atol=1e-12 * scale)

    def test_plancherel(self, lat16):
        """L^2 rectangle rule equals the coefficient l^2 norm."""
        f = random_field(lat16, rng_for(106))
        F = forward_transform(f)
        phys = lebesgue_norm(f, 2.0)
        spec = float(np.linalg.norm(F.coeffs))
        assert abs(phys - spec) < 1e-12 * spec


class TestPropagate:
    def test_unit_mode_at_pi_flips_sign(self, lat8):
        """exp(-i pi |xi|^2) = -1 on |xi|^2 = 1."""
        F = forward_transform(single_mode(lat8, (1, 0, 0)))
        G = propagate(F, np.pi)
        np.testing.assert_allclose(G.coeffs, -F.coeffs, rtol=0, atol=1e-12)

    def test_zero_time_identity(self, lat8):
        F = random_spectral(lat8, rng_for(107))
        np.testing.assert_allclose(propagate(F, 0.0).coeffs, F.coeffs)

    def test_unitary_every_sobolev(self, lat8):
        F = random_spectral(lat8, rng_for(108))
        G = propagate(F, 0.37)
        for s in (0.0, 1.0, 2.0):
            a, b = sobolev_norm(F, s), sobolev_norm(G, s)
            assert abs(a - b) < 1e-12 * a

    def test_group_law(self, lat8):
        F = random_spectral(lat8, rng_for(109))
        one = propagate(propagate(F, 0.21), 0.34)
        two = propagate(F, 0.55)
        scale = np.abs(F.coeffs).max()
        np.testing.assert_allclose(one.coeffs, two.coeffs, rtol=0, atol=1e-13 * scale)

    def test_timestamp_advances(self, lat8):
        F = random_spectral(lat8, rng_for(110))
        assert propagate(F, 0.25).timestamp == pytest.approx(0.25)


class TestLittlewoodPaley:
    def test_constant_in_shell_two_vanishes(self, lat8):
        """eta3(0/2) - eta3(0/1) = 0: the mean sits in no dyadic shell
        above the first."""
        F = forward_transform(TorusField(lat8, np.ones(lat8.shape)))
        P = lp_project(F, 2, kind="shell")
        assert np.abs(P.coeffs).max() < 1e-15

    def test_high_mode_escapes_low_pass(self, lat16):
        """eta1(3) = 0 kills the mode (3,0,0) under P_{<=1}.

        The threshold leaves room for FFT rounding, which scatters
        O(eps * amplitude) crumbs onto frequencies the symbol keeps.
        """
        F = forward_transform(single_mode(lat16, (3, 0, 0)))
        P = lp_project(F, 1, kind="leq")
        assert np.abs(P.coeffs).max() < 1e-12

    def test_shell_weight_matches_eta_difference(self, lat16):
        """Mode (3,0,0) in shell N=4 carries eta3(xi/4) - eta3(xi/2)."""
        F = forward_transform(single_mode(lat16, (3, 0, 0)))
        P = lp_project(F, 4, kind="shell")
        expected = (eta1(3 / 4) ** 2 - eta1(3 / 2) ** 2) * TWO_PI**1.5
        assert abs(P.coeffs[3, 0, 0] - expected) < 1e-12

    def test_telescoping_reconstructs_identity(self, lat16):
        F = random_spectral(lat16, rng_for(111))
        acc = np.zeros_like(F.coeffs)
        for N in dyadic_shells(lat16):
            acc += lp_project(F, N, kind="shell").coeffs
        scale = np.abs(F.coeffs).max()
        np.testing.assert_allclose(acc, F.coeffs, rtol=0, atol=1e-12 * scale)

    def test_leq_max_shell_is_identity(self, lat16):
        F = random_spectral(lat16, rng_for(112))
        P = lp_project(F, lat16.M // 2, kind="leq")
        scale = np.abs(F.coeffs).max()
        np.testing.assert_allclose(P.coeffs, F.coeffs, rtol=0, atol=1e-12 * scale)

    def test_distant_shells_have_disjoint_support(self, lat16):
        """P_N and P_N' annihilate each other once N >= 4 N'."""
        F = random_spectral(lat16, rng_for(113))
        a = lp_project(F, 8, kind="shell")
        b = lp_project(a, 2, kind="shell")
        assert np.abs(b.coeffs).max() == 0.0

    def test_not_idempotent(self, lat16):
        """Smooth symbols make P_N P_N != P_N on the transition band."""
        F = forward_transform(single_mode(lat16, (3, 0, 0)))
        once = lp_project(F, 2, kind="shell")
        twice = lp_project(once, 2, kind="shell")
        assert np.abs(once.coeffs - twice.coeffs).max() > 1e-3

    def test_non_dyadic_rejected(self, lat16):
        F = random_spectral(lat16, rng_for(114))
        with pytest.raises(ValueError, match="dyadic"):
            lp_project(F, 3)

    def test_clamp_above_half_lattice_warns(self, lat8):
        F = random_spectral(lat8, rng_for(115))
        with pytest.warns(RuntimeWarning, match="clamped"):
            P = lp_project(F, 8, kind="leq")
        Q = lp_project(F, 4, kind="leq")
        np.testing.assert_allclose(P.coeffs, Q.coeffs)


class TestCubeProject:
    def test_partition_sums_to_identity(self, lat8):
        F = random_spectral(lat8, rng_for(116))
        acc = np.zeros_like(F.coeffs)
        for center in cube_partition(lat8, 4):
            acc += cube_project(F, center, 4).coeffs
        scale = np.abs(F.coeffs).max()
        np.testing.assert_allclose(acc, F.coeffs, rtol=0, atol=1e-13 * scale)

    def test_partition_mutually_orthogonal(self, lat8):
        F = random_spectral(lat8, rng_for(117))
        centers = cube_partition(lat8, 4)
        pieces = [cube_project(F, c, 4).coeffs for c in centers]
        for i in range(len(pieces)):
            for j in range(i + 1, len(pieces)):
                assert abs(np.vdot(pieces[i], pieces[j])) == 0.0

    def test_single_mode_membership(self, lat16):
        F = forward_transform(single_mode(lat16, (3, 0, 0)))
        inside = cube_project(F, (3, 0, 0), 2)
        outside = cube_project(F, (6, 0, 0), 2)
        assert abs(inside.coeffs[3, 0, 0]) > 1.0
        # FFT rounding leaves O(eps * amplitude) crumbs on other modes.
        assert np.abs(outside.coeffs).max() < 1e-12

    def test_bad_side_rejected(self, lat8):
        F = random_spectral(lat8, rng_for(118))
        with pytest.raises(ValueError):
            cube_project(F, (0, 0, 0), 0)
        with pytest.raises(ValueError):
            cube_partition(lat8, 3)


class TestFrameOperator:
    def test_identity_frame(self, lat8):
        F = random_spectral(lat8, rng_for(119))
        G = frame_operator(F, 0.0, (0.0, 0.0, 0.0))
        np.testing.assert_allclose(G.coeffs, F.coeffs)

    def test_isometry_on_sobolev(self, lat8):
        F = random_spectral(lat8, rng_for(120))
        G = frame_operator(F, 0.4, (0.3, -1.0, 2.2))
        for s in (0.0, 1.0):
            assert abs(sobolev_norm(F, s) - sobolev_norm(G, s)) < 1e-12 * sobolev_norm(F, s)

    def test_time_composition(self, lat8):
        F = random_spectral(lat8, rng_for(121))
        one = frame_operator(frame_operator(F, 0.2, (0, 0, 0)), 0.3, (0, 0, 0))
        two = frame_operator(F, 0.5, (0, 0, 0))
        scale = np.abs(F.coeffs).max()
        np.testing.assert_allclose(one.coeffs, two.coeffs, rtol=0, atol=1e-12 * scale)

    def test_translation_moves_samples(self, lat8):
        """Translating by one grid step permutes the physical samples."""
        f = random_field(lat8, rng_for(122))
        F = forward_transform(f)
        step = TWO_PI / lat8.M
        g = inverse_transform(frame_operator(F, 0.0, (step, 0.0, 0.0)))
        np.testing.assert_allclose(
            g.values, np.roll(f.values, 1, axis=0), rtol=0, atol=1e-12
        )

    def test_pure_time_frame_is_backward_propagation(self, lat8):
        F = random_spectral(lat8, rng_for(123))
        G = frame_operator(F, 0.7, (0, 0, 0))
        H = propagate(F, -0.7)
        np.testing.assert_allclose(G.coeffs, H.coeffs, rtol=0, atol=1e-13)


class TestNorms:
    def test_constant_sobolev(self, lat8):
        f = TorusField(lat8, np.full(lat8.shape, 3.0))
        F = forward_transform(f)
        assert abs(sobolev_norm(F, 1.0) - 3.0 * TWO_PI**1.5) < 1e-12

    def test_single_mode_japanese_bracket(self, lat8):
        F = forward_transform(single_mode(lat8, (1, 0, 0)))
        expected = np.sqrt(2.0) * TWO_PI**1.5
        assert abs(sobolev_norm(F, 1.0) - expected) < 1e-12

    def test_homogeneous_h1_ignores_mean(self, lat8):
        f = TorusField(lat8, np.full(lat8.shape, 5.0))
        assert h_dot1_norm(forward_transform(f)) < 1e-12

    def test_lebesgue_constant_all_p(self, lat8):
        f = TorusField(lat8, np.full(lat8.shape, 2.0, dtype=complex))
        for p in (1.0, 2.0, 4.1, 6.0, 100.0):
            expected = 2.0 * TWO_PI ** (3.0 / p)
            assert abs(lebesgue_norm(f, p) - expected) < 1e-10 * expected
        assert lebesgue_norm(f, np.inf) == 2.0

    def test_lebesgue_rejects_bad_exponent(self, lat8):
        f = TorusField(lat8, np.ones(lat8.shape))
        with pytest.raises(ValueError):
            lebesgue_norm(f, 0.5)

    def test_norm_is_deterministic(self, lat16):
        f = random_field(lat16, rng_for(124))
        values = {lebesgue_norm(f, 4.1) for _ in range(5)}
        assert len(values) == 1


class TestInnerProducts:
    def test_constants(self, lat8):
        one = TorusField(lat8, np.ones(lat8.shape))
        p = inner_products(one, one)
        vol = TWO_PI**3
        assert abs(p.l2 - vol) < 1e-10
        assert abs(p.h1 - vol) < 1e-10
        assert abs(p.l6 - vol) < 1e-10

    def test_hermitian_symmetry(self, lat8):
        rng = rng_for(125)
        f = random_field(lat8, rng)
        g = random_field(lat8, rng)
        pfg = inner_products(f, g)
        pgf = inner_products(g, f)
        assert abs(pfg.l2 - np.conj(pgf.l2)) < 1e-10
        assert abs(pfg.h1 - np.conj(pgf.h1)) < 1e-10
        assert abs(pfg.l6 - pgf.l6) < 1e-12 * abs(pfg.l6)

    def test_l2_diagonal_matches_norm(self, lat8):
        f = random_field(lat8, rng_for(126))
        p = inner_products(f, f)
        assert abs(p.l2.real - lebesgue_norm(f, 2.0) ** 2) < 1e-10
        assert abs(p.l2.imag) < 1e-12

    def test_orthogonal_modes(self, lat8):
        f = single_mode(lat8, (1, 0, 0))
        g = single_mode(lat8, (2, 0, 0))
        p = inner_products(f, g)
        assert abs(p.l2) < 1e-12
        assert abs(p.h1) < 1e-12

    def test_lattice_mismatch_rejected(self, lat8, lat16):
        f = TorusField(lat8, np.ones(lat8.shape))
        g = TorusField(lat16, np.ones(lat16.shape))
        with pytest.raises(ValueError, match="lattice"):
            inner_products(f, g)


class TestLattice:
    def test_rejects_odd_or_small(self):
        for M in (3, 7, 2, 0, -4):
            with pytest.raises(ValueError):
                Lattice(M)

    def test_frequency_layout(self):
        lat = Lattice(8)
        assert list(lat.freq) == [0, 1, 2, 3, -4, -3, -2, -1]

    def test_nyquist_constructor_zeroing(self):
        lat = Lattice(4)
        c = np.ones(lat.shape, dtype=complex)
        F = SpectralField(lat, c)
        assert np.all(F.coeffs[lat.nyquist_mask] == 0.0)
        assert F.coeffs[0, 0, 0] == 1.0

    def test_rejects_nonfinite_values(self, lat8):
        v = np.ones(lat8.shape, dtype=complex)
        v[0, 0, 0] = np.nan
        with pytest.raises(ValueError, match="finite"):
            TorusField(lat8, v)
