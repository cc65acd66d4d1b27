"""Channel construction and MSE/simulation checks against independent
scalar implementations and closed forms."""

import cmath
import math

import numpy as np
import pytest

from passcomp import (
    SystemGeometry,
    aircomp_mse,
    channel_matrix,
    effective_channel,
    freespace_channel,
    sample_users,
    simulate_aircomp,
    wavelength,
)
from passcomp.channel import channel_row

from conftest import random_layout


def scalar_feed_channel(geometry, user, m, pa_row):
    """Independent reference: per-element free-space gain times the in-guide
    phase, summed with plain python complex arithmetic."""
    wl = geometry.lightspeed / geometry.carrier_frequency
    total = 0j
    for v in pa_row:
        dist = math.sqrt((v - user[0]) ** 2
                         + (m * geometry.waveguide_spacing - user[1]) ** 2
                         + geometry.height ** 2)
        total += wl / (4 * math.pi * dist) * cmath.exp(
            -1j * (2 * math.pi / wl * dist
                   + 2 * math.pi * geometry.refractive_index / wl * v))
    return total


class TestWavelength:
    def test_reference_frequency(self):
        g = SystemGeometry()
        assert wavelength(g) == pytest.approx(0.010714285714285714, rel=1e-15)

    def test_identity_ratio(self):
        g = SystemGeometry(carrier_frequency=3.0e8)
        assert wavelength(g) == 1.0

    def test_halving(self):
        g = SystemGeometry(carrier_frequency=6.0e8)
        assert wavelength(g) == 0.5


class TestFreespace:
    def test_vertical_link(self):
        wl = 0.010714285714285714
        h = freespace_channel((10, 2, 0), (10, 2, 5), wl)
        assert abs(h) == pytest.approx(1.70523153312745e-4, rel=1e-12)
        # 5 m is 1400/3 wavelengths; the residual phase is +2*pi/3
        assert np.angle(h) == pytest.approx(2 * np.pi / 3, abs=1e-9)

    def test_distance_of_one_wavelength(self):
        wl = 0.02
        h = freespace_channel((0, 0, 0), (wl, 0, 0), wl)
        assert abs(h) == pytest.approx(1 / (4 * np.pi), rel=1e-14)
        assert np.angle(h) == pytest.approx(0.0, abs=1e-12)

    def test_inverse_distance_magnitude(self):
        wl = 0.01
        near = abs(freespace_channel((0, 0, 0), (0, 0, 3), wl))
        far = abs(freespace_channel((0, 0, 0), (0, 0, 6), wl))
        assert near == pytest.approx(2 * far, rel=1e-14)

    def test_coincident_points_rejected(self):
        with pytest.raises(ValueError):
            freespace_channel((1, 2, 0), (1, 2, 0), 0.01)


class TestEffectiveChannel:
    def test_single_element_at_feed_reduces_to_freespace(self):
        g = SystemGeometry(num_pas_per_waveguide=1)
        user = (0.0, 0.0, 0.0)   # directly below the feed of waveguide 0
        got = effective_channel(g, user, 0, [0.0])
        ref = freespace_channel(user, (0.0, 0.0, g.height), wavelength(g))
        assert got == pytest.approx(ref, rel=1e-12)
        assert abs(got) == pytest.approx(wavelength(g) / (4 * np.pi * g.height), rel=1e-12)

    def test_opposed_guide_phases_cancel(self):
        # equidistant elements whose in-guide phase difference is pi
        g = SystemGeometry(num_pas_per_waveguide=2)
        wl = wavelength(g)
        half_turn = wl / (2 * g.refractive_index)
        x0 = 10.0
        row = [x0 - half_turn / 2, x0 + half_turn / 2]
        user = (x0, 0.0, 0.0)
        got = effective_channel(g, user, 0, row)
        singles = sum(abs(freespace_channel(user, (v, 0.0, g.height), wl)) for v in row)
        assert abs(got) < singles
        assert abs(got) < 1e-10 * singles

    def test_against_scalar_reference(self):
        g = SystemGeometry()
        user = (10.0, 3.0, 0.0)
        row = [5.0, 15.0]
        got = effective_channel(g, user, 0, row)
        ref = scalar_feed_channel(g, user, 0, row)
        assert got == pytest.approx(ref, rel=1e-12)
        # frozen from a 40-digit evaluation of the same geometry
        assert got == pytest.approx(1.8511837589889842e-4 + 1.2254052314462113e-4j, rel=1e-12)


class TestChannelMatrix:
    def test_scalar_collapse(self):
        g = SystemGeometry(num_waveguides=1, num_pas_per_waveguide=1, num_users=1)
        users = np.array([[4.0, 2.0, 0.0]])
        layout = np.array([[7.5]])
        mat = channel_matrix(g, users, layout)
        assert mat.shape == (1, 1)
        assert mat[0, 0] == pytest.approx(effective_channel(g, users[0], 0, layout[0]), rel=1e-14)

    def test_user_permutation_permutes_columns(self):
        g = SystemGeometry()
        rng = np.random.default_rng(1)
        users = sample_users(g, 11)
        layout = random_layout(g, rng)
        perm = rng.permutation(g.num_users)
        direct = channel_matrix(g, users[perm], layout)
        permuted = channel_matrix(g, users, layout)[:, perm]
        np.testing.assert_array_equal(direct, permuted)

    def test_entrywise_oracle(self):
        g = SystemGeometry()
        rng = np.random.default_rng(2)
        users = sample_users(g, 22)
        layout = random_layout(g, rng)
        mat = channel_matrix(g, users, layout)
        for m in range(g.num_waveguides):
            for k in range(g.num_users):
                assert mat[m, k] == pytest.approx(
                    scalar_feed_channel(g, users[k], m, layout[m]), rel=1e-12)

    def test_matrix_matches_row_updates(self):
        # incremental row rebuilds must agree with the full construction
        g = SystemGeometry()
        rng = np.random.default_rng(3)
        users = sample_users(g, 33)
        layout = random_layout(g, rng)
        mat = channel_matrix(g, users, layout)
        rows = np.stack([channel_row(g, users, m, layout[m]) for m in range(g.num_waveguides)])
        np.testing.assert_array_equal(mat, rows)

    @pytest.mark.parametrize("seed", range(5))
    def test_magnitude_bound(self, seed):
        rng = np.random.default_rng(seed)
        g = SystemGeometry(
            num_waveguides=int(rng.integers(1, 5)),
            num_pas_per_waveguide=int(rng.integers(1, 5)),
            num_users=int(rng.integers(1, 5)),
            height=float(rng.uniform(1, 10)),
        )
        users = sample_users(g, seed + 100)
        layout = random_layout(g, rng)
        bound = g.num_pas_per_waveguide * wavelength(g) / (4 * np.pi * g.height)
        assert np.all(np.abs(channel_matrix(g, users, layout)) <= bound)

    def test_zero_refractive_index_drops_guide_phase(self):
        g = SystemGeometry(refractive_index=0.0, min_pa_spacing=0.005)
        rng = np.random.default_rng(4)
        users = sample_users(g, 44)
        layout = random_layout(g, rng)
        mat = channel_matrix(g, users, layout)
        wl = wavelength(g)
        for m in range(g.num_waveguides):
            for k in range(g.num_users):
                plain = sum(freespace_channel(users[k], (v, m * g.waveguide_spacing, g.height), wl)
                            for v in layout[m])
                assert mat[m, k] == pytest.approx(plain, rel=1e-14)


class TestMse:
    def test_zero_decoder_gives_user_count(self):
        g = SystemGeometry()
        rng = np.random.default_rng(5)
        users = sample_users(g, 55)
        mat = channel_matrix(g, users, random_layout(g, rng))
        amps = rng.uniform(0, 1e-2, g.num_users)
        w = np.zeros(g.num_waveguides, dtype=complex)
        assert aircomp_mse(w, mat, amps, g.effective_noise) == g.num_users

    def test_silent_users_leave_noise_floor(self):
        g = SystemGeometry()
        rng = np.random.default_rng(6)
        users = sample_users(g, 66)
        mat = channel_matrix(g, users, random_layout(g, rng))
        w = rng.standard_normal(g.num_waveguides) + 1j * rng.standard_normal(g.num_waveguides)
        amps = np.zeros(g.num_users)
        expected = g.num_users + g.effective_noise * np.sum(np.abs(w) ** 2)
        assert aircomp_mse(w, mat, amps, g.effective_noise) == pytest.approx(expected, rel=1e-14)

    def test_scalar_calculus_minimum(self):
        # real scalar case: (w g a - 1)^2 + nv w^2 has minimum nv/(g^2 a^2 + nv)
        gain, amp, nv = 2.0e-4, 3.0e-3, 2.0e-12
        w_best = gain * amp / (gain ** 2 * amp ** 2 + nv)
        channel = np.array([[gain + 0j]])
        best = aircomp_mse(np.array([w_best + 0j]), channel, np.array([amp]), nv)
        assert best == pytest.approx(nv / (gain ** 2 * amp ** 2 + nv), rel=1e-12)
        for bump in (0.99, 1.01):
            worse = aircomp_mse(np.array([w_best * bump + 0j]), channel, np.array([amp]), nv)
            assert worse > best


class TestSimulation:
    def test_silent_system_estimates_user_count(self):
        g = SystemGeometry()
        users = sample_users(g, 77)
        mat = channel_matrix(g, users, random_layout(g, np.random.default_rng(7)))
        w = np.zeros(g.num_waveguides, dtype=complex)
        amps = np.zeros(g.num_users)
        mean, stderr = simulate_aircomp(w, mat, amps, g.effective_noise, 50_000, seed=1)
        assert abs(mean - g.num_users) <= 4 * stderr

    @pytest.mark.parametrize("seed", range(5))
    def test_matches_analytic_mse(self, seed):
        from conftest import random_instance

        g, users, layout, mat, budgets, amps, w = random_instance(seed)
        analytic = aircomp_mse(w, mat, amps, g.effective_noise)
        mean, stderr = simulate_aircomp(w, mat, amps, g.effective_noise, 40_000, seed=seed)
        assert abs(mean - analytic) <= 4 * stderr

    def test_seed_determinism(self):
        from conftest import random_instance

        g, users, layout, mat, budgets, amps, w = random_instance(9)
        first = simulate_aircomp(w, mat, amps, g.effective_noise, 1000, seed=123)
        second = simulate_aircomp(w, mat, amps, g.effective_noise, 1000, seed=123)
        assert first == second
