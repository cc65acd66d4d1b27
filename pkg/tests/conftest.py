import numpy as np
import pytest

from passcomp import SystemGeometry, sample_users


@pytest.fixture
def geometry():
    return SystemGeometry()


def random_layout(geometry, rng):
    """Feasible layout: sorted positions with the minimum spacing enforced."""
    while True:
        v = np.sort(rng.uniform(0, geometry.area_length_x,
                                (geometry.num_waveguides, geometry.num_pas_per_waveguide)),
                    axis=1)
        if geometry.num_pas_per_waveguide == 1 or \
                np.all(np.diff(v, axis=1) >= geometry.min_pa_spacing):
            return v


def random_instance(seed, geometry=None, budget=1e-5):
    """Deterministic physical instance: users, feasible layout, channel,
    amplitudes within budget, and a decoder near the optimum."""
    from passcomp import channel_matrix, optimal_decoder

    geometry = geometry or SystemGeometry()
    rng = np.random.default_rng(seed)
    users = sample_users(geometry, rng.integers(2 ** 63))
    layout = random_layout(geometry, rng)
    channel = channel_matrix(geometry, users, layout)
    budgets = np.full(geometry.num_users, budget)
    amplitudes = rng.uniform(0, 1, geometry.num_users) * np.sqrt(budgets)
    decoder = optimal_decoder(channel, amplitudes, geometry.effective_noise)
    jitter = 1 + 0.3 * rng.standard_normal(decoder.shape)
    return geometry, users, layout, channel, budgets, amplitudes, decoder * jitter
