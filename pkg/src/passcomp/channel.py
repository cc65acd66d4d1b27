"""Free-space channel construction and aggregation-error evaluation.

The link gain between a user and one pinching element is the line-of-sight
coefficient lambda * exp(-j*2*pi*dist/lambda) / (4*pi*dist).  Signals picked
up by the elements of one waveguide travel inside the guide to its feed point
at x = 0, which adds a pure phase 2*pi*refractive_index/lambda * x per element
(lossless guide).  Summing the element terms gives the effective feed-point
channel; stacking feeds over waveguides gives the M x K matrix G so that the
received vector is r = G P s + z with P = diag(amplitudes).
"""

from __future__ import annotations

import numpy as np

from . import kernels
from .geometry import SystemGeometry


def wavelength(geometry: SystemGeometry) -> float:
    """Carrier wavelength c / f."""
    if geometry.carrier_frequency <= 0:
        raise ValueError("carrier_frequency must be > 0")
    return geometry.lightspeed / geometry.carrier_frequency


def freespace_channel(user, pa, wl: float) -> complex:
    """Line-of-sight gain between two points at distance ||user - pa||.

    Raises ValueError for coincident points (singular gain).
    """
    diff = np.asarray(user, dtype=float) - np.asarray(pa, dtype=float)
    dist = float(np.linalg.norm(diff))
    if dist <= 0.0:
        raise ValueError("coincident user and element positions: channel is singular")
    return wl / (4.0 * np.pi * dist) * np.exp(-2j * np.pi * dist / wl)


def effective_channel(geometry: SystemGeometry, user, waveguide_index: int, pa_row) -> complex:
    """Feed-point channel of one waveguide: element gains summed with the
    in-guide propagation phase of each element position."""
    user = np.asarray(user, dtype=float)
    pa_row = np.ascontiguousarray(pa_row, dtype=float)
    row = kernels.channel_row(
        pa_row,
        geometry.waveguide_y(waveguide_index),
        np.array([user[0]]),
        np.array([user[1]]),
        geometry.height,
        wavelength(geometry),
        geometry.refractive_index,
    )
    return complex(row[0])


def channel_matrix(geometry: SystemGeometry, users: np.ndarray, layout: np.ndarray) -> np.ndarray:
    """M x K matrix of feed-point channels for the given element layout."""
    users = np.asarray(users, dtype=float)
    layout = np.ascontiguousarray(layout, dtype=float)
    wg_ys = geometry.waveguide_spacing * np.arange(geometry.num_waveguides, dtype=float)
    return kernels.channel_matrix(
        layout, wg_ys,
        np.ascontiguousarray(users[:, 0]),
        np.ascontiguousarray(users[:, 1]),
        geometry.height,
        wavelength(geometry),
        geometry.refractive_index,
    )


def channel_row(geometry: SystemGeometry, users: np.ndarray, waveguide_index: int,
                pa_row: np.ndarray) -> np.ndarray:
    """Single row of the channel matrix (used for incremental updates)."""
    users = np.asarray(users, dtype=float)
    return kernels.channel_row(
        np.ascontiguousarray(pa_row, dtype=float),
        geometry.waveguide_y(waveguide_index),
        np.ascontiguousarray(users[:, 0]),
        np.ascontiguousarray(users[:, 1]),
        geometry.height,
        wavelength(geometry),
        geometry.refractive_index,
    )


def aircomp_mse(decoder: np.ndarray, channel: np.ndarray, amplitudes: np.ndarray,
                noise_var: float) -> float:
    """Aggregation distortion ||w^H G P - 1^T||^2 + noise_var * ||w||^2.

    noise_var is the noise variance seen at each combined branch (N * sigma^2
    for a feed point aggregating N elements).
    """
    err = (decoder.conj() @ channel) * amplitudes - 1.0
    return float(np.real(np.vdot(err, err)) + noise_var * np.real(np.vdot(decoder, decoder)))


def simulate_aircomp(decoder: np.ndarray, channel: np.ndarray, amplitudes: np.ndarray,
                     noise_var: float, num_trials: int, seed) -> tuple[float, float]:
    """Monte-Carlo estimate of the aggregation MSE.

    Draws unit-variance circularly-symmetric Gaussian user symbols and
    per-branch noise of variance noise_var, decodes the sum, and returns the
    empirical mean of |decoded - true sum|^2 together with its standard error.
    Deterministic for a fixed seed.
    """
    if num_trials < 1:
        raise ValueError("num_trials must be >= 1")
    rng = np.random.default_rng(seed)
    num_wg, num_users = channel.shape
    symbols = (rng.standard_normal((num_users, num_trials))
               + 1j * rng.standard_normal((num_users, num_trials))) * np.sqrt(0.5)
    noise = (rng.standard_normal((num_wg, num_trials))
             + 1j * rng.standard_normal((num_wg, num_trials))) * np.sqrt(noise_var / 2.0)
    combined = (decoder.conj() @ channel) * amplitudes
    decoded = combined @ symbols + decoder.conj() @ noise
    sq_err = np.abs(decoded - symbols.sum(axis=0)) ** 2
    mean = float(sq_err.mean())
    stderr = float(sq_err.std(ddof=1) / np.sqrt(num_trials)) if num_trials > 1 else float("inf")
    return mean, stderr
