"""Hot numeric kernels: per-waveguide channel rows and the per-element
position-sweep objective.

Both kernels exist twice: a plain-loop version compiled with numba's @njit and
a vectorized pure-numpy fallback.  The active backend is picked at import time
from the PASSCOMP_NUMBA environment variable ("0"/"false"/"off" forces numpy;
anything else, or unset, uses numba when it is importable).  Both paths
implement identical arithmetic; see benchmarks/bench_kernels.py for a timing
comparison.
"""

from __future__ import annotations

import math
import os

import numpy as np

FOUR_PI = 4.0 * math.pi


def _channel_row_numpy(pa_x, wg_y, users_x, users_y, height, wavelength, refractive_index):
    dx = pa_x[:, None] - users_x[None, :]
    dy = wg_y - users_y[None, :]
    dist = np.sqrt(dx * dx + dy * dy + height * height)
    phase = (2.0 * np.pi / wavelength) * dist \
        + (2.0 * np.pi * refractive_index / wavelength) * pa_x[:, None]
    amp = wavelength / (FOUR_PI * dist)
    return np.sum(amp * np.cos(phase), axis=0) - 1j * np.sum(amp * np.sin(phase), axis=0)


def _channel_row_loops(pa_x, wg_y, users_x, users_y, height, wavelength, refractive_index):
    num_pas = pa_x.shape[0]
    num_users = users_x.shape[0]
    prop = 2.0 * math.pi / wavelength
    guide = 2.0 * math.pi * refractive_index / wavelength
    out = np.empty(num_users, dtype=np.complex128)
    for k in range(num_users):
        acc_re = 0.0
        acc_im = 0.0
        for n in range(num_pas):
            dx = pa_x[n] - users_x[k]
            dy = wg_y - users_y[k]
            dist = math.sqrt(dx * dx + dy * dy + height * height)
            amp = wavelength / (FOUR_PI * dist)
            phase = prop * dist + guide * pa_x[n]
            acc_re += amp * math.cos(phase)
            acc_im -= amp * math.sin(phase)
        out[k] = complex(acc_re, acc_im)
    return out


def _channel_matrix_numpy(pa_x, wg_ys, users_x, users_y, height, wavelength, refractive_index):
    dx = pa_x[:, :, None] - users_x[None, None, :]
    dy = wg_ys[:, None, None] - users_y[None, None, :]
    dist = np.sqrt(dx * dx + dy * dy + height * height)
    phase = (2.0 * np.pi / wavelength) * dist \
        + (2.0 * np.pi * refractive_index / wavelength) * pa_x[:, :, None]
    amp = wavelength / (FOUR_PI * dist)
    return np.sum(amp * np.cos(phase), axis=1) - 1j * np.sum(amp * np.sin(phase), axis=1)


def _channel_matrix_loops(pa_x, wg_ys, users_x, users_y, height, wavelength, refractive_index):
    num_wg, num_pas = pa_x.shape
    num_users = users_x.shape[0]
    prop = 2.0 * math.pi / wavelength
    guide = 2.0 * math.pi * refractive_index / wavelength
    out = np.empty((num_wg, num_users), dtype=np.complex128)
    for m in range(num_wg):
        for k in range(num_users):
            acc_re = 0.0
            acc_im = 0.0
            for n in range(num_pas):
                dx = pa_x[m, n] - users_x[k]
                dy = wg_ys[m] - users_y[k]
                dist = math.sqrt(dx * dx + dy * dy + height * height)
                amp = wavelength / (FOUR_PI * dist)
                phase = prop * dist + guide * pa_x[m, n]
                acc_re += amp * math.cos(phase)
                acc_im -= amp * math.sin(phase)
            out[m, k] = complex(acc_re, acc_im)
    return out


def _position_objective_numpy(cands, users_x, users_y, wg_y, height, wavelength,
                              refractive_index, a_coeffs, b_coeffs):
    dx = cands[:, None] - users_x[None, :]
    dy = wg_y - users_y[None, :]
    dist = np.sqrt(dx * dx + dy * dy + height * height)
    amp = wavelength / (FOUR_PI * dist)
    phase = (2.0 * np.pi / wavelength) * dist \
        + (2.0 * np.pi * refractive_index / wavelength) * cands[:, None]
    cos_p = np.cos(phase)
    sin_p = np.sin(phase)
    # Re(b * alpha) with alpha = amp * exp(-j*phase)
    aligned = b_coeffs.real[None, :] * cos_p + b_coeffs.imag[None, :] * sin_p
    return np.sum(a_coeffs[None, :] * amp * amp + 2.0 * amp * aligned, axis=1)


def _position_objective_loops(cands, users_x, users_y, wg_y, height, wavelength,
                              refractive_index, a_coeffs, b_coeffs):
    num_cands = cands.shape[0]
    num_users = users_x.shape[0]
    prop = 2.0 * math.pi / wavelength
    guide = 2.0 * math.pi * refractive_index / wavelength
    out = np.empty(num_cands, dtype=np.float64)
    for i in range(num_cands):
        acc = 0.0
        for k in range(num_users):
            dx = cands[i] - users_x[k]
            dy = wg_y - users_y[k]
            dist = math.sqrt(dx * dx + dy * dy + height * height)
            amp = wavelength / (FOUR_PI * dist)
            phase = prop * dist + guide * cands[i]
            aligned = b_coeffs[k].real * math.cos(phase) + b_coeffs[k].imag * math.sin(phase)
            acc += a_coeffs[k] * amp * amp + 2.0 * amp * aligned
        out[i] = acc
    return out


def _numba_requested() -> bool:
    return os.environ.get("PASSCOMP_NUMBA", "1").strip().lower() not in ("0", "false", "off", "no")


BACKEND = "numpy"
channel_row = _channel_row_numpy
channel_matrix = _channel_matrix_numpy
position_objective = _position_objective_numpy

if _numba_requested():
    try:
        from numba import njit

        channel_row = njit(cache=True)(_channel_row_loops)
        channel_matrix = njit(cache=True)(_channel_matrix_loops)
        position_objective = njit(cache=True)(_position_objective_loops)
        BACKEND = "numba"
    except ImportError:
        pass
