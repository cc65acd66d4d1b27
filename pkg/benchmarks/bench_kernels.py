"""Time the numba kernels against their pure-numpy fallbacks.

Run: python benchmarks/bench_kernels.py
The active package backend is whatever PASSCOMP_NUMBA selects; this script
imports both implementations directly so one process covers the comparison.
"""

import time

import numpy as np

from passcomp import kernels
from passcomp.channel import wavelength
from passcomp.geometry import SystemGeometry

try:
    from numba import njit
except ImportError:
    raise SystemExit("numba not installed; nothing to compare")


def timeit(fn, args, repeat=200):
    fn(*args)   # warm-up / JIT
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    geometry = SystemGeometry()
    wl = wavelength(geometry)
    rng = np.random.default_rng(0)

    cases = {
        "small (defaults)": (2000, 3),
        "large": (20000, 16),
    }
    jit_row = njit(cache=True)(kernels._channel_row_loops)
    jit_mat = njit(cache=True)(kernels._channel_matrix_loops)
    jit_obj = njit(cache=True)(kernels._position_objective_loops)

    print(f"{'kernel':<24} {'case':<18} {'numpy':>10} {'numba':>10} {'speedup':>8}")
    for label, (num_cands, num_users) in cases.items():
        ux = rng.uniform(0, geometry.area_length_x, num_users)
        uy = rng.uniform(0, geometry.area_length_y, num_users)
        cands = np.linspace(0, geometry.area_length_x, num_cands)
        a = rng.uniform(0, 1, num_users)
        b = rng.standard_normal(num_users) + 1j * rng.standard_normal(num_users)
        pa_row = np.sort(rng.uniform(0, geometry.area_length_x, 8))
        pa_mat = np.sort(rng.uniform(0, geometry.area_length_x, (16, 8)), axis=1)
        wg_ys = np.arange(16) * 2.0

        rows = [
            ("position_objective",
             (cands, ux, uy, 2.0, geometry.height, wl, geometry.refractive_index, a, b),
             kernels._position_objective_numpy, jit_obj),
            ("channel_row",
             (pa_row, 2.0, ux, uy, geometry.height, wl, geometry.refractive_index),
             kernels._channel_row_numpy, jit_row),
            ("channel_matrix",
             (pa_mat, wg_ys, ux, uy, geometry.height, wl, geometry.refractive_index),
             kernels._channel_matrix_numpy, jit_mat),
        ]
        for name, args, np_fn, nb_fn in rows:
            ref = np_fn(*args)
            out = nb_fn(*args)
            assert np.allclose(ref, out, rtol=1e-12, atol=0), f"{name}: backends disagree"
            t_np = timeit(np_fn, args)
            t_nb = timeit(nb_fn, args)
            print(f"{name:<24} {label:<18} {t_np*1e6:>8.1f}us {t_nb*1e6:>8.1f}us "
                  f"{t_np/t_nb:>7.1f}x")


if __name__ == "__main__":
    main()
