"""Benchmark schemes the position-optimizing design is compared against.

* fixed-pa: elements frozen at the uniform layout, only decoder/amplitudes
  alternate;
* conventional-mimo: half-wavelength linear array at the area center with one
  RF chain per antenna (per-antenna noise, no in-guide phase);
* discrete-pass: the alternating optimizer restricted to a fixed lattice of
  admissible element positions per waveguide;
* pgd: the per-element grid sweeps replaced by projected gradient descent on
  all positions jointly, with an Armijo backtracking line search and a
  Dykstra projection onto the box-and-spacing polyhedron.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import channel as chan
from .geometry import ConfigurationError, SystemGeometry, uniform_layout
from .solvers import (
    AoConfig,
    AoReport,
    alternate_decoder_power,
    alternating_optimize,
    optimal_decoder,
    optimal_power,
    subproblem_coefficients,
)

DEFAULT_DISCRETE_CANDIDATES = 300


@dataclass
class PgdConfig:
    initial_step: float = 1e-2
    backtrack: float = 0.5
    armijo: float = 1e-4
    max_steps: int = 200
    step_floor: float = 1e-15

    def violations(self) -> list[str]:
        out = []
        if self.initial_step <= 0:
            out.append("pgd.initial_step: must be > 0")
        if not 0 < self.backtrack < 1:
            out.append("pgd.backtrack: must be in (0, 1)")
        if self.armijo <= 0:
            out.append("pgd.armijo: must be > 0")
        if self.max_steps < 1:
            out.append("pgd.max_steps: must be >= 1")
        return out


def fixed_pa_baseline(geometry: SystemGeometry, users: np.ndarray, budgets: np.ndarray,
                      config: AoConfig | None = None) -> AoReport:
    """Uniform frozen layout; decoder/amplitude alternation only."""
    config = config or AoConfig()
    geometry.validate()
    layout = uniform_layout(geometry)
    channel = chan.channel_matrix(geometry, users, layout)
    decoder, amplitudes, trace, iterations, converged = alternate_decoder_power(
        channel, np.asarray(budgets, dtype=float), geometry.effective_noise, config)
    return AoReport(
        objective_trace=trace,
        final_decoder=decoder,
        final_amplitudes=amplitudes,
        final_layout=layout,
        iterations_used=iterations,
        converged=converged,
        initial_mse=float(trace[0]),
        scheme="fixed-pa",
    )


def mimo_antenna_positions(geometry: SystemGeometry) -> np.ndarray:
    """Half-wavelength linear array along y, centered on the service area at
    the deployment height.  The array location is a modeling choice recorded
    here; move it by editing this row of coordinates."""
    wl = chan.wavelength(geometry)
    m_idx = np.arange(geometry.num_waveguides)
    y = geometry.area_length_y / 2.0 + (m_idx - (geometry.num_waveguides - 1) / 2.0) * wl / 2.0
    out = np.column_stack([
        np.full_like(y, geometry.area_length_x / 2.0),
        y,
        np.full_like(y, geometry.height),
    ])
    return out


def mimo_channel(geometry: SystemGeometry, users: np.ndarray) -> np.ndarray:
    """M x K line-of-sight channel of the conventional array: one element per
    chain, no in-guide phase term."""
    users = np.asarray(users, dtype=float)
    antennas = mimo_antenna_positions(geometry)
    wl = chan.wavelength(geometry)
    diff = antennas[:, None, :] - users[None, :, :]
    dist = np.linalg.norm(diff, axis=2)
    return wl / (4.0 * np.pi * dist) * np.exp(-2j * np.pi * dist / wl)


def conventional_mimo_baseline(geometry: SystemGeometry, users: np.ndarray, budgets: np.ndarray,
                               config: AoConfig | None = None) -> AoReport:
    """Conventional M-antenna uplink: fixed array, per-antenna noise variance
    (single element per chain), decoder/amplitude alternation."""
    config = config or AoConfig()
    geometry.validate()
    channel = mimo_channel(geometry, users)
    decoder, amplitudes, trace, iterations, converged = alternate_decoder_power(
        channel, np.asarray(budgets, dtype=float), geometry.noise_power, config)
    return AoReport(
        objective_trace=trace,
        final_decoder=decoder,
        final_amplitudes=amplitudes,
        final_layout=mimo_antenna_positions(geometry),
        iterations_used=iterations,
        converged=converged,
        initial_mse=float(trace[0]),
        scheme="conventional-mimo",
    )


def discrete_pass_baseline(geometry: SystemGeometry, users: np.ndarray, budgets: np.ndarray,
                           config: AoConfig | None = None,
                           num_candidates: int = DEFAULT_DISCRETE_CANDIDATES) -> AoReport:
    """Alternating optimizer with element positions restricted to a fixed
    uniform lattice along each waveguide (incumbent positions stay
    admissible)."""
    config = config or AoConfig()
    if num_candidates < geometry.num_pas_per_waveguide:
        raise ConfigurationError("discrete candidate count must be >= elements per waveguide")
    lattice = np.linspace(0.0, geometry.area_length_x, num_candidates)
    report = alternating_optimize(
        geometry, users, budgets, replace(config, candidate_grid=lattice))
    report.scheme = "discrete-pass"
    return report


def signal_mse(geometry: SystemGeometry, users: np.ndarray, decoder: np.ndarray,
               amplitudes: np.ndarray, layout: np.ndarray) -> float:
    """Position-dependent part of the objective (the noise term is constant
    in the positions)."""
    channel = chan.channel_matrix(geometry, users, layout)
    err = (decoder.conj() @ channel) * amplitudes - 1.0
    return float(np.real(np.vdot(err, err)))


def position_gradient(geometry: SystemGeometry, users: np.ndarray, decoder: np.ndarray,
                      amplitudes: np.ndarray, layout: np.ndarray) -> np.ndarray:
    """Analytic gradient of the signal misalignment with respect to every
    element position, differentiating each element gain through both the
    distance-dependent amplitude/phase and the in-guide phase.

    Works on the (M, N, K) tensor of per-element gains: for element (m, n)
    the objective is sum_k a|alpha|^2 + 2 Re(b alpha) with coefficients
    collecting the frozen contributions of all other elements, so its
    position derivative assembles from d(alpha)/dv alone.
    """
    users = np.asarray(users, dtype=float)
    layout = np.asarray(layout, dtype=float)
    wl = chan.wavelength(geometry)
    guide_rate = 2.0 * np.pi * geometry.refractive_index / wl
    wg_ys = geometry.waveguide_spacing * np.arange(geometry.num_waveguides, dtype=float)

    dx = layout[:, :, None] - users[None, None, :, 0]
    dy = wg_ys[:, None, None] - users[None, None, :, 1]
    dist = np.sqrt(dx ** 2 + dy ** 2 + geometry.height ** 2)
    amp = wl / (4.0 * np.pi * dist)
    phase = 2.0 * np.pi / wl * dist + guide_rate * layout[:, :, None]
    alpha = amp * np.exp(-1j * phase)                       # (M, N, K)

    channel = alpha.sum(axis=1)                             # (M, K)
    beta = channel[:, None, :] - alpha                      # other elements of the row
    w_row = decoder[:, None]
    cross = (decoder.conj()[:, None] * channel).sum(axis=0)[None, :] \
        - decoder.conj()[:, None] * channel                 # sum over other waveguides
    q = cross * amplitudes[None, :] - 1.0                   # (M, K)
    a = (np.abs(decoder) ** 2)[:, None, None] * (amplitudes ** 2)[None, None, :]
    b = a * beta.conj() + (w_row.conj() * amplitudes[None, :] * q.conj())[:, None, :]

    dist_rate = dx / dist
    phase_rate = 2.0 * np.pi / wl * dist_rate + guide_rate
    dalpha = alpha * (-dist_rate / dist - 1j * phase_rate)
    return np.sum(a * (-2.0 * amp ** 2 * dist_rate / dist)
                  + 2.0 * np.real(b * dalpha), axis=2)


def project_layout(layout: np.ndarray, geometry: SystemGeometry, tol: float = 1e-10,
                   max_cycles: int = 10000) -> np.ndarray:
    """Euclidean projection onto {0 <= v <= L_x, v[n] - v[n-1] >= spacing}
    via Dykstra's alternating projections, one waveguide row at a time,
    iterated until the feasibility residual falls below tol."""
    layout = np.array(layout, dtype=float)
    spacing = geometry.min_pa_spacing
    length = geometry.area_length_x
    num_pas = layout.shape[1]
    if num_pas == 1:
        return np.clip(layout, 0.0, length)
    for m in range(layout.shape[0]):
        row = layout[m].copy()
        corrections = np.zeros((num_pas, num_pas))  # one row per constraint set
        for _ in range(max_cycles):
            before = row.copy()
            # set 0: the box
            probe = row + corrections[0]
            projected = np.clip(probe, 0.0, length)
            corrections[0] = probe - projected
            row = projected
            # sets 1..N-1: pairwise spacing half-spaces
            for i in range(1, num_pas):
                probe = row + corrections[i]
                gap = probe[i] - probe[i - 1]
                projected = probe.copy()
                if gap < spacing:
                    shift = (spacing - gap) / 2.0
                    projected[i] += shift
                    projected[i - 1] -= shift
                corrections[i] = probe - projected
                row = projected
            box_residual = max(0.0, -row.min(), row.max() - length)
            gap_residual = max(0.0, spacing - np.diff(row).min())
            # feasibility alone is not convergence: the corrections must have
            # settled, otherwise this returns a non-projection feasible point
            if max(box_residual, gap_residual) <= tol \
                    and np.abs(row - before).max() <= tol:
                break
        layout[m] = row
    return layout


def pgd_positions_baseline(geometry: SystemGeometry, users: np.ndarray, budgets: np.ndarray,
                           config: AoConfig | None = None,
                           pgd: PgdConfig | None = None) -> AoReport:
    """Alternating optimizer with the position block solved by projected
    gradient descent over all elements jointly.  Each accepted step satisfies
    an Armijo decrease condition along the projection arc, so the objective
    never increases; a line search that underflows the step floor accepts
    no move and ends the position block."""
    config = config or AoConfig()
    pgd = pgd or PgdConfig()
    geometry.validate()
    problems = config.violations() + pgd.violations()
    if problems:
        raise ConfigurationError("; ".join(problems))
    budgets = np.asarray(budgets, dtype=float)
    if budgets.shape != (geometry.num_users,) or np.any(budgets < 0):
        raise ConfigurationError("budgets: need one nonnegative power cap per user")

    noise_var = geometry.effective_noise
    layout = uniform_layout(geometry)
    amplitudes = np.sqrt(budgets)
    channel = chan.channel_matrix(geometry, users, layout)

    trace = []
    audit: list | None = [] if config.record_substeps else None
    initial_mse = np.inf
    prev = np.inf
    tracked = np.inf
    converged = False
    iterations = 0
    for iterations in range(1, config.max_iterations + 1):
        # evaluated-MSE re-checks reject ulp-level rounding wobble only
        cand_decoder = optimal_decoder(channel, amplitudes, noise_var)
        value = chan.aircomp_mse(cand_decoder, channel, amplitudes, noise_var)
        if value <= tracked:
            decoder, tracked = cand_decoder, value
        if audit is not None:
            audit.append(tracked)
        cand_amp = optimal_power(channel, decoder, budgets)
        value = chan.aircomp_mse(decoder, channel, cand_amp, noise_var)
        if value <= tracked:
            amplitudes, tracked = cand_amp, value
        if audit is not None:
            audit.append(tracked)
        if iterations == 1:
            initial_mse = tracked

        current = signal_mse(geometry, users, decoder, amplitudes, layout)
        step_start = pgd.initial_step
        for _ in range(pgd.max_steps):
            grad = position_gradient(geometry, users, decoder, amplitudes, layout)
            step = step_start
            moved = False
            while step >= pgd.step_floor:
                candidate = project_layout(layout - step * grad, geometry)
                value = signal_mse(geometry, users, decoder, amplitudes, candidate)
                if value <= current + pgd.armijo * np.sum(grad * (candidate - layout)):
                    moved = True
                    break
                step *= pgd.backtrack
            if not moved:
                break       # stalled: keep the incumbent layout
            # warm-start the next search near the accepted step
            step_start = min(pgd.initial_step, step / pgd.backtrack)
            decrease = current - value
            layout = candidate
            current = value
            if audit is not None:
                channel = chan.channel_matrix(geometry, users, layout)
                audit.append(chan.aircomp_mse(decoder, channel, amplitudes, noise_var))
            if decrease < config.convergence_threshold:
                break
        channel = chan.channel_matrix(geometry, users, layout)

        value = chan.aircomp_mse(decoder, channel, amplitudes, noise_var)
        if value <= tracked:
            tracked = value
        trace.append(tracked)
        if prev - tracked < config.convergence_threshold:
            converged = True
            break
        prev = tracked
    return AoReport(
        objective_trace=np.array(trace),
        final_decoder=decoder,
        final_amplitudes=amplitudes,
        final_layout=layout,
        iterations_used=iterations,
        converged=converged,
        initial_mse=initial_mse,
        scheme="pgd",
        substep_trace=None if audit is None else np.array(audit),
    )
