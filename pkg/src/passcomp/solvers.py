"""Alternating minimization of the aggregation MSE over decoder, transmit
amplitudes, and pinching-element positions.

The three blocks each admit an exact update:

* decoder: regularized least squares, w = (G P P^T G^H + nv*I)^{-1} G P 1;
* amplitudes: the objective separates per user into a scalar quadratic on
  [0, sqrt(budget_k)], solved in closed form via its Lagrange multiplier;
* each element position: a scalar problem over the waveguide interval, solved
  by exhaustive search on a uniform candidate grid restricted to the window
  allowed by the neighbor-spacing constraint.

Every update minimizes the full objective over its block with the others
fixed, so the objective is non-increasing after every sub-step; the driver
stops once the decrease over a full round falls below the threshold.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import channel as chan
from . import kernels
from .geometry import ConfigurationError, SystemGeometry, uniform_layout


class InfeasibleWindowError(RuntimeError):
    """No candidate position fits the neighbor-spacing window."""


@dataclass
class AoConfig:
    grid_points: int = 2000
    convergence_threshold: float = 1e-6   # absolute objective decrease
    max_iterations: int = 100
    include_current_position: bool = True
    record_substeps: bool = False
    candidate_grid: np.ndarray | None = None   # overrides the uniform grid when set

    def violations(self) -> list[str]:
        out = []
        if self.grid_points < 2:
            out.append("grid_points: must be >= 2")
        if self.convergence_threshold <= 0:
            out.append("convergence_threshold: must be > 0")
        if self.max_iterations < 1:
            out.append("max_iterations: must be >= 1")
        return out


@dataclass
class SubproblemCoefficients:
    """Coefficients of the scalar position objective
    f(v) = sum_k a[k] * |alpha_k(v)|^2 + 2 * Re(b[k] * alpha_k(v)),
    which equals the signal part of the MSE up to a constant independent of v.
    """

    a: np.ndarray        # (K,) nonnegative
    b: np.ndarray        # (K,) complex
    beta: np.ndarray     # (K,) complex, contribution of the waveguide's other elements
    q: np.ndarray        # (K,) complex, residual of the other waveguides minus the target


@dataclass
class AoReport:
    objective_trace: np.ndarray
    final_decoder: np.ndarray
    final_amplitudes: np.ndarray
    final_layout: np.ndarray
    iterations_used: int
    converged: bool
    initial_mse: float
    scheme: str = "proposed"
    substep_trace: np.ndarray | None = None

    @property
    def final_mse(self) -> float:
        return float(self.objective_trace[-1])


def optimal_decoder(channel: np.ndarray, amplitudes: np.ndarray, noise_var: float) -> np.ndarray:
    """Unique minimizer of the MSE over the decoder for fixed amplitudes and
    channel; the regularization noise_var > 0 keeps the system positive
    definite."""
    num_wg = channel.shape[0]
    gram = (channel * amplitudes ** 2) @ channel.conj().T + noise_var * np.eye(num_wg)
    rhs = channel @ amplitudes.astype(complex)
    return np.linalg.solve(gram, rhs)


def optimal_power(channel: np.ndarray, decoder: np.ndarray, budgets: np.ndarray) -> np.ndarray:
    """Per-user amplitudes minimizing the signal misalignment under the
    per-user power caps.

    With r = G^H w the objective separates per user; the multiplier
    lam_k = max(0, Re(r_k)/sqrt(budget_k) - |r_k|^2) activates exactly when
    the unconstrained optimum Re(r_k)/|r_k|^2 exceeds the cap.  Users with
    r_k = 0 (or negative real part) transmit nothing.
    """
    r = channel.conj().T @ decoder
    r_sq = np.abs(r) ** 2
    root = np.sqrt(budgets)
    # a zero cap forces a zero amplitude (multiplier diverges)
    ratio = np.divide(r.real, root, out=np.full_like(root, np.inf), where=root > 0)
    lam = np.maximum(0.0, ratio - r_sq)
    denom = r_sq + lam
    safe = (denom > 0.0) & np.isfinite(denom)
    amplitudes = np.where(safe, r.real / np.where(safe, denom, 1.0), 0.0)
    return np.clip(amplitudes, 0.0, root)


def alternate_decoder_power(channel: np.ndarray, budgets: np.ndarray, noise_var: float,
                            config: AoConfig) -> tuple[np.ndarray, np.ndarray, np.ndarray, int, bool]:
    """Decoder/amplitude alternation with the channel frozen (no position
    updates).  Returns (decoder, amplitudes, objective trace, iterations,
    converged)."""
    amplitudes = np.sqrt(np.asarray(budgets, dtype=float))
    trace = []
    prev = np.inf
    current = np.inf
    converged = False
    decoder = np.zeros(channel.shape[0], dtype=complex)
    iterations = 0
    for iterations in range(1, config.max_iterations + 1):
        # both closed forms are exact block minimizers; the evaluated-MSE
        # checks only reject ulp-level rounding wobble near the fixed point
        cand_decoder = optimal_decoder(channel, amplitudes, noise_var)
        value = chan.aircomp_mse(cand_decoder, channel, amplitudes, noise_var)
        if value <= current:
            decoder, current = cand_decoder, value
        cand_amp = optimal_power(channel, decoder, budgets)
        value = chan.aircomp_mse(decoder, channel, cand_amp, noise_var)
        if value <= current:
            amplitudes, current = cand_amp, value
        trace.append(current)
        if prev - current < config.convergence_threshold:
            converged = True
            break
        prev = current
    return decoder, amplitudes, np.array(trace), iterations, converged


def subproblem_coefficients(geometry: SystemGeometry, users: np.ndarray, channel: np.ndarray,
                            decoder: np.ndarray, amplitudes: np.ndarray, layout: np.ndarray,
                            m: int, n: int) -> SubproblemCoefficients:
    """Coefficients of the scalar objective for element (m, n) with every
    other position held fixed."""
    users = np.asarray(users, dtype=float)
    others = np.delete(layout[m], n)
    if others.size:
        beta = chan.channel_row(geometry, users, m, others)
    else:
        beta = np.zeros(channel.shape[1], dtype=complex)
    mask = np.arange(channel.shape[0]) != m
    c = decoder[mask].conj() @ channel[mask]
    q = c * amplitudes - 1.0
    a = np.abs(decoder[m]) ** 2 * amplitudes ** 2
    b = a * beta.conj() + decoder[m].conj() * amplitudes * q.conj()
    return SubproblemCoefficients(a=a, b=b, beta=beta, q=q)


def position_objective(coeffs: SubproblemCoefficients, geometry: SystemGeometry,
                       users: np.ndarray, m: int, candidates: np.ndarray) -> np.ndarray:
    """Scalar position objective evaluated on an array of candidate x-positions."""
    users = np.asarray(users, dtype=float)
    return kernels.position_objective(
        np.ascontiguousarray(candidates, dtype=float),
        np.ascontiguousarray(users[:, 0]),
        np.ascontiguousarray(users[:, 1]),
        geometry.waveguide_y(m),
        geometry.height,
        chan.wavelength(geometry),
        geometry.refractive_index,
        np.ascontiguousarray(coeffs.a, dtype=float),
        np.ascontiguousarray(coeffs.b, dtype=complex),
    )


def feasible_window(geometry: SystemGeometry, lower_neighbor: float | None,
                    upper_neighbor: float | None) -> tuple[float, float]:
    lo = 0.0 if lower_neighbor is None else lower_neighbor + geometry.min_pa_spacing
    hi = geometry.area_length_x if upper_neighbor is None else upper_neighbor - geometry.min_pa_spacing
    return lo, hi


def grid_search_position(coeffs: SubproblemCoefficients, geometry: SystemGeometry,
                         users: np.ndarray, m: int, lower_neighbor: float | None,
                         upper_neighbor: float | None, current: float,
                         config: AoConfig) -> float:
    """Best candidate position inside the neighbor window; ties go to the
    smallest position.  Raises InfeasibleWindowError when no candidate fits
    (only possible with include_current_position disabled)."""
    grid = config.candidate_grid
    if grid is None:
        grid = np.linspace(0.0, geometry.area_length_x, config.grid_points)
    lo, hi = feasible_window(geometry, lower_neighbor, upper_neighbor)
    candidates = grid[(grid >= lo) & (grid <= hi)]
    if config.include_current_position:
        candidates = np.append(candidates, current)
    if candidates.size == 0:
        raise InfeasibleWindowError(
            f"no feasible candidate in [{lo:.6g}, {hi:.6g}] for waveguide {m}")
    candidates = np.sort(candidates)
    values = position_objective(coeffs, geometry, users, m, candidates)
    return float(candidates[int(np.argmin(values))])


def gauss_seidel_sweep(geometry: SystemGeometry, users: np.ndarray, decoder: np.ndarray,
                       amplitudes: np.ndarray, layout: np.ndarray, config: AoConfig,
                       channel: np.ndarray | None = None,
                       audit: list | None = None) -> tuple[np.ndarray, np.ndarray, float]:
    """One pass of sequential single-element updates in row-major order, each
    using the freshest values of all other positions.  Returns the updated
    layout, the consistent channel matrix, and the objective value.

    A move selected by the grid search cannot increase the objective in exact
    arithmetic (the incumbent stays in the candidate set); the evaluated-MSE
    re-check below only rejects sub-ulp rounding artifacts, keeping the
    recorded descent literally non-increasing.
    """
    layout = np.array(layout, dtype=float)
    if channel is None:
        channel = chan.channel_matrix(geometry, users, layout)
    else:
        channel = np.array(channel, dtype=complex)
    noise_var = geometry.effective_noise
    current = chan.aircomp_mse(decoder, channel, amplitudes, noise_var)
    num_pas = geometry.num_pas_per_waveguide
    for m in range(geometry.num_waveguides):
        for n in range(num_pas):
            coeffs = subproblem_coefficients(
                geometry, users, channel, decoder, amplitudes, layout, m, n)
            lower = layout[m, n - 1] if n > 0 else None
            upper = layout[m, n + 1] if n < num_pas - 1 else None
            try:
                best = grid_search_position(
                    coeffs, geometry, users, m, lower, upper, layout[m, n], config)
            except InfeasibleWindowError:
                best = layout[m, n]
            if best != layout[m, n]:
                previous = layout[m, n]
                old_row = channel[m].copy()
                layout[m, n] = best
                channel[m] = chan.channel_row(geometry, users, m, layout[m])
                moved = chan.aircomp_mse(decoder, channel, amplitudes, noise_var)
                if moved <= current:
                    current = moved
                else:
                    layout[m, n] = previous
                    channel[m] = old_row
            if audit is not None:
                audit.append(current)
    return layout, channel, current


def alternating_optimize(geometry: SystemGeometry, users: np.ndarray, budgets: np.ndarray,
                         config: AoConfig | None = None) -> AoReport:
    """Full driver: uniform starting layout and full-power amplitudes, then
    rounds of decoder / amplitude / per-element position updates until the
    objective decrease drops below the threshold or the iteration cap."""
    config = config or AoConfig()
    geometry.validate()
    problems = config.violations()
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
    current = np.inf
    converged = False
    iterations = 0
    for iterations in range(1, config.max_iterations + 1):
        # block updates are exact minimizers; the evaluated-MSE checks only
        # reject ulp-level rounding wobble once the state has frozen
        cand_decoder = optimal_decoder(channel, amplitudes, noise_var)
        value = chan.aircomp_mse(cand_decoder, channel, amplitudes, noise_var)
        if value <= current:
            decoder, current = cand_decoder, value
        if audit is not None:
            audit.append(current)
        cand_amp = optimal_power(channel, decoder, budgets)
        value = chan.aircomp_mse(decoder, channel, cand_amp, noise_var)
        if value <= current:
            amplitudes, current = cand_amp, value
        if audit is not None:
            audit.append(current)
        if iterations == 1:
            initial_mse = current
        layout, channel, current = gauss_seidel_sweep(
            geometry, users, decoder, amplitudes, layout, config, channel, audit)
        trace.append(current)
        if prev - current < config.convergence_threshold:
            converged = True
            break
        prev = current
    return AoReport(
        objective_trace=np.array(trace),
        final_decoder=decoder,
        final_amplitudes=amplitudes,
        final_layout=layout,
        iterations_used=iterations,
        converged=converged,
        initial_mse=initial_mse,
        substep_trace=None if audit is None else np.array(audit),
    )
