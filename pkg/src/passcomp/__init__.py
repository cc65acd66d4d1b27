"""Pinching-antenna-system aided over-the-air computation.

Channel model and aggregation-error metric, the alternating MSE minimizer
over decoder / transmit amplitudes / element positions, four benchmark
schemes, and a seeded Monte-Carlo experiment harness with a CLI.
"""

from .baselines import (
    PgdConfig,
    conventional_mimo_baseline,
    discrete_pass_baseline,
    fixed_pa_baseline,
    pgd_positions_baseline,
    position_gradient,
    project_layout,
)
from .channel import (
    aircomp_mse,
    channel_matrix,
    effective_channel,
    freespace_channel,
    simulate_aircomp,
    wavelength,
)
from .geometry import ConfigurationError, SystemGeometry, uniform_layout
from .harness import (
    ExperimentConfig,
    ResultRow,
    load_config,
    run_experiment,
    sample_users,
    validate_config,
)
from .kernels import BACKEND
from .solvers import (
    AoConfig,
    AoReport,
    alternating_optimize,
    gauss_seidel_sweep,
    grid_search_position,
    optimal_decoder,
    optimal_power,
    subproblem_coefficients,
)

__version__ = "0.1.0"

__all__ = [
    "AoConfig",
    "AoReport",
    "BACKEND",
    "ConfigurationError",
    "ExperimentConfig",
    "PgdConfig",
    "ResultRow",
    "SystemGeometry",
    "aircomp_mse",
    "alternating_optimize",
    "channel_matrix",
    "conventional_mimo_baseline",
    "discrete_pass_baseline",
    "effective_channel",
    "fixed_pa_baseline",
    "freespace_channel",
    "gauss_seidel_sweep",
    "grid_search_position",
    "load_config",
    "optimal_decoder",
    "optimal_power",
    "pgd_positions_baseline",
    "position_gradient",
    "project_layout",
    "run_experiment",
    "sample_users",
    "simulate_aircomp",
    "subproblem_coefficients",
    "uniform_layout",
    "validate_config",
    "wavelength",
]
