"""Monte-Carlo experiment runner.

A run is fully described by a YAML config (geometry, sweep, schemes, budgets,
solver settings, seed).  Per-realization seeds are derived from the master
seed by realization index, so every scheme and every sweep value sees the
same user draws (paired comparisons) and execution order cannot change the
output.  Result rows go to a CSV with a fixed column order plus a per-scheme
summary CSV; with timing capture disabled (the default) two runs of the same
config produce byte-identical files.
"""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
import yaml

from .baselines import (
    DEFAULT_DISCRETE_CANDIDATES,
    PgdConfig,
    conventional_mimo_baseline,
    discrete_pass_baseline,
    fixed_pa_baseline,
    pgd_positions_baseline,
)
from .geometry import ConfigurationError, SystemGeometry
from .solvers import AoConfig, AoReport, alternating_optimize

SCHEMES = ("proposed", "fixed-pa", "conventional-mimo", "discrete-pass", "pgd")
SWEEPS = ("convergence-trace", "waveguide-length", "num-pas", "num-users")

CSV_COLUMNS = ("scheme", "sweep_param", "sweep_value", "realization",
               "mse", "iterations", "wall_ms", "seed")

_GEOMETRY_KEYS = ("area_length_x", "area_length_y", "num_waveguides",
                  "num_pas_per_waveguide", "num_users", "height",
                  "carrier_frequency", "lightspeed", "refractive_index",
                  "noise_power", "waveguide_spacing", "min_pa_spacing")
_AO_KEYS = ("grid_points", "convergence_threshold", "max_iterations",
            "include_current_position")
_PGD_KEYS = ("initial_step", "backtrack", "armijo", "max_steps")
_TOP_KEYS = ("geometry", "sweep", "num_realizations", "seed", "schemes",
             "budget", "ao", "baselines", "output", "workers", "record_timings")
_BASELINE_KEYS = ("discrete_candidates", "pgd")
_SWEEP_KEYS = ("name", "values")


@dataclass
class ExperimentConfig:
    geometry: SystemGeometry = field(default_factory=SystemGeometry)
    sweep_name: str = "convergence-trace"
    sweep_values: list = field(default_factory=lambda: [0])
    num_realizations: int = 1
    seed: int = 0
    schemes: list = field(default_factory=lambda: list(SCHEMES))
    budget: object = 1e-5          # watts per user; scalar or per-user list
    ao: AoConfig = field(default_factory=AoConfig)
    pgd: PgdConfig = field(default_factory=PgdConfig)
    discrete_candidates: int = DEFAULT_DISCRETE_CANDIDATES
    output: str = "results.csv"
    workers: int = 1
    record_timings: bool = False


@dataclass
class ResultRow:
    scheme: str
    sweep_param: str
    sweep_value: float
    realization: int
    mse: float
    iterations: int
    wall_ms: float
    seed: int


def realization_seed(master_seed: int, index: int) -> int:
    """Child seed for one realization, a pure function of (master, index)."""
    return int(np.random.SeedSequence((master_seed, index)).generate_state(1, np.uint64)[0])


def sample_users(geometry: SystemGeometry, seed) -> np.ndarray:
    """K user positions uniform over the service rectangle, on the ground."""
    rng = np.random.default_rng(seed)
    x = rng.uniform(0.0, geometry.area_length_x, geometry.num_users)
    y = rng.uniform(0.0, geometry.area_length_y, geometry.num_users)
    return np.column_stack([x, y, np.zeros(geometry.num_users)])


def _check_unknown(section: dict, allowed, path: str, out: list):
    for key in section:
        if key not in allowed:
            out.append(f"{path}{key}: unknown key")


def load_config(path) -> ExperimentConfig:
    """Parse a YAML experiment file.  Raises ConfigurationError on unknown
    keys or malformed structure; value-level problems are reported by
    validate_config."""
    with open(path) as fh:
        raw = yaml.safe_load(fh)
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        raise ConfigurationError("config root must be a mapping")
    problems: list[str] = []
    _check_unknown(raw, _TOP_KEYS, "", problems)
    geo_raw = raw.get("geometry", {}) or {}
    ao_raw = raw.get("ao", {}) or {}
    sweep_raw = raw.get("sweep", {}) or {}
    base_raw = raw.get("baselines", {}) or {}
    pgd_raw = base_raw.get("pgd", {}) or {}
    for section, allowed, label in ((geo_raw, _GEOMETRY_KEYS, "geometry."),
                                    (ao_raw, _AO_KEYS, "ao."),
                                    (sweep_raw, _SWEEP_KEYS, "sweep."),
                                    (base_raw, _BASELINE_KEYS, "baselines."),
                                    (pgd_raw, _PGD_KEYS, "baselines.pgd.")):
        if not isinstance(section, dict):
            problems.append(f"{label.rstrip('.')}: must be a mapping")
            continue
        _check_unknown(section, allowed, label, problems)
    if problems:
        raise ConfigurationError("; ".join(problems))

    config = ExperimentConfig(
        geometry=SystemGeometry(**geo_raw),
        sweep_name=sweep_raw.get("name", "convergence-trace"),
        sweep_values=list(sweep_raw.get("values", [0])),
        num_realizations=raw.get("num_realizations", 1),
        seed=raw.get("seed", 0),
        schemes=list(raw.get("schemes", list(SCHEMES))),
        budget=raw.get("budget", 1e-5),
        ao=AoConfig(**ao_raw),
        pgd=PgdConfig(**pgd_raw),
        discrete_candidates=base_raw.get("discrete_candidates", DEFAULT_DISCRETE_CANDIDATES),
        output=raw.get("output", "results.csv"),
        workers=raw.get("workers", 1),
        record_timings=bool(raw.get("record_timings", False)),
    )
    return config


def validate_config(config: ExperimentConfig) -> list[str]:
    """Every invariant violation in the experiment description, with a path
    into the config.  An empty list means the config is runnable."""
    out = [f"geometry.{v}" for v in config.geometry.violations()]
    if config.sweep_name not in SWEEPS:
        out.append(f"sweep.name: must be one of {', '.join(SWEEPS)}")
    if not config.sweep_values:
        out.append("sweep.values: must be nonempty")
    elif config.sweep_name in ("num-pas", "num-users"):
        if any(int(v) != v or v < 1 for v in config.sweep_values):
            out.append(f"sweep.values: {config.sweep_name} needs positive integers")
    elif config.sweep_name == "waveguide-length":
        if any(v <= 0 for v in config.sweep_values):
            out.append("sweep.values: waveguide lengths must be positive")
    if config.num_realizations < 1:
        out.append("num_realizations: must be >= 1")
    if not config.schemes:
        out.append("schemes: must be nonempty")
    else:
        for scheme in config.schemes:
            if scheme not in SCHEMES:
                out.append(f"schemes: unknown scheme '{scheme}'")
    budgets = np.atleast_1d(np.asarray(config.budget, dtype=float))
    if np.any(budgets <= 0):
        out.append("budget: power caps must be positive")
    if budgets.size not in (1, config.geometry.num_users):
        out.append("budget: give one value or one per user")
    elif budgets.size > 1 and config.sweep_name == "num-users":
        out.append("budget: per-user list is incompatible with a num-users sweep")
    out.extend(f"ao.{v}" for v in config.ao.violations())
    out.extend(f"baselines.{v}" for v in config.pgd.violations())
    if config.discrete_candidates < config.geometry.num_pas_per_waveguide:
        out.append("baselines.discrete_candidates: fewer candidates than elements per waveguide")
    if config.workers < 1:
        out.append("workers: must be >= 1")
    if not str(config.output):
        out.append("output: must be a path")
    return out


def _geometry_for(config: ExperimentConfig, sweep_value) -> SystemGeometry:
    geo = config.geometry
    if config.sweep_name == "waveguide-length":
        return replace(geo, area_length_x=float(sweep_value))
    if config.sweep_name == "num-pas":
        return replace(geo, num_pas_per_waveguide=int(sweep_value))
    if config.sweep_name == "num-users":
        return replace(geo, num_users=int(sweep_value))
    return geo


def _budgets_for(config: ExperimentConfig, geometry: SystemGeometry) -> np.ndarray:
    budgets = np.atleast_1d(np.asarray(config.budget, dtype=float))
    if budgets.size == 1:
        return np.full(geometry.num_users, budgets[0])
    return budgets.copy()


def solve_instance(scheme: str, geometry: SystemGeometry, users: np.ndarray,
                   budgets: np.ndarray, config: ExperimentConfig) -> AoReport:
    if scheme == "proposed":
        return alternating_optimize(geometry, users, budgets, config.ao)
    if scheme == "fixed-pa":
        return fixed_pa_baseline(geometry, users, budgets, config.ao)
    if scheme == "conventional-mimo":
        return conventional_mimo_baseline(geometry, users, budgets, config.ao)
    if scheme == "discrete-pass":
        return discrete_pass_baseline(geometry, users, budgets, config.ao,
                                      config.discrete_candidates)
    if scheme == "pgd":
        return pgd_positions_baseline(geometry, users, budgets, config.ao, config.pgd)
    raise ConfigurationError(f"unknown scheme '{scheme}'")


def _solve_task(args):
    config, value_index, realization = args
    sweep_value = config.sweep_values[value_index]
    geometry = _geometry_for(config, sweep_value)
    child_seed = realization_seed(config.seed, realization)
    users = sample_users(geometry, child_seed)
    budgets = _budgets_for(config, geometry)
    rows = []
    for scheme_index, scheme in enumerate(config.schemes):
        start = time.perf_counter()
        try:
            report = solve_instance(scheme, geometry, users, budgets, config)
        except Exception:
            rows.append(((value_index, realization, scheme_index, 0),
                         ResultRow(scheme, config.sweep_name, float(sweep_value),
                                   realization, float("nan"), 0, 0.0, child_seed)))
            continue
        wall_ms = (time.perf_counter() - start) * 1e3 if config.record_timings else 0.0
        if config.sweep_name == "convergence-trace":
            for it, value in enumerate(report.objective_trace, start=1):
                rows.append(((value_index, realization, scheme_index, it),
                             ResultRow(scheme, "iteration", float(it), realization,
                                       float(value), report.iterations_used,
                                       wall_ms, child_seed)))
        else:
            rows.append(((value_index, realization, scheme_index, 0),
                         ResultRow(scheme, config.sweep_name, float(sweep_value),
                                   realization, report.final_mse,
                                   report.iterations_used, wall_ms, child_seed)))
    return rows


def _format(value) -> str:
    if isinstance(value, float):
        return f"{value:.12g}"
    return str(value)


def write_rows_csv(rows: list[ResultRow], path) -> None:
    lines = [",".join(CSV_COLUMNS)]
    for row in rows:
        lines.append(",".join(_format(v) for v in (
            row.scheme, row.sweep_param, row.sweep_value, row.realization,
            row.mse, row.iterations, row.wall_ms, row.seed)))
    Path(path).write_text("\n".join(lines) + "\n")


def summarize(rows: list[ResultRow]) -> list[tuple]:
    """(scheme, sweep_param, sweep_value, realizations, errors, mean_mse)
    grouped in first-seen order."""
    groups: dict[tuple, list[float]] = {}
    order = []
    for row in rows:
        key = (row.scheme, row.sweep_param, row.sweep_value)
        if key not in groups:
            groups[key] = []
            order.append(key)
        groups[key].append(row.mse)
    out = []
    for key in order:
        values = np.array(groups[key])
        good = values[~np.isnan(values)]
        mean = float(good.mean()) if good.size else float("nan")
        out.append((*key, good.size, int(np.isnan(values).sum()), mean))
    return out


def write_summary_csv(rows: list[ResultRow], path) -> None:
    lines = ["scheme,sweep_param,sweep_value,realizations,errors,mean_mse"]
    for entry in summarize(rows):
        lines.append(",".join(_format(v) for v in entry))
    Path(path).write_text("\n".join(lines) + "\n")


def summary_path(output) -> Path:
    out = Path(output)
    return out.with_name(out.stem + "_summary" + (out.suffix or ".csv"))


def run_experiment(config: ExperimentConfig, workers: int | None = None,
                   output=None) -> list[ResultRow]:
    """Solve every sweep-value x realization x scheme instance, write the row
    CSV and the per-scheme summary CSV, and return the rows in deterministic
    order (independent of worker scheduling)."""
    problems = validate_config(config)
    if problems:
        raise ConfigurationError("; ".join(problems))
    workers = config.workers if workers is None else workers
    output = config.output if output is None else output

    tasks = [(config, vi, r)
             for vi in range(len(config.sweep_values))
             for r in range(config.num_realizations)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_solve_task, tasks))
    else:
        chunks = [_solve_task(t) for t in tasks]

    keyed = [item for chunk in chunks for item in chunk]
    keyed.sort(key=lambda item: item[0])
    rows = [row for _, row in keyed]
    write_rows_csv(rows, output)
    write_summary_csv(rows, summary_path(output))
    return rows
