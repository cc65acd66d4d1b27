"""Deployment geometry for a pinching-antenna uplink.

Waveguides run along the x-axis at height ``height``, waveguide m sitting at
y = m * waveguide_spacing (m = 0..M-1), each of length ``area_length_x`` with
its feed point at x = 0.  Users live on the ground plane z = 0 inside the
rectangle [0, L_x] x [0, L_y].  All quantities are SI (meters, hertz, watts).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

LIGHTSPEED = 3.0e8


class ConfigurationError(ValueError):
    """Raised when a geometry or solver configuration is infeasible."""


@dataclass(frozen=True)
class SystemGeometry:
    """Static deployment parameters. Defaults give the reference setup:
    20 m x 6 m area, 4 waveguides at 5 m height, 2 pinching elements per
    waveguide, 3 users, 28 GHz carrier, refractive index 1.44, noise -90 dBm.
    """

    area_length_x: float = 20.0
    area_length_y: float = 6.0
    num_waveguides: int = 4
    num_pas_per_waveguide: int = 2
    num_users: int = 3
    height: float = 5.0
    carrier_frequency: float = 28e9
    lightspeed: float = LIGHTSPEED
    refractive_index: float = 1.44
    noise_power: float = 1e-12          # -90 dBm
    waveguide_spacing: float | None = None   # default: L_y / (M - 1)
    min_pa_spacing: float | None = None      # default: lambda / 2

    def __post_init__(self):
        if self.waveguide_spacing is None:
            spacing = self.area_length_y / (self.num_waveguides - 1) if self.num_waveguides > 1 else 0.0
            object.__setattr__(self, "waveguide_spacing", spacing)
        if self.min_pa_spacing is None:
            object.__setattr__(self, "min_pa_spacing", self.wavelength / 2.0)

    @property
    def wavelength(self) -> float:
        return self.lightspeed / self.carrier_frequency

    @property
    def effective_noise(self) -> float:
        """Noise variance at a feed point: the N per-element contributions add."""
        return self.num_pas_per_waveguide * self.noise_power

    def waveguide_y(self, m: int) -> float:
        return m * self.waveguide_spacing

    def violations(self) -> list[str]:
        """All invariant violations, as human-readable strings (empty = valid)."""
        out = []
        if self.area_length_x <= 0:
            out.append("area_length_x: must be > 0")
        if self.area_length_y <= 0:
            out.append("area_length_y: must be > 0")
        if self.height <= 0:
            out.append("height: must be > 0")
        if self.num_waveguides < 1:
            out.append("num_waveguides: must be >= 1")
        if self.num_pas_per_waveguide < 1:
            out.append("num_pas_per_waveguide: must be >= 1")
        if self.num_users < 1:
            out.append("num_users: must be >= 1")
        if self.carrier_frequency <= 0:
            out.append("carrier_frequency: must be > 0")
        if self.lightspeed <= 0:
            out.append("lightspeed: must be > 0")
        if self.refractive_index < 1:
            out.append("refractive_index: must be >= 1")
        if self.noise_power <= 0:
            out.append("noise_power: must be > 0")
        if self.num_waveguides > 1 and self.waveguide_spacing <= 0:
            out.append("waveguide_spacing: must be > 0 when num_waveguides > 1")
        if self.min_pa_spacing < 0:
            out.append("min_pa_spacing: must be >= 0")
        elif (self.num_pas_per_waveguide - 1) * self.min_pa_spacing > self.area_length_x:
            out.append("min_pa_spacing: (N - 1) * min_pa_spacing exceeds area_length_x, no feasible layout")
        return out

    def validate(self) -> "SystemGeometry":
        problems = self.violations()
        if problems:
            raise ConfigurationError("; ".join(problems))
        return self


def uniform_layout(geometry: SystemGeometry) -> np.ndarray:
    """Evenly spread layout v[m, n] = L_x / (N + 1) * (n + 1), the canonical
    initialization and the fixed-position benchmark deployment."""
    n_idx = np.arange(1, geometry.num_pas_per_waveguide + 1, dtype=float)
    row = geometry.area_length_x / (geometry.num_pas_per_waveguide + 1) * n_idx
    return np.tile(row, (geometry.num_waveguides, 1))


def layout_violations(positions: np.ndarray, geometry: SystemGeometry, atol: float = 1e-9) -> list[str]:
    """Check the box constraint 0 <= v <= L_x and the per-waveguide minimum
    spacing between adjacent elements."""
    out = []
    positions = np.asarray(positions, dtype=float)
    if positions.shape != (geometry.num_waveguides, geometry.num_pas_per_waveguide):
        return [f"layout: expected shape {(geometry.num_waveguides, geometry.num_pas_per_waveguide)}, "
                f"got {positions.shape}"]
    if np.any(positions < -atol) or np.any(positions > geometry.area_length_x + atol):
        out.append("layout: positions outside [0, area_length_x]")
    if geometry.num_pas_per_waveguide > 1:
        gaps = np.diff(positions, axis=1)
        if np.any(gaps < geometry.min_pa_spacing - atol):
            out.append("layout: adjacent elements closer than min_pa_spacing")
    return out


def user_violations(users: np.ndarray, geometry: SystemGeometry) -> list[str]:
    out = []
    users = np.asarray(users, dtype=float)
    if users.ndim != 2 or users.shape[1] != 3 or users.shape[0] != geometry.num_users:
        return [f"users: expected shape ({geometry.num_users}, 3), got {users.shape}"]
    if np.any(users[:, 0] < 0) or np.any(users[:, 0] > geometry.area_length_x):
        out.append("users: x outside [0, area_length_x]")
    if np.any(users[:, 1] < 0) or np.any(users[:, 1] > geometry.area_length_y):
        out.append("users: y outside [0, area_length_y]")
    if np.any(users[:, 2] != 0):
        out.append("users: z must be 0")
    return out
