"""Synthetic sweep acquisition: what the instrument would have measured.

Generates logarithmic frequency sweeps of the circuit model, optionally
perturbed by multiplicative Gaussian noise applied independently to the
real and imaginary parts of each point.  Noise is drawn from a seeded
generator as one (points, 2) block indexed by grid position, so a given
seed always yields the same record list regardless of how the caller
iterates.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .circuit import CircuitParams, ImpedanceSpectrum, cell_impedance, to_parallel_cg
from .errors import ConfigError

__all__ = [
    "RNG_ALGORITHM",
    "SweepConfig",
    "MeasurementRecord",
    "log_sweep",
    "simulate_sweep",
    "records_to_spectrum",
]

# Identifier written into output metadata; numpy's default_rng (PCG64).
RNG_ALGORITHM = "numpy-pcg64"


@dataclass(frozen=True)
class SweepConfig:
    """Sweep grid, drive amplitude and noise model for a simulated run."""

    f_start: float
    f_stop: float
    points: int
    amplitude: float = 1.0
    noise_rel: float = 0.0
    seed: int = 0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.f_start) and self.f_start > 0.0):
            raise ConfigError(f"f_start must be finite and > 0, got {self.f_start!r}")
        if not (math.isfinite(self.f_stop) and self.f_stop > self.f_start):
            raise ConfigError("f_stop must be finite and > f_start")
        if self.points < 2:
            raise ConfigError(f"points must be >= 2, got {self.points!r}")
        if not (math.isfinite(self.amplitude) and self.amplitude > 0.0):
            raise ConfigError(f"amplitude must be finite and > 0, got {self.amplitude!r}")
        if not (math.isfinite(self.noise_rel) and self.noise_rel >= 0.0):
            raise ConfigError(f"noise_rel must be finite and >= 0, got {self.noise_rel!r}")


@dataclass(frozen=True)
class MeasurementRecord:
    """One sweep point: raw impedance plus the derived per-point readouts."""

    frequency: float
    z: complex
    c_parallel: float
    g_parallel: float
    reactance: float
    phase_deg: float

    @classmethod
    def from_z(cls, frequency: float, z: complex) -> "MeasurementRecord":
        c, g = to_parallel_cg(z, frequency)
        return cls(
            frequency=frequency,
            z=z,
            c_parallel=c,
            g_parallel=g,
            reactance=z.imag,
            phase_deg=math.degrees(cmath.phase(z)),
        )


def log_sweep(cfg: SweepConfig) -> np.ndarray:
    """Logarithmically spaced grid from cfg.f_start to cfg.f_stop.

    Both endpoints are hit exactly; the grid is strictly increasing and
    successive ratios are constant.
    """
    return np.geomspace(cfg.f_start, cfg.f_stop, cfg.points)


def simulate_sweep(params: CircuitParams, cfg: SweepConfig) -> list[MeasurementRecord]:
    """Sweep the circuit model over cfg's grid, with optional noise.

    With noise_rel = 0 the records equal the noise-free forward model
    exactly.  Otherwise each point's real and imaginary parts are scaled
    by independent (1 + noise_rel * eta) factors with eta ~ N(0, 1),
    drawn once as a (points, 2) block from a generator seeded with
    cfg.seed, so results are deterministic per seed.
    """
    freqs = log_sweep(cfg)
    z = np.asarray(cell_impedance(params, freqs))

    rng = np.random.default_rng(cfg.seed)
    eta = rng.standard_normal((cfg.points, 2))
    z = z.real * (1.0 + cfg.noise_rel * eta[:, 0]) + 1j * z.imag * (
        1.0 + cfg.noise_rel * eta[:, 1]
    )

    return [MeasurementRecord.from_z(float(f), complex(zi)) for f, zi in zip(freqs, z)]


def records_to_spectrum(records: list[MeasurementRecord]) -> ImpedanceSpectrum:
    """Collect sweep records into an impedance spectrum."""
    if not records:
        raise ConfigError("records_to_spectrum: empty record list")
    freqs = np.array([r.frequency for r in records], dtype=float)
    z = np.array([r.z for r in records], dtype=complex)
    return ImpedanceSpectrum(frequencies=freqs, z=z)
