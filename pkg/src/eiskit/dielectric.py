"""Orientation-polarization model of a doped aqueous solution.

Links microscopic dipole populations to the macroscopic permittivity
that feeds the circuit model: Langevin saturation of a single dipole
species, the small-field Debye permittivity, a two-regime effective
permittivity for a solution carrying both an added dopant and an ionic
impurity, and the lossy complex permittivity that yields the solution
capacitance of a parallel-plate cell.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .constants import BOLTZMANN, TWO_PI, VACUUM_PERMITTIVITY
from .errors import ConfigError, NumericalError

__all__ = [
    "DielectricSystem",
    "langevin",
    "polarization",
    "relative_permittivity_debye",
    "effective_permittivity",
    "complex_permittivity",
    "solution_capacitance",
]

# Below this argument the closed form coth(x) - 1/x loses all precision
# to cancellation, so the odd series x/3 - x**3/45 is used instead.
_LANGEVIN_SERIES_CUTOFF = 1e-4


def langevin(gamma: float) -> float:
    """Langevin function L(x) = coth(x) - 1/x.

    Odd, strictly increasing, bounded by (-1, 1).  Near zero the series
    branch keeps full precision; L(0) = 0 exactly.
    """
    if not math.isfinite(gamma):
        raise NumericalError(f"langevin: non-finite argument {gamma!r}")
    if abs(gamma) < _LANGEVIN_SERIES_CUTOFF:
        return gamma / 3.0 - gamma**3 / 45.0
    return 1.0 / math.tanh(gamma) - 1.0 / gamma


def polarization(n: float, p: float, e_field: float, temperature: float) -> float:
    """Orientation polarization P = n * p * L(p*E / (k*T)) in C/m^2.

    ``n`` is the dipole number density (1/m^3), ``p`` the dipole moment
    (C*m), ``e_field`` the applied field (V/m, may be negative),
    ``temperature`` the absolute temperature (K).
    """
    _check_nonneg("n", n)
    _check_nonneg("p", p)
    _check_positive("temperature", temperature)
    if not math.isfinite(e_field):
        raise ConfigError(f"e_field must be finite, got {e_field!r}")
    gamma = p * e_field / (BOLTZMANN * temperature)
    return n * p * langevin(gamma)


def relative_permittivity_debye(n: float, p: float, temperature: float) -> float:
    """Small-field relative permittivity n*p^2 / (3*k*T*eps0) + 1."""
    _check_nonneg("n", n)
    _check_nonneg("p", p)
    _check_positive("temperature", temperature)
    # Evaluation order mirrors effective_permittivity's dopant term so the
    # zero-impurity case of that model reduces to this value bit-exactly.
    return n * (p * p) / (3.0 * BOLTZMANN * temperature * VACUUM_PERMITTIVITY) + 1.0


@dataclass(frozen=True)
class DielectricSystem:
    """Dipole populations of a doped solution with an ionic impurity.

    n_d, p_d:    number density and dipole moment of the added dopant.
    n_i, p_i:    number density and dipole moment of the ionic impurity.
    n_i1, n_i2:  impurity sub-populations; their ratio scales the
                 impurity moment (n_i2 > 0 whenever n_i > 0).
    n_w, p_w:    water number density and dipole moment.
    temperature: absolute temperature in K.
    sigma:       bulk conductivity in S/m.
    area, gap:   electrode area (m^2) and spacing (m); the defaults give
                 a unity cell constant (area/gap = 1 m).
    """

    n_d: float
    p_d: float
    n_i: float
    p_i: float
    n_i1: float
    n_i2: float
    n_w: float
    p_w: float
    temperature: float
    sigma: float = 0.0
    area: float = 1.0
    gap: float = 1.0

    def __post_init__(self) -> None:
        for name in ("n_d", "p_d", "n_i", "p_i", "n_i1", "n_i2", "n_w", "p_w", "sigma"):
            _check_nonneg(name, getattr(self, name))
        for name in ("temperature", "area", "gap"):
            _check_positive(name, getattr(self, name))


def effective_permittivity(system: DielectricSystem) -> float:
    """Effective relative permittivity of the doped solution.

    Two regimes, switched on the impurity-to-dopant density balance.
    When n_i <= n_d the impurity dipoles act against the water they
    displace; when the impurity dominates (n_i > n_d), the impurity
    population swollen by the freed water, n_i' = n_i + n_w, adds a
    further aligned contribution with the same sub-population ratio.
    No continuity across the regime boundary is claimed.
    """
    s = system
    scale = 3.0 * BOLTZMANN * s.temperature * VACUUM_PERMITTIVITY
    total = s.n_d * (s.p_d * s.p_d)
    if s.n_i > 0.0:
        if s.n_i2 == 0.0:
            raise ConfigError("effective_permittivity: n_i2 = 0 with n_i > 0 (undefined ratio)")
        p_eff = s.p_i * (1.0 + s.n_i1 / s.n_i2)
        total += s.n_i * (p_eff - s.p_w) ** 2
        if s.n_i > s.n_d:
            n_i_prime = s.n_i + s.n_w
            total += n_i_prime * p_eff**2
    return total / scale + 1.0


def complex_permittivity(eps: float, sigma: float, f: float) -> complex:
    """Lossy permittivity eps - j*sigma/(2*pi*f), all in F/m.

    ``eps`` is the (absolute) real permittivity in F/m, ``sigma`` the
    solution conductivity in S/m, ``f`` the frequency in Hz.  The
    imaginary part is always <= 0 for sigma >= 0.
    """
    _check_positive("eps", eps)
    _check_nonneg("sigma", sigma)
    _check_positive("f", f)
    return complex(eps, -sigma / (TWO_PI * f))


def solution_capacitance(epsilon_star: complex, area: float, gap: float) -> float:
    """Parallel-plate solution capacitance \\|eps*\\| * area / gap in F.

    ``area`` is the electrode area in m^2 and ``gap`` the electrode
    separation in m.  The magnitude of the lossy permittivity is used,
    so the result is always > 0.
    """
    _check_positive("area", area)
    _check_positive("gap", gap)
    mag = abs(epsilon_star)
    if not (math.isfinite(mag) and mag > 0.0):
        raise NumericalError("solution_capacitance: |eps*| must be finite and > 0")
    return mag * area / gap


def _check_positive(name: str, v: float) -> None:
    if not (math.isfinite(v) and v > 0.0):
        raise ConfigError(f"{name} must be finite and > 0, got {v!r}")


def _check_nonneg(name: str, v: float) -> None:
    if not (math.isfinite(v) and v >= 0.0):
        raise ConfigError(f"{name} must be finite and >= 0, got {v!r}")
