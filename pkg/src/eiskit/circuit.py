"""Equivalent-circuit model of a parallel-plate conductivity cell.

The cell is modelled as a solution branch (solution resistance in series
with the double-layer reactance) in parallel with the solution bulk
capacitance, optionally in parallel with a stray capacitance, with an
optional stray series inductance added last:

    Z = ((Z1 || Z2) || Z_stray_C) + Z_stray_L

        Z1 = r_sol - j / (pi * f * c_dl)
        Z2 = -j / (2 * pi * f * c_sol)
        Z_stray_C = -j / (pi * f * c_stray)     (branch absent when c_stray = 0)
        Z_stray_L = 2j * pi * f * l_stray       (zero when l_stray = 0)

The branch factors (pi versus 2*pi) are intentional and fixed; see
:mod:`eiskit.constants` for the authoritative table.

All operations reject non-finite inputs and never return NaN or Inf.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import TWO_PI
from .errors import ConfigError, DataError, NumericalError

__all__ = [
    "CircuitParams",
    "ImpedanceSpectrum",
    "element_impedance",
    "series",
    "parallel",
    "cell_impedance",
    "to_parallel_cg",
    "nyquist_points",
]

# Order used by the circuit fitter when flattening parameters to a vector.
PARAM_NAMES: tuple[str, ...] = ("r_sol", "c_dl", "c_sol", "c_stray", "l_stray")

_ELEMENT_KINDS = ("resistor", "capacitor", "inductor")


def _require_finite(what: str, *values: complex) -> None:
    for v in values:
        if not np.all(np.isfinite(v)):
            raise NumericalError(f"{what}: non-finite value encountered")


@dataclass(frozen=True)
class CircuitParams:
    """Lumped parameters of the conductivity-cell model.

    r_sol is the solution resistance in ohm, c_dl the double-layer
    capacitance in farad, c_sol the solution capacitance in farad.
    c_stray and l_stray model the fixture parasitics; either may be
    exactly zero, which removes that branch from the model.
    """

    r_sol: float
    c_dl: float
    c_sol: float
    c_stray: float = 0.0
    l_stray: float = 0.0

    def __post_init__(self) -> None:
        for name in ("r_sol", "c_dl", "c_sol"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0.0):
                raise ConfigError(f"{name} must be finite and > 0, got {v!r}")
        for name in ("c_stray", "l_stray"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0.0):
                raise ConfigError(f"{name} must be finite and >= 0, got {v!r}")

    def as_dict(self) -> dict[str, float]:
        return {name: float(getattr(self, name)) for name in PARAM_NAMES}


@dataclass(frozen=True)
class ImpedanceSpectrum:
    """Complex impedance sampled on a strictly increasing frequency grid."""

    frequencies: np.ndarray
    z: np.ndarray

    def __post_init__(self) -> None:
        f = np.asarray(self.frequencies, dtype=float)
        z = np.asarray(self.z, dtype=complex)
        if f.ndim != 1 or z.ndim != 1 or f.size != z.size:
            raise DataError("frequencies and z must be 1-D arrays of equal length")
        if f.size < 1:
            raise DataError("spectrum must contain at least one point")
        if not np.all(np.isfinite(f)) or not np.all(np.isfinite(z)):
            raise DataError("spectrum contains non-finite values")
        if np.any(f <= 0.0):
            raise DataError("frequencies must be > 0")
        if np.any(np.diff(f) <= 0.0):
            raise DataError("frequencies must be strictly increasing")
        object.__setattr__(self, "frequencies", f)
        object.__setattr__(self, "z", z)

    def __len__(self) -> int:
        return int(self.frequencies.size)


def element_impedance(kind: str, value: float, f: float) -> complex:
    """Impedance of a single ideal element at frequency ``f`` in Hz.

    kind is one of "resistor" (value in ohm), "capacitor" (farad) or
    "inductor" (henry).  Capacitor and inductor use the standard
    2*pi*f angular frequency.
    """
    if kind not in _ELEMENT_KINDS:
        raise ConfigError(f"unknown element kind {kind!r}; expected one of {_ELEMENT_KINDS}")
    if not (math.isfinite(value) and value > 0.0):
        raise ConfigError(f"element value must be finite and > 0, got {value!r}")
    if not (math.isfinite(f) and f > 0.0):
        raise ConfigError(f"frequency must be finite and > 0, got {f!r}")
    if kind == "resistor":
        return complex(value, 0.0)
    if kind == "capacitor":
        return -1j / (TWO_PI * f * value)
    return 1j * TWO_PI * f * value


def series(a: complex, b: complex) -> complex:
    """Series combination a + b (elementwise on arrays)."""
    _require_finite("series", a, b)
    out = a + b
    _require_finite("series", out)
    return out


def parallel(a: complex, b: complex) -> complex:
    """Parallel combination a*b / (a + b) (elementwise on arrays)."""
    _require_finite("parallel", a, b)
    denom = a + b
    if np.any(denom == 0):
        raise NumericalError("parallel: a + b is zero (antiresonant pair)")
    out = a * b / denom
    _require_finite("parallel", out)
    return out


def cell_impedance(params: CircuitParams, f):
    """Model impedance of the cell at frequency ``f`` (scalar or array, Hz).

    Returns a complex scalar for scalar input, a complex ndarray for
    array input.  Frequencies must be finite and > 0.
    """
    # Scalars are computed through a 1-element array so the result is
    # bit-identical with the vectorized path at the same frequency.
    f_arr = np.atleast_1d(np.asarray(f, dtype=float))
    if not np.all(np.isfinite(f_arr)) or np.any(f_arr <= 0.0):
        raise ConfigError("frequencies must be finite and > 0")

    # Branch reactances follow the factor table in eiskit.constants verbatim.
    z1 = params.r_sol - 1j / (math.pi * f_arr * params.c_dl)
    z2 = -1j / (TWO_PI * f_arr * params.c_sol)
    z = parallel(z1, z2)
    if params.c_stray > 0.0:
        z_st = -1j / (math.pi * f_arr * params.c_stray)
        z = parallel(z, z_st)
    if params.l_stray > 0.0:
        z = series(z, 1j * TWO_PI * f_arr * params.l_stray)

    _require_finite("cell_impedance", z)
    if np.ndim(f) == 0:
        return complex(z[0])
    return z


def to_parallel_cg(z: complex, f: float) -> tuple[float, float]:
    """Equivalent parallel capacitance and conductance of impedance ``z``.

    Interprets ``z`` at frequency ``f`` as a parallel C-G pair via the
    admittance y = 1/z: g = Re(y), c = Im(y) / (2*pi*f).  The sign of c
    follows the phase of z, so inductive-phase impedances map to a
    negative equivalent capacitance.
    """
    if not (math.isfinite(f) and f > 0.0):
        raise ConfigError(f"frequency must be finite and > 0, got {f!r}")
    _require_finite("to_parallel_cg", z)
    if z == 0:
        raise NumericalError("to_parallel_cg: impedance is zero")
    y = 1.0 / z
    g = y.real
    c = y.imag / (TWO_PI * f)
    _require_finite("to_parallel_cg", c, g)
    return (c, g)


def nyquist_points(spectrum: ImpedanceSpectrum) -> np.ndarray:
    """Plot-ready Nyquist points: column 0 is Re(Z), column 1 is \\|Im(Z)\\|.

    Row order follows the spectrum's frequency order.
    """
    pts = np.column_stack([spectrum.z.real, np.abs(spectrum.z.imag)])
    return pts
