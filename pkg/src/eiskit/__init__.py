"""eiskit: impedance-spectroscopy sensing toolkit.

Simulation and fitting of a conductivity-cell equivalent circuit,
dipolar dielectric mixing models, calibration statistics with
uncertainty intervals, optical peak analysis, and a polar signature
map for classifying adulterants in suspension.
"""

from .acquisition import RNG_ALGORITHM, MeasurementRecord, SweepConfig, log_sweep, simulate_sweep
from .circuit import (
    CircuitParams,
    ImpedanceSpectrum,
    cell_impedance,
    element_impedance,
    nyquist_points,
    parallel,
    series,
    to_parallel_cg,
)
from .classify import (
    AdulterantSignature,
    CalibrationPoint,
    CalibrationSeries,
    Category,
    ClassificationResult,
    MeasurementPoint,
    Trend,
    UnknownSeries,
    build_signature_map,
    classify,
    percent_impedance_change,
    phase_angle,
    polar_points,
    trend_direction,
)
from .constants import TOOL_VERSION
from .dielectric import (
    DielectricSystem,
    complex_permittivity,
    effective_permittivity,
    langevin,
    polarization,
    relative_permittivity_debye,
    solution_capacitance,
)
from .errors import ConfigError, DataError, EiskitError, NumericalError, UnclassifiableError
from .fitting import (
    FitNonConvergence,
    LinearFit,
    RegimeSplit,
    SensitivityResult,
    estimate_circuit_params,
    interval_envelope,
    linearity_regime_detect,
    ols_fit,
    prediction_interval,
    sensitivity_coefficient,
    sensitivity_profile,
)
from .spectral import PeakInfo, SampledSpectrum, find_peaks, fwhm, peak_shift

__version__ = TOOL_VERSION

__all__ = [
    "AdulterantSignature",
    "CalibrationPoint",
    "CalibrationSeries",
    "Category",
    "CircuitParams",
    "ClassificationResult",
    "ConfigError",
    "DataError",
    "DielectricSystem",
    "EiskitError",
    "FitNonConvergence",
    "ImpedanceSpectrum",
    "LinearFit",
    "MeasurementPoint",
    "MeasurementRecord",
    "NumericalError",
    "PeakInfo",
    "RegimeSplit",
    "RNG_ALGORITHM",
    "SampledSpectrum",
    "SensitivityResult",
    "SweepConfig",
    "TOOL_VERSION",
    "Trend",
    "UnclassifiableError",
    "UnknownSeries",
    "build_signature_map",
    "cell_impedance",
    "classify",
    "complex_permittivity",
    "effective_permittivity",
    "element_impedance",
    "estimate_circuit_params",
    "find_peaks",
    "fwhm",
    "interval_envelope",
    "langevin",
    "linearity_regime_detect",
    "log_sweep",
    "nyquist_points",
    "ols_fit",
    "parallel",
    "peak_shift",
    "percent_impedance_change",
    "phase_angle",
    "polar_points",
    "polarization",
    "prediction_interval",
    "relative_permittivity_debye",
    "sensitivity_coefficient",
    "sensitivity_profile",
    "series",
    "simulate_sweep",
    "solution_capacitance",
    "to_parallel_cg",
    "trend_direction",
]
