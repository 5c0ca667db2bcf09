"""Least-squares calibration, sensitivity, and circuit-parameter fitting.

Two uncertainty conventions live side by side here, on purpose:

* Confidence intervals on the fitted slope and intercept use a fixed
  coverage factor (default k = 2), i.e. estimate +/- k * standard
  error.  This is the reporting convention of the calibration tables
  this module reproduces.
* Prediction intervals for a fresh observation use exact Student-t
  quantiles at the requested level, so their Monte Carlo coverage is
  nominal.

Do not mix them up: the k = 2 interval is a reporting convention, the
t interval is a statement about future data.

Circuit-parameter estimation minimizes a modulus-weighted residual over
log-parameters with a derivative-free simplex search, restarted on
stall; see :func:`estimate_circuit_params`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
from scipy import optimize, stats

from .circuit import PARAM_NAMES, CircuitParams, ImpedanceSpectrum, cell_impedance
from .errors import ConfigError, DataError, NumericalError

__all__ = [
    "LinearFit",
    "SensitivityResult",
    "RegimeSplit",
    "FitNonConvergence",
    "ols_fit",
    "prediction_interval",
    "sensitivity_coefficient",
    "sensitivity_profile",
    "interval_envelope",
    "estimate_circuit_params",
    "linearity_regime_detect",
]


@dataclass(frozen=True)
class LinearFit:
    """Ordinary least squares line y = m*x + c with uncertainty report.

    ci_m and ci_c are coverage-factor intervals (estimate +/- k*se).
    For n = 2 the standard errors are zero by convention (no residual
    degrees of freedom).
    """

    m: float
    c: float
    r2: float
    se_m: float
    se_c: float
    ci_m: tuple[float, float]
    ci_c: tuple[float, float]
    s_reg: float
    n: int

    def predict(self, x: float) -> float:
        return self.m * x + self.c

    def line_text(self) -> str:
        """Human-readable "y = mx + c" with 12 significant digits."""
        sign = "+" if self.c >= 0 else "-"
        return f"y = {self.m:.12g}x {sign} {abs(self.c):.12g}"


@dataclass(frozen=True)
class SensitivityResult:
    """Sensitivity coefficient of a response at one frequency."""

    frequency: float
    beta: float


class RegimeSplit(NamedTuple):
    """Result of linear-regime detection.

    boundary_index is the first index of the detected linear suffix,
    or None when no suffix of length >= 3 reaches the threshold
    (whole-range non-linear).  low_fit covers the points before the
    boundary when there are at least 2 of them.
    """

    boundary_index: int | None
    low_fit: LinearFit | None
    high_fit: LinearFit | None


class FitNonConvergence(NumericalError):
    """Circuit fit hit the iteration cap; carries the best point found."""

    def __init__(self, params: CircuitParams, residual: float, iterations: int):
        self.params = params
        self.residual = residual
        self.iterations = iterations
        super().__init__(
            f"circuit fit did not converge within {iterations} iterations; "
            f"best residual {residual:.6e} at {params.as_dict()}"
        )


def _as_xy(xs: Sequence[float], ys: Sequence[float], min_n: int) -> tuple[np.ndarray, np.ndarray]:
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if x.ndim != 1 or y.ndim != 1:
        raise DataError("xs and ys must be 1-D sequences")
    if x.size != y.size:
        raise DataError(f"length mismatch: {x.size} xs vs {y.size} ys")
    if x.size < min_n:
        raise DataError(f"need at least {min_n} points, got {x.size}")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise DataError("xs and ys must be finite")
    return x, y


def ols_fit(xs: Sequence[float], ys: Sequence[float], coverage_k: float = 2.0) -> LinearFit:
    """Fit y = m*x + c by ordinary least squares.

    Intervals are estimate +/- coverage_k * standard error.  R-squared
    is clamped to [0, 1]; for constant ys (zero total variance) the
    exact fit m = 0, c = mean(y) is returned with r2 = 1.
    """
    x, y = _as_xy(xs, ys, 2)
    if not (math.isfinite(coverage_k) and coverage_k >= 0.0):
        raise ConfigError(f"coverage_k must be finite and >= 0, got {coverage_k!r}")
    n = x.size
    xm = x.mean()
    ym = y.mean()
    dx = x - xm
    dy = y - ym
    sxx = float(dx @ dx)
    if sxx == 0.0:
        raise DataError("xs are all equal (zero variance); slope undefined")
    m = float(dx @ dy) / sxx
    c = ym - m * xm
    resid = y - (m * x + c)
    ss_res = float(resid @ resid)
    ss_tot = float(dy @ dy)
    if ss_tot == 0.0:
        r2 = 1.0
    else:
        r2 = min(1.0, max(0.0, 1.0 - ss_res / ss_tot))
    if n >= 3:
        s_reg = math.sqrt(ss_res / (n - 2))
        se_m = s_reg / math.sqrt(sxx)
        se_c = s_reg * math.sqrt(1.0 / n + xm * xm / sxx)
    else:
        # Exact line through 2 points: no residual degrees of freedom.
        s_reg = se_m = se_c = 0.0
    k = coverage_k
    return LinearFit(
        m=m,
        c=c,
        r2=r2,
        se_m=se_m,
        se_c=se_c,
        ci_m=(m - k * se_m, m + k * se_m),
        ci_c=(c - k * se_c, c + k * se_c),
        s_reg=s_reg,
        n=n,
    )


def prediction_interval(
    fit: LinearFit,
    xs: Sequence[float],
    ys: Sequence[float],
    x0: float,
    level: float = 0.95,
) -> tuple[float, float]:
    """Exact-t prediction interval for a fresh observation at x0.

    yhat(x0) +/- t_{(1+level)/2, n-2} * s_reg * sqrt(1 + 1/n +
    (x0 - mean(x))^2 / Sxx).  ``xs``/``ys`` must be the data the fit
    came from.  Width is minimal at x0 = mean(x) and symmetric.
    """
    x, y = _as_xy(xs, ys, 3)
    if fit.n != x.size:
        raise DataError(f"fit has n={fit.n} but {x.size} points were given")
    if not (math.isfinite(x0)):
        raise ConfigError(f"x0 must be finite, got {x0!r}")
    if not (0.0 < level < 1.0):
        raise ConfigError(f"level must be in (0, 1), got {level!r}")
    xm = x.mean()
    dx = x - xm
    sxx = float(dx @ dx)
    if sxx == 0.0:
        raise DataError("xs are all equal (zero variance)")
    t = float(stats.t.ppf(0.5 * (1.0 + level), fit.n - 2))
    yhat = fit.predict(x0)
    half = t * fit.s_reg * math.sqrt(1.0 + 1.0 / fit.n + (x0 - xm) ** 2 / sxx)
    return (yhat - half, yhat + half)


def sensitivity_coefficient(ws: Sequence[float], values: Sequence[float]) -> float:
    """Coefficient of sensitivity of a response to concentration.

    beta = sum((w - <w>) * (v - <v>)) / sum((w - <w>)^2), the slope of
    the response against weight-percent; algebraically identical to the
    ols_fit slope on the same data.
    """
    w, v = _as_xy(ws, values, 2)
    wm = w.mean()
    vm = v.mean()
    num = float(np.sum((w - wm) * (v - vm)))
    den = float(np.sum((w - wm) ** 2))
    if den == 0.0:
        raise DataError("ws are all equal (zero concentration variance)")
    return num / den


def sensitivity_profile(
    frequencies: Sequence[float],
    concentrations: Sequence[float],
    values: np.ndarray,
) -> list[SensitivityResult]:
    """Per-frequency sensitivity of a response surface.

    ``values`` has shape (n_frequencies, n_concentrations); row i holds
    the response at frequencies[i] across the concentration series.
    """
    f = np.asarray(frequencies, dtype=float)
    v = np.asarray(values, dtype=float)
    if v.ndim != 2 or v.shape[0] != f.size:
        raise DataError(
            f"values must have shape (n_frequencies, n_concentrations); got {v.shape}"
        )
    return [
        SensitivityResult(frequency=float(fi), beta=sensitivity_coefficient(concentrations, row))
        for fi, row in zip(f, v)
    ]


def interval_envelope(fits: Sequence[LinearFit]) -> tuple[tuple[float, float], tuple[float, float]]:
    """Min/max envelope of slope and intercept intervals across datasets.

    Reports the union span of the per-dataset coverage intervals,
    without claiming any pooled estimate.
    """
    if not fits:
        raise DataError("interval_envelope: no fits given")
    m_lo = min(f.ci_m[0] for f in fits)
    m_hi = max(f.ci_m[1] for f in fits)
    c_lo = min(f.ci_c[0] for f in fits)
    c_hi = max(f.ci_c[1] for f in fits)
    return ((m_lo, m_hi), (c_lo, c_hi))


# Circuit-fit iteration budget and stall tolerance (relative residual
# change between restarts below which the search is declared converged).
MAX_FIT_ITERATIONS = 10_000
FIT_REL_TOL = 1e-12


def estimate_circuit_params(
    s: ImpedanceSpectrum,
    guess: CircuitParams,
    fixed: frozenset[str] | set[str] = frozenset(),
    max_iterations: int = MAX_FIT_ITERATIONS,
    rel_tol: float = FIT_REL_TOL,
) -> tuple[CircuitParams, float]:
    """Fit circuit parameters to a measured spectrum.

    Minimizes sum_f |Z_model(p, f) - Z_data(f)|^2 / |Z_data(f)|^2 over
    the free parameters, searched in log space (so parameters stay
    positive) with a Nelder-Mead simplex restarted whenever it stalls.
    ``fixed`` names parameters held at their guess value.  Parameters
    that are zero in the guess are structurally absent branches and are
    always held at zero.  c_sol and c_stray enter the model only through
    the combination c_sol + c_stray/2, so at most one of them may be
    free; fitting both is rejected as non-identifiable.

    Returns (best_params, final_residual).  Deterministic for fixed
    inputs.  Raises :class:`FitNonConvergence` (carrying the best point
    found) if the iteration cap is reached before the relative residual
    change drops below ``rel_tol``.
    """
    unknown = set(fixed) - set(PARAM_NAMES)
    if unknown:
        raise ConfigError(f"unknown parameter names in fixed: {sorted(unknown)}")
    guess_vals = guess.as_dict()
    free = [n for n in PARAM_NAMES if n not in fixed and guess_vals[n] > 0.0]
    if not free:
        raise ConfigError("no free parameters to fit")
    if "c_sol" in free and "c_stray" in free:
        raise ConfigError(
            "c_sol and c_stray are jointly non-identifiable "
            "(only c_sol + c_stray/2 is observable); fix one of them"
        )
    if len(s) < len(free):
        raise DataError(f"spectrum has {len(s)} points but {len(free)} free parameters")
    mags = np.abs(s.z)
    if np.any(mags == 0.0):
        raise DataError("spectrum contains zero-magnitude impedance points")
    weights = 1.0 / mags**2

    def residual_of(trial: dict[str, float]) -> float:
        try:
            params = CircuitParams(**trial)
            z = cell_impedance(params, s.frequencies)
        except (ConfigError, NumericalError, OverflowError):
            return 1e300  # out-of-domain trial point; steer the simplex back
        return float(np.sum(np.abs(z - s.z) ** 2 * weights))

    def residual(log_p: np.ndarray) -> float:
        trial = dict(guess_vals)
        for name, lv in zip(free, log_p):
            trial[name] = math.exp(lv)
        return residual_of(trial)

    if max_iterations < 1:
        raise ConfigError(f"max_iterations must be >= 1, got {max_iterations!r}")
    # Evaluate the guess at its literal values: the log round trip
    # perturbs parameters by an ulp, which would miss an exact fixed
    # point.  The optimizer has to beat this to change the answer.
    f_guess = residual_of(dict(guess_vals))
    if f_guess == 0.0:
        return guess, 0.0
    x_best = np.array([math.log(guess_vals[n]) for n in free])
    f_best = residual(x_best)
    spent = 0
    converged = False
    while spent < max_iterations:
        budget = min(2000, max_iterations - spent)
        res = optimize.minimize(
            residual,
            x_best,
            method="Nelder-Mead",
            options={
                "maxiter": budget,
                "xatol": 1e-13,
                "fatol": max(rel_tol * f_best, 5e-324),
            },
        )
        spent += max(1, int(res.nit))
        improvement = f_best - float(res.fun)
        if res.fun < f_best:
            f_best = float(res.fun)
            x_best = np.asarray(res.x, dtype=float)
        # Restart-on-stall: a fresh simplex around the incumbent; stop
        # once a whole restart no longer improves the residual by
        # rel_tol relative.
        if improvement <= rel_tol * max(f_best, 5e-324):
            converged = True
            break

    if f_guess <= f_best:
        # nothing beat the literal starting point
        params, f_best = guess, f_guess
    else:
        fitted = dict(guess_vals)
        for name, lv in zip(free, x_best):
            fitted[name] = math.exp(lv)
        params = CircuitParams(**fitted)
    if not converged:
        raise FitNonConvergence(params, f_best, spent)
    return params, f_best


def linearity_regime_detect(
    concs: Sequence[float],
    values: Sequence[float],
    r2_threshold: float = 0.95,
) -> RegimeSplit:
    """Locate the linear high-concentration regime of a response curve.

    Finds the longest suffix (at least 3 points) whose ols_fit reaches
    the r2 threshold; the boundary is that suffix's first index.  The
    complementary prefix gets its own fit when it has at least 2
    points.  Returns (None, None, None) when no suffix qualifies
    (whole-range non-linear).
    """
    x, y = _as_xy(concs, values, 4)
    if np.any(np.diff(x) <= 0.0):
        raise DataError("concs must be strictly increasing")
    if not (0.0 < r2_threshold <= 1.0):
        raise ConfigError(f"r2_threshold must be in (0, 1], got {r2_threshold!r}")
    n = x.size
    for start in range(0, n - 2):
        high = ols_fit(x[start:], y[start:])
        if high.r2 >= r2_threshold:
            low = ols_fit(x[:start], y[:start]) if start >= 2 else None
            return RegimeSplit(start, low, high)
    return RegimeSplit(None, None, None)
