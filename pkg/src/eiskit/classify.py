"""Phase-angle / impedance-change adulterant classification.

Each calibration series (one adulterant at several concentrations plus
a pure reference, all measured at one reference frequency) is condensed
into a signature: an angular sector of admittance phase angles, the
sign of its impedance trend, and a radial curve mapping concentration
to the percent impedance change against the pure reference.

An unknown sample is then classified in three steps: (1) its category
from the sign of its impedance change, (2) the adulterant whose angular
sector contains the unknown's mean phase angle and whose trend matches,
overlapping sectors being disambiguated by trend, and (3) its
concentration by inverting the matched radial curve.

The phase angle is arctan(2*pi*f*C / G) in degrees, the argument of the
parallel-equivalent admittance: 0 deg for a pure conductor, 90 deg for
a pure capacitor.  A doubled-angle presentation ("spread" display) is
available for the polar-plot export only; it never enters matching.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .constants import TWO_PI
from .errors import ConfigError, DataError, UnclassifiableError
from .fitting import ols_fit

__all__ = [
    "Category",
    "Trend",
    "MeasurementPoint",
    "CalibrationPoint",
    "CalibrationSeries",
    "UnknownSeries",
    "AdulterantSignature",
    "ClassificationResult",
    "percent_impedance_change",
    "phase_angle",
    "trend_direction",
    "build_signature_map",
    "classify",
    "polar_points",
]

DEFAULT_F_REF = 1000.0

# An |Z| trend flatter than this fraction of the mean magnitude is
# treated as noise rather than a direction.
TREND_NOISE_FLOOR = 0.01


class Category(str, Enum):
    POLAR = "polar"
    NONPOLAR_IONIC = "nonpolar_ionic"


class Trend(str, Enum):
    Z_INCREASING = "z_increasing"
    Z_DECREASING = "z_decreasing"
    NON_MONOTONE = "non_monotone"


def _check_measurement(what: str, z: complex, c: float, g: float) -> None:
    for name, v in (("z", z), ("c", c), ("g", g)):
        if not np.all(np.isfinite(v)):
            raise DataError(f"{what}: non-finite {name}")
    if abs(z) == 0.0:
        raise DataError(f"{what}: zero impedance")


@dataclass(frozen=True)
class MeasurementPoint:
    """Impedance and parallel-equivalent C, G of one measured sample."""

    z: complex
    c: float
    g: float

    def __post_init__(self) -> None:
        _check_measurement("measurement point", self.z, self.c, self.g)


@dataclass(frozen=True)
class CalibrationPoint:
    """One adulterated calibration sample at a known concentration."""

    concentration: float
    z: complex
    c: float
    g: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.concentration) and self.concentration > 0.0):
            raise DataError(
                f"calibration concentration must be finite and > 0, got {self.concentration!r}"
            )
        _check_measurement("calibration point", self.z, self.c, self.g)


@dataclass(frozen=True)
class CalibrationSeries:
    """Labeled concentration series of one adulterant at one frequency.

    ``reference`` is the pure (concentration-zero) sample; ``points``
    are the adulterated samples with strictly increasing concentrations.
    """

    adulterant: str
    category: Category
    reference: MeasurementPoint
    points: tuple[CalibrationPoint, ...]

    def __post_init__(self) -> None:
        if not self.adulterant:
            raise DataError("calibration series needs a non-empty adulterant name")
        object.__setattr__(self, "category", Category(self.category))
        object.__setattr__(self, "points", tuple(self.points))
        if len(self.points) < 2:
            raise DataError(
                f"series {self.adulterant!r}: need >= 2 calibration points, "
                f"got {len(self.points)}"
            )
        concs = [p.concentration for p in self.points]
        if any(b <= a for a, b in zip(concs, concs[1:])):
            raise DataError(f"series {self.adulterant!r}: concentrations must be strictly increasing")


@dataclass(frozen=True)
class UnknownSeries:
    """Unlabeled sample: its pure reference plus >= 1 replicate measurements."""

    reference: MeasurementPoint
    samples: tuple[MeasurementPoint, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "samples", tuple(self.samples))
        if len(self.samples) < 1:
            raise DataError("unknown series needs at least one adulterated measurement")


@dataclass(frozen=True)
class AdulterantSignature:
    """Condensed classification signature of one adulterant.

    ``concentrations``/``percents`` are the nodes of the radial curve,
    anchored at (0, 0) and strictly monotone in percent.
    """

    adulterant: str
    category: Category
    trend: Trend
    angle_range: tuple[float, float]
    concentrations: tuple[float, ...]
    percents: tuple[float, ...]

    def __post_init__(self) -> None:
        lo, hi = self.angle_range
        if not (lo <= hi):
            raise DataError(f"signature {self.adulterant!r}: angle_range lo > hi")
        if len(self.concentrations) != len(self.percents) or len(self.concentrations) < 2:
            raise DataError(f"signature {self.adulterant!r}: malformed radial curve")
        dp = np.diff(self.percents)
        if not (np.all(dp > 0.0) or np.all(dp < 0.0)):
            raise DataError(
                f"signature {self.adulterant!r}: radial curve is not strictly monotone"
            )

    def invert_radial(self, percent: float) -> tuple[float, bool]:
        """Concentration at a given percent change, with extrapolation flag.

        Linear interpolation between nodes; values beyond the calibrated
        range are clamped to the end nodes and flagged.
        """
        p = np.asarray(self.percents, dtype=float)
        c = np.asarray(self.concentrations, dtype=float)
        if p[-1] < p[0]:
            p, c = p[::-1], c[::-1]
        extrapolated = bool(percent < p[0] or percent > p[-1])
        return float(np.interp(percent, p, c)), extrapolated


@dataclass(frozen=True)
class Diagnostics:
    """What the classifier looked at while deciding."""

    angle_deg: float
    percent_change: float
    trend: Trend
    candidates: tuple[str, ...]
    extrapolated: bool


@dataclass(frozen=True)
class ClassificationResult:
    """Outcome of classifying one unknown sample.

    ``adulterant`` is a name on a unique match, a frozenset of names
    when ambiguous, or None when nothing matched.  A concentration
    estimate is present only for a unique match.
    """

    adulterant: str | frozenset[str] | None
    category: Category
    concentration_estimate: float | None
    diagnostics: Diagnostics


def percent_impedance_change(z_ref, z_sample) -> float:
    """Signed percent change of impedance magnitude against a reference.

    100 * (|z_sample| - |z_ref|) / |z_ref|.  Inputs may be complex or
    plain magnitudes.
    """
    ref = abs(z_ref)
    sam = abs(z_sample)
    if not (math.isfinite(ref) and math.isfinite(sam)):
        raise DataError("percent_impedance_change: non-finite input")
    if ref == 0.0:
        raise DataError("percent_impedance_change: zero reference impedance")
    return 100.0 * (sam - ref) / ref


def phase_angle(c: float, g: float, f: float) -> float:
    """Admittance phase angle arctan(2*pi*f*c / g) in degrees.

    In [0, 90] for nonnegative c and g: 0 deg for a pure conductor
    (c = 0), 90 deg for a pure capacitor (g = 0).
    """
    if not (math.isfinite(f) and f > 0.0):
        raise ConfigError(f"frequency must be finite and > 0, got {f!r}")
    if not (math.isfinite(c) and math.isfinite(g)):
        raise DataError("phase_angle: non-finite input")
    if c == 0.0 and g == 0.0:
        raise DataError("phase_angle: c and g are both zero")
    return math.degrees(math.atan2(TWO_PI * f * c, g))


def trend_direction(series: CalibrationSeries) -> Trend:
    """Direction of the |z|-vs-concentration trend of a series.

    OLS slope over the reference (concentration 0) and all calibration
    points; the trend counts only when |slope| * concentration span
    exceeds a noise floor of 1% of the mean magnitude, otherwise the
    series is flat within noise (non-monotone).
    """
    concs = [0.0] + [p.concentration for p in series.points]
    mags = [abs(series.reference.z)] + [abs(p.z) for p in series.points]
    slope = ols_fit(concs, mags).m
    span = concs[-1] - concs[0]
    floor = TREND_NOISE_FLOOR * (sum(mags) / len(mags))
    if abs(slope) * span <= floor:
        return Trend.NON_MONOTONE
    return Trend.Z_INCREASING if slope > 0.0 else Trend.Z_DECREASING


def build_signature_map(
    series_set: list[CalibrationSeries] | tuple[CalibrationSeries, ...],
    f_ref: float = DEFAULT_F_REF,
) -> tuple[AdulterantSignature, ...]:
    """Condense calibration series into a sorted signature map.

    Angle ranges span the adulterated points' phase angles (the shared
    pure reference would smear every range over a common angle, so it
    stays out).  The radial curve is anchored at (0, 0) and must be
    strictly monotone, otherwise the offending series is rejected by
    name.  Signatures are sorted by (angle_lo, adulterant).
    """
    if not series_set:
        raise DataError("build_signature_map: no calibration series given")
    names = [s.adulterant for s in series_set]
    if len(set(names)) != len(names):
        raise DataError("build_signature_map: duplicate adulterant names")
    signatures = []
    for s in series_set:
        trend = trend_direction(s)
        if trend is Trend.NON_MONOTONE:
            raise DataError(
                f"series {s.adulterant!r}: impedance trend is flat within the "
                "noise floor; cannot build a signature"
            )
        angles = [phase_angle(p.c, p.g, f_ref) for p in s.points]
        concs = (0.0,) + tuple(p.concentration for p in s.points)
        pcts = (0.0,) + tuple(
            percent_impedance_change(s.reference.z, p.z) for p in s.points
        )
        dp = np.diff(pcts)
        if not (np.all(dp > 0.0) or np.all(dp < 0.0)):
            raise DataError(
                f"series {s.adulterant!r}: percent impedance change is not "
                "strictly monotone in concentration; calibration rejected"
            )
        signatures.append(
            AdulterantSignature(
                adulterant=s.adulterant,
                category=s.category,
                trend=trend,
                angle_range=(min(angles), max(angles)),
                concentrations=concs,
                percents=pcts,
            )
        )
    signatures.sort(key=lambda sig: (sig.angle_range[0], sig.adulterant))
    return tuple(signatures)


def _unknown_trend(pct: float) -> Trend:
    if abs(pct) <= 100.0 * TREND_NOISE_FLOOR:
        return Trend.NON_MONOTONE
    return Trend.Z_INCREASING if pct > 0.0 else Trend.Z_DECREASING


def classify(
    unknown: UnknownSeries,
    signatures: tuple[AdulterantSignature, ...] | list[AdulterantSignature],
    f_ref: float = DEFAULT_F_REF,
) -> ClassificationResult:
    """Identify and quantify an unknown sample against a signature map.

    Step 1: category from the sign of the unknown's impedance change
    (increase means polar, decrease means non-polar/ionic).  Step 2:
    candidate signatures whose angle range contains the unknown's mean
    phase angle; among those, the trend sign disambiguates overlapping
    ranges; more than one survivor yields an ambiguous set, none yields
    an unidentified result.  Step 3: for a unique match, concentration
    from the inverted radial curve, with out-of-range inputs clamped
    and flagged in the diagnostics.

    Raises an error when the unknown's impedance change sits within the
    noise floor (no trend to classify on).
    """
    if not signatures:
        raise DataError("classify: empty signature map")
    mean_mag = sum(abs(p.z) for p in unknown.samples) / len(unknown.samples)
    pct = percent_impedance_change(unknown.reference.z, mean_mag)
    trend = _unknown_trend(pct)
    if trend is Trend.NON_MONOTONE:
        raise UnclassifiableError(
            f"unknown sample's impedance change ({pct:.3g}%) is within the "
            f"noise floor ({100.0 * TREND_NOISE_FLOOR:.3g}%); no trend to classify on"
        )
    category = Category.POLAR if trend is Trend.Z_INCREASING else Category.NONPOLAR_IONIC
    angle = sum(phase_angle(p.c, p.g, f_ref) for p in unknown.samples) / len(unknown.samples)

    in_range = [sig for sig in signatures if sig.angle_range[0] <= angle <= sig.angle_range[1]]
    candidates = [sig for sig in in_range if sig.trend is trend]
    considered = tuple(sig.adulterant for sig in in_range)

    adulterant: str | frozenset[str] | None
    concentration = None
    extrapolated = False
    if not candidates:
        adulterant = None
    elif len(candidates) > 1:
        adulterant = frozenset(sig.adulterant for sig in candidates)
    else:
        match = candidates[0]
        adulterant = match.adulterant
        concentration, extrapolated = match.invert_radial(pct)

    return ClassificationResult(
        adulterant=adulterant,
        category=category,
        concentration_estimate=concentration,
        diagnostics=Diagnostics(
            angle_deg=angle,
            percent_change=pct,
            trend=trend,
            candidates=considered,
            extrapolated=extrapolated,
        ),
    )


def polar_points(
    series_set: list[CalibrationSeries] | tuple[CalibrationSeries, ...],
    f_ref: float = DEFAULT_F_REF,
    doubled: bool = False,
) -> list[tuple[str, str, float, float, float]]:
    """Plot-ready polar coordinates of every calibration point.

    Rows of (adulterant, category, concentration, angle_deg,
    radius_percent).  ``doubled`` doubles the angles for a wider
    angular spread in the plot; it is presentation only and never used
    for classification.
    """
    rows = []
    for s in series_set:
        for p in s.points:
            angle = phase_angle(p.c, p.g, f_ref)
            if doubled:
                angle *= 2.0
            rows.append(
                (
                    s.adulterant,
                    s.category.value,
                    p.concentration,
                    angle,
                    percent_impedance_change(s.reference.z, p.z),
                )
            )
    return rows
