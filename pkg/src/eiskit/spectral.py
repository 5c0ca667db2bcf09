"""Peak detection, width, and shift analysis for sampled optical spectra.

Spectra are value-vs-axis samples (wavelength in nm or wavenumber in
1/cm) on a strictly monotone, not necessarily uniform, grid.  A
decreasing axis is normalized to increasing order at construction, so
downstream code sees one orientation.

Peak positions are refined by a parabola through the peak sample and
its two neighbours.  FWHM uses a basin-local baseline: the lowest
sample between the enclosing minima of the peak, with the half level at
baseline + (height - baseline)/2 and crossings located by linear
interpolation on the given (possibly non-uniform) axis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy import signal

from .errors import ConfigError, DataError

__all__ = [
    "AXIS_KINDS",
    "SampledSpectrum",
    "PeakInfo",
    "find_peaks",
    "fwhm",
    "peak_shift",
]

AXIS_KINDS = ("wavelength_nm", "wavenumber_cm-1")

# Default peak prominence threshold as a fraction of the global range.
DEFAULT_PROMINENCE_FRACTION = 0.05


@dataclass(frozen=True)
class SampledSpectrum:
    """Absorbance (or any scalar value) sampled on a monotone axis."""

    axis: np.ndarray
    values: np.ndarray
    axis_kind: str

    def __post_init__(self) -> None:
        if self.axis_kind not in AXIS_KINDS:
            raise ConfigError(f"axis_kind must be one of {AXIS_KINDS}, got {self.axis_kind!r}")
        x = np.asarray(self.axis, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if x.ndim != 1 or v.ndim != 1 or x.size != v.size:
            raise DataError("axis and values must be 1-D arrays of equal length")
        if x.size < 1:
            raise DataError("spectrum must contain at least one sample")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(v))):
            raise DataError("spectrum contains non-finite values")
        d = np.diff(x)
        if np.any(d == 0.0) or (np.any(d > 0.0) and np.any(d < 0.0)):
            raise DataError("axis must be strictly monotone")
        if x.size >= 2 and d[0] < 0.0:
            x = x[::-1].copy()
            v = v[::-1].copy()
        object.__setattr__(self, "axis", x)
        object.__setattr__(self, "values", v)

    def __len__(self) -> int:
        return int(self.axis.size)


@dataclass(frozen=True)
class PeakInfo:
    """One detected peak; half-width fields are set by :func:`fwhm`."""

    position: float
    height: float
    left_half: float | None = None
    right_half: float | None = None
    fwhm: float | None = None


def _refine_parabolic(x: np.ndarray, v: np.ndarray, i: int) -> tuple[float, float]:
    """Vertex of the parabola through samples i-1, i, i+1.

    Works on non-uniform grids; falls back to the sample itself when
    the three points are not concave.  The vertex is clamped to the
    neighbour span.
    """
    u1 = x[i - 1] - x[i]
    u2 = x[i + 1] - x[i]
    a_ = v[i - 1] - v[i]
    b_ = v[i + 1] - v[i]
    denom = u1 * u2 * (u2 - u1)
    a = (u1 * b_ - u2 * a_) / denom
    b = (u2 * u2 * a_ - u1 * u1 * b_) / denom
    if a >= 0.0:
        return float(x[i]), float(v[i])
    u_star = -b / (2.0 * a)
    u_star = min(max(u_star, u1), u2)
    return float(x[i] + u_star), float(v[i] + (b + a * u_star) * u_star)


def find_peaks(s: SampledSpectrum, min_prominence: float | None = None) -> list[PeakInfo]:
    """Local maxima with at least ``min_prominence`` prominence.

    Default prominence is 5% of the global value range (so a constant
    or monotone spectrum yields no peaks).  Positions and heights are
    parabolically refined; results are sorted by position.
    """
    if len(s) < 3:
        raise DataError(f"need at least 3 samples to find peaks, got {len(s)}")
    if min_prominence is None:
        vrange = float(np.max(s.values) - np.min(s.values))
        if vrange == 0.0:
            return []
        min_prominence = DEFAULT_PROMINENCE_FRACTION * vrange
    elif not (math.isfinite(min_prominence) and min_prominence > 0.0):
        raise ConfigError(f"min_prominence must be finite and > 0, got {min_prominence!r}")
    idx, _ = signal.find_peaks(s.values, prominence=min_prominence)
    peaks = []
    for i in idx:
        pos, height = _refine_parabolic(s.axis, s.values, int(i))
        peaks.append(PeakInfo(position=pos, height=height))
    return peaks


def _basin(v: np.ndarray, i: int) -> tuple[int, int]:
    """Indices of the enclosing minima around the peak at sample i."""
    lo = i
    while lo > 0 and v[lo - 1] <= v[lo]:
        lo -= 1
    hi = i
    while hi < v.size - 1 and v[hi + 1] <= v[hi]:
        hi += 1
    return lo, hi


def _cross(x: np.ndarray, v: np.ndarray, half: float, start: int, stop: int, step: int) -> float:
    """Half-level crossing scanning from ``start`` towards ``stop``.

    Walks downhill from the peak; the crossing is linearly interpolated
    between the first sample at or below ``half`` and its uphill
    neighbour.
    """
    j = start
    while j != stop:
        j += step
        if v[j] <= half:
            inner = j - step  # uphill neighbour, strictly above half
            t = (half - v[j]) / (v[inner] - v[j])
            return float(x[j] + t * (x[inner] - x[j]))
    raise DataError(
        "half-height crossing not found inside the peak's basin (unbounded peak)"
    )


def fwhm(s: SampledSpectrum, peak: PeakInfo) -> PeakInfo:
    """Full width at half maximum of ``peak``, measured in ``s``.

    Baseline is the lowest sample in the peak's basin (between its
    enclosing minima); the half level is baseline + (height -
    baseline)/2.  Raises a data error when a half crossing does not
    exist inside the basin.
    """
    x, v = s.axis, s.values
    if len(s) < 3:
        raise DataError("need at least 3 samples to measure a width")
    i = int(np.argmin(np.abs(x - peak.position)))
    if not (0 < i < x.size - 1):
        raise DataError(f"peak at {peak.position!r} sits on the spectrum edge")
    if not (v[i] >= v[i - 1] and v[i] >= v[i + 1]):
        raise DataError(f"no local maximum at {peak.position!r} in this spectrum")
    lo, hi = _basin(v, i)
    baseline = float(np.min(v[lo : hi + 1]))
    half = baseline + (peak.height - baseline) / 2.0
    left = _cross(x, v, half, i, lo, -1)
    right = _cross(x, v, half, i, hi, +1)
    if not (left < peak.position < right):
        raise DataError("half crossings do not straddle the peak position")
    return replace(peak, left_half=left, right_half=right, fwhm=right - left)


def peak_shift(
    reference: SampledSpectrum,
    sample: SampledSpectrum,
    window: tuple[float, float],
) -> float:
    """Shift of the dominant in-window peak, sample minus reference.

    Both spectra must contain at least one detected peak inside the
    (lo, hi) axis window; the highest one in each is compared.
    """
    lo, hi = window
    if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
        raise ConfigError(f"window must be (lo, hi) with lo < hi, got {window!r}")
    if reference.axis_kind != sample.axis_kind:
        raise DataError(
            f"axis kinds differ: reference {reference.axis_kind!r} "
            f"vs sample {sample.axis_kind!r}"
        )

    def dominant(spec: SampledSpectrum, name: str) -> PeakInfo:
        inside = [p for p in find_peaks(spec) if lo <= p.position <= hi]
        if not inside:
            raise DataError(f"no peak inside window [{lo}, {hi}] in the {name} spectrum")
        return max(inside, key=lambda p: p.height)

    return dominant(sample, "sample").position - dominant(reference, "reference").position
