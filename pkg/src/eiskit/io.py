"""Versioned text formats and atomic file writing.

Every file starts with a magic comment line naming its format and
version, followed by "# key: value" metadata comments, a CSV header
row, and CSV data rows.  Floats are written with repr so a write/read
cycle reproduces every value bit-exactly.  Parsers reject anything
malformed with a path:line diagnostic rather than guessing: unknown
versions, wrong columns, non-monotone axes, and locale decimals
("1,5") are all hard errors.

All writes go through a temp-file-then-rename so readers never observe
a partial file.
"""

from __future__ import annotations

import csv
import io as _stdio
import math
import os
import tempfile
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .circuit import ImpedanceSpectrum
from .classify import (
    AdulterantSignature,
    CalibrationPoint,
    CalibrationSeries,
    Category,
    MeasurementPoint,
    Trend,
    UnknownSeries,
)
from .constants import TOOL_VERSION
from .errors import DataError
from .spectral import AXIS_KINDS, SampledSpectrum

__all__ = [
    "read_spectrum",
    "write_spectrum",
    "read_calibration",
    "write_calibration",
    "read_unknown",
    "write_unknown",
    "read_map",
    "write_map",
    "read_xy",
    "write_xy",
    "write_polar_points",
    "read_manifest",
    "write_table",
    "write_report",
    "read_report",
    "atomic_write_text",
]

SPECTRUM_MAGIC = "eiskit spectrum v1"
CALIBRATION_MAGIC = "eiskit calibration v1"
UNKNOWN_MAGIC = "eiskit unknown v1"
MAP_MAGIC = "eiskit signature-map v1"
XY_MAGIC = "eiskit xy v1"
MANIFEST_MAGIC = "eiskit manifest v1"
TABLE_MAGIC = "eiskit table v1"
REPORT_MAGIC = "eiskit report v1"
POLAR_MAGIC = "eiskit polar-points v1"

_IMPEDANCE_HEADER = ["frequency_hz", "z_real_ohm", "z_imag_ohm"]
_OPTICAL_HEADER = ["axis", "absorbance"]
_CALIBRATION_HEADER = [
    "adulterant",
    "category",
    "concentration_wt",
    "z_real_ohm",
    "z_imag_ohm",
    "c_farad",
    "g_siemens",
]
_UNKNOWN_HEADER = ["role", "z_real_ohm", "z_imag_ohm", "c_farad", "g_siemens"]
_MAP_HEADER = [
    "adulterant",
    "category",
    "trend",
    "angle_lo_deg",
    "angle_hi_deg",
    "concentration_wt",
    "percent_dz",
]
_XY_HEADER = ["x", "y"]
_MANIFEST_HEADER = ["concentration_wt", "path"]


def _fmt(v: float) -> str:
    return repr(float(v))


def atomic_write_text(path: str | Path, text: str) -> None:
    """Write ``text`` to ``path`` via a same-directory temp file + rename."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def _split_csv(line: str, path: str, lineno: int) -> list[str]:
    try:
        return next(csv.reader(_stdio.StringIO(line)))
    except (csv.Error, StopIteration):
        raise DataError(f"{path}:{lineno}: malformed CSV line") from None


def _parse_float(tok: str, col: str, path: str, lineno: int) -> float:
    try:
        v = float(tok)
    except ValueError:
        raise DataError(f"{path}:{lineno}: column {col!r}: not a number: {tok!r}") from None
    if not math.isfinite(v):
        raise DataError(f"{path}:{lineno}: column {col!r}: non-finite value {tok!r}")
    return v


def _read_table(
    path: str | Path, magic: str, expected_header: Sequence[str]
) -> tuple[dict[str, str], list[tuple[int, list[str]]]]:
    """Parse a versioned CSV file into (metadata, [(lineno, fields), ...])."""
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as e:
        raise DataError(f"{path}: cannot read: {e.strerror or e}") from None
    spath = str(path)
    if not lines or lines[0].strip() != f"# {magic}":
        found = lines[0].strip() if lines else "<empty file>"
        raise DataError(f"{spath}:1: expected format line '# {magic}', found {found!r}")

    meta: dict[str, str] = {}
    header: list[str] | None = None
    rows: list[tuple[int, list[str]]] = []
    for lineno, raw in enumerate(lines[1:], start=2):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line.lstrip("#").strip()
            if header is None and ":" in body:
                key, _, value = body.partition(":")
                meta[key.strip()] = value.strip()
            continue
        fields = _split_csv(raw, spath, lineno)
        if header is None:
            header = [h.strip() for h in fields]
            if header != list(expected_header):
                raise DataError(
                    f"{spath}:{lineno}: expected columns {list(expected_header)}, got {header}"
                )
            continue
        if len(fields) != len(expected_header):
            raise DataError(
                f"{spath}:{lineno}: expected {len(expected_header)} columns, got {len(fields)}"
            )
        rows.append((lineno, fields))
    if header is None:
        raise DataError(f"{spath}: missing header row")
    return meta, rows


def _write_table(
    path: str | Path,
    magic: str,
    meta: dict[str, str] | None,
    header: Sequence[str],
    rows: Iterable[Sequence[str]],
) -> None:
    buf = _stdio.StringIO()
    buf.write(f"# {magic}\n")
    merged = {"tool_version": TOOL_VERSION}
    merged.update(meta or {})
    for key, value in merged.items():
        buf.write(f"# {key}: {value}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(list(header))
    for row in rows:
        writer.writerow(list(row))
    atomic_write_text(path, buf.getvalue())


def write_table(
    path: str | Path,
    header: Sequence[str],
    rows: Iterable[Sequence[float]],
    meta: dict[str, str] | None = None,
) -> None:
    """Write a generic numeric table (plot data export)."""
    _write_table(path, TABLE_MAGIC, meta, header, ((_fmt(v) for v in row) for row in rows))


# ---------------------------------------------------------------------------
# Spectrum files (impedance sweeps and optical spectra)


def write_spectrum(
    x: ImpedanceSpectrum | SampledSpectrum,
    path: str | Path,
    meta: dict[str, str] | None = None,
) -> None:
    """Write an impedance or optical spectrum; values round-trip bit-exactly."""
    extra = dict(meta or {})
    if isinstance(x, ImpedanceSpectrum):
        extra["kind"] = "impedance"
        header = _IMPEDANCE_HEADER
        rows = (
            (_fmt(f), _fmt(z.real), _fmt(z.imag)) for f, z in zip(x.frequencies, x.z)
        )
    elif isinstance(x, SampledSpectrum):
        extra["kind"] = "optical"
        extra["axis_kind"] = x.axis_kind
        header = _OPTICAL_HEADER
        rows = ((_fmt(a), _fmt(v)) for a, v in zip(x.axis, x.values))
    else:
        raise DataError(f"write_spectrum: unsupported value of type {type(x).__name__}")
    _write_table(path, SPECTRUM_MAGIC, extra, header, rows)


def read_spectrum(path: str | Path) -> ImpedanceSpectrum | SampledSpectrum:
    """Read a spectrum file; the kind is dispatched from its metadata."""
    spath = str(path)
    # Peek at the kind first so the right header can be demanded.
    meta_probe, _ = _read_table_any_header(path, SPECTRUM_MAGIC)
    kind = meta_probe.get("kind")
    if kind == "impedance":
        _, rows = _read_table(path, SPECTRUM_MAGIC, _IMPEDANCE_HEADER)
        freqs, zs = [], []
        prev_f = None
        prev_line = None
        for lineno, fields in rows:
            f = _parse_float(fields[0], "frequency_hz", spath, lineno)
            re = _parse_float(fields[1], "z_real_ohm", spath, lineno)
            im = _parse_float(fields[2], "z_imag_ohm", spath, lineno)
            if f <= 0.0:
                raise DataError(f"{spath}:{lineno}: frequency must be > 0, got {fields[0]}")
            if prev_f is not None and f <= prev_f:
                raise DataError(
                    f"{spath}:{lineno}: frequency {fields[0]} not above the value "
                    f"on line {prev_line} (rows must be strictly increasing)"
                )
            prev_f, prev_line = f, lineno
            freqs.append(f)
            zs.append(complex(re, im))
        if not freqs:
            raise DataError(f"{spath}: spectrum has no data rows")
        return ImpedanceSpectrum(np.array(freqs), np.array(zs))
    if kind == "optical":
        axis_kind = meta_probe.get("axis_kind")
        if axis_kind not in AXIS_KINDS:
            raise DataError(
                f"{spath}: axis_kind metadata must be one of {AXIS_KINDS}, got {axis_kind!r}"
            )
        _, rows = _read_table(path, SPECTRUM_MAGIC, _OPTICAL_HEADER)
        axis, values = [], []
        direction = 0.0
        prev_a = None
        prev_line = None
        for lineno, fields in rows:
            a = _parse_float(fields[0], "axis", spath, lineno)
            v = _parse_float(fields[1], "absorbance", spath, lineno)
            if prev_a is not None:
                step = a - prev_a
                if step == 0.0 or (direction != 0.0 and step * direction < 0.0):
                    raise DataError(
                        f"{spath}:{lineno}: axis value {fields[0]} breaks strict "
                        f"monotonicity (previous on line {prev_line})"
                    )
                direction = direction or step
            prev_a, prev_line = a, lineno
            axis.append(a)
            values.append(v)
        if not axis:
            raise DataError(f"{spath}: spectrum has no data rows")
        return SampledSpectrum(np.array(axis), np.array(values), axis_kind)
    raise DataError(f"{spath}: unknown spectrum kind {kind!r} (expected impedance or optical)")


def _read_table_any_header(
    path: str | Path, magic: str
) -> tuple[dict[str, str], None]:
    """Metadata-only parse (used to dispatch on the kind before full read)."""
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as e:
        raise DataError(f"{path}: cannot read: {e.strerror or e}") from None
    if not lines or lines[0].strip() != f"# {magic}":
        found = lines[0].strip() if lines else "<empty file>"
        raise DataError(f"{path}:1: expected format line '# {magic}', found {found!r}")
    meta: dict[str, str] = {}
    for raw in lines[1:]:
        line = raw.strip()
        if not line:
            continue
        if not line.startswith("#"):
            break
        body = line.lstrip("#").strip()
        if ":" in body:
            key, _, value = body.partition(":")
            meta[key.strip()] = value.strip()
    return meta, None


def _meta_f_ref(meta: dict[str, str], path: str | Path) -> float:
    if "f_ref_hz" not in meta:
        raise DataError(f"{path}: missing required metadata 'f_ref_hz'")
    try:
        f_ref = float(meta["f_ref_hz"])
    except ValueError:
        raise DataError(f"{path}: f_ref_hz is not a number: {meta['f_ref_hz']!r}") from None
    if not (math.isfinite(f_ref) and f_ref > 0.0):
        raise DataError(f"{path}: f_ref_hz must be finite and > 0")
    return f_ref


# ---------------------------------------------------------------------------
# Calibration series files


def write_calibration(
    series_set: Sequence[CalibrationSeries],
    f_ref: float,
    path: str | Path,
    meta: dict[str, str] | None = None,
) -> None:
    """Write calibration series; each series is its reference row
    (concentration 0) followed by its adulterated rows."""
    extra = {"f_ref_hz": _fmt(f_ref)}
    extra.update(meta or {})
    rows = []
    for s in series_set:
        r = s.reference
        rows.append(
            (s.adulterant, s.category.value, _fmt(0.0), _fmt(r.z.real), _fmt(r.z.imag), _fmt(r.c), _fmt(r.g))
        )
        for p in s.points:
            rows.append(
                (
                    s.adulterant,
                    s.category.value,
                    _fmt(p.concentration),
                    _fmt(p.z.real),
                    _fmt(p.z.imag),
                    _fmt(p.c),
                    _fmt(p.g),
                )
            )
    _write_table(path, CALIBRATION_MAGIC, extra, _CALIBRATION_HEADER, rows)


def _parse_category(tok: str, path: str, lineno: int) -> Category:
    try:
        return Category(tok)
    except ValueError:
        valid = [c.value for c in Category]
        raise DataError(f"{path}:{lineno}: unknown category {tok!r} (expected {valid})") from None


def read_calibration(path: str | Path) -> tuple[list[CalibrationSeries], float]:
    """Read calibration series and their reference frequency."""
    spath = str(path)
    meta, rows = _read_table(path, CALIBRATION_MAGIC, _CALIBRATION_HEADER)
    f_ref = _meta_f_ref(meta, spath)
    groups: dict[str, dict] = {}
    order: list[str] = []
    for lineno, fields in rows:
        name = fields[0]
        if not name:
            raise DataError(f"{spath}:{lineno}: empty adulterant name")
        category = _parse_category(fields[1], spath, lineno)
        conc = _parse_float(fields[2], "concentration_wt", spath, lineno)
        z = complex(
            _parse_float(fields[3], "z_real_ohm", spath, lineno),
            _parse_float(fields[4], "z_imag_ohm", spath, lineno),
        )
        c = _parse_float(fields[5], "c_farad", spath, lineno)
        g = _parse_float(fields[6], "g_siemens", spath, lineno)
        if name not in groups:
            groups[name] = {"category": category, "reference": None, "points": []}
            order.append(name)
        group = groups[name]
        if group["category"] is not category:
            raise DataError(f"{spath}:{lineno}: series {name!r} changes category mid-file")
        if conc == 0.0:
            if group["reference"] is not None:
                raise DataError(f"{spath}:{lineno}: series {name!r} has a second reference row")
            group["reference"] = MeasurementPoint(z=z, c=c, g=g)
        else:
            group["points"].append(CalibrationPoint(concentration=conc, z=z, c=c, g=g))
    series = []
    for name in order:
        group = groups[name]
        if group["reference"] is None:
            raise DataError(f"{spath}: series {name!r} has no concentration-0 reference row")
        series.append(
            CalibrationSeries(
                adulterant=name,
                category=group["category"],
                reference=group["reference"],
                points=tuple(group["points"]),
            )
        )
    if not series:
        raise DataError(f"{spath}: no calibration rows")
    return series, f_ref


# ---------------------------------------------------------------------------
# Unknown-sample files


def write_unknown(
    unknown: UnknownSeries,
    f_ref: float,
    path: str | Path,
    meta: dict[str, str] | None = None,
) -> None:
    extra = {"f_ref_hz": _fmt(f_ref)}
    extra.update(meta or {})
    rows = [
        (
            "reference",
            _fmt(unknown.reference.z.real),
            _fmt(unknown.reference.z.imag),
            _fmt(unknown.reference.c),
            _fmt(unknown.reference.g),
        )
    ]
    for p in unknown.samples:
        rows.append(("sample", _fmt(p.z.real), _fmt(p.z.imag), _fmt(p.c), _fmt(p.g)))
    _write_table(path, UNKNOWN_MAGIC, extra, _UNKNOWN_HEADER, rows)


def read_unknown(path: str | Path) -> tuple[UnknownSeries, float]:
    spath = str(path)
    meta, rows = _read_table(path, UNKNOWN_MAGIC, _UNKNOWN_HEADER)
    f_ref = _meta_f_ref(meta, spath)
    reference = None
    samples = []
    for lineno, fields in rows:
        role = fields[0]
        z = complex(
            _parse_float(fields[1], "z_real_ohm", spath, lineno),
            _parse_float(fields[2], "z_imag_ohm", spath, lineno),
        )
        c = _parse_float(fields[3], "c_farad", spath, lineno)
        g = _parse_float(fields[4], "g_siemens", spath, lineno)
        point = MeasurementPoint(z=z, c=c, g=g)
        if role == "reference":
            if reference is not None:
                raise DataError(f"{spath}:{lineno}: second reference row")
            reference = point
        elif role == "sample":
            samples.append(point)
        else:
            raise DataError(f"{spath}:{lineno}: unknown role {role!r} (expected reference or sample)")
    if reference is None:
        raise DataError(f"{spath}: missing reference row")
    if not samples:
        raise DataError(f"{spath}: no sample rows")
    return UnknownSeries(reference=reference, samples=tuple(samples)), f_ref


# ---------------------------------------------------------------------------
# Signature-map files


def write_map(
    signatures: Sequence[AdulterantSignature],
    f_ref: float,
    path: str | Path,
    meta: dict[str, str] | None = None,
) -> None:
    """Write a signature map, one row per radial-curve node."""
    extra = {"f_ref_hz": _fmt(f_ref)}
    extra.update(meta or {})
    rows = []
    for sig in signatures:
        lo, hi = sig.angle_range
        for conc, pct in zip(sig.concentrations, sig.percents):
            rows.append(
                (
                    sig.adulterant,
                    sig.category.value,
                    sig.trend.value,
                    _fmt(lo),
                    _fmt(hi),
                    _fmt(conc),
                    _fmt(pct),
                )
            )
    _write_table(path, MAP_MAGIC, extra, _MAP_HEADER, rows)


def read_map(path: str | Path) -> tuple[tuple[AdulterantSignature, ...], float]:
    spath = str(path)
    meta, rows = _read_table(path, MAP_MAGIC, _MAP_HEADER)
    f_ref = _meta_f_ref(meta, spath)
    groups: dict[str, dict] = {}
    order: list[str] = []
    for lineno, fields in rows:
        name = fields[0]
        category = _parse_category(fields[1], spath, lineno)
        try:
            trend = Trend(fields[2])
        except ValueError:
            valid = [t.value for t in Trend]
            raise DataError(
                f"{spath}:{lineno}: unknown trend {fields[2]!r} (expected {valid})"
            ) from None
        lo = _parse_float(fields[3], "angle_lo_deg", spath, lineno)
        hi = _parse_float(fields[4], "angle_hi_deg", spath, lineno)
        conc = _parse_float(fields[5], "concentration_wt", spath, lineno)
        pct = _parse_float(fields[6], "percent_dz", spath, lineno)
        if name not in groups:
            groups[name] = {
                "category": category,
                "trend": trend,
                "range": (lo, hi),
                "concs": [],
                "pcts": [],
            }
            order.append(name)
        group = groups[name]
        if (
            group["category"] is not category
            or group["trend"] is not trend
            or group["range"] != (lo, hi)
        ):
            raise DataError(f"{spath}:{lineno}: inconsistent signature fields for {name!r}")
        group["concs"].append(conc)
        group["pcts"].append(pct)
    signatures = []
    for name in order:
        group = groups[name]
        signatures.append(
            AdulterantSignature(
                adulterant=name,
                category=group["category"],
                trend=group["trend"],
                angle_range=group["range"],
                concentrations=tuple(group["concs"]),
                percents=tuple(group["pcts"]),
            )
        )
    if not signatures:
        raise DataError(f"{spath}: no signature rows")
    signatures.sort(key=lambda sig: (sig.angle_range[0], sig.adulterant))
    return tuple(signatures), f_ref


# ---------------------------------------------------------------------------
# Small tabular inputs (x/y datasets, sweep manifests) and reports


def write_polar_points(
    rows: Sequence[tuple[str, str, float, float, float]],
    f_ref: float,
    path: str | Path,
    meta: dict[str, str] | None = None,
) -> None:
    """Write polar plot points (adulterant, category, concentration,
    angle in degrees, radius in percent) for external plotting."""
    extra = {"f_ref_hz": _fmt(f_ref)}
    extra.update(meta or {})
    header = ["adulterant", "category", "concentration_wt", "angle_deg", "radius_percent"]
    out = [(name, cat, _fmt(conc), _fmt(angle), _fmt(radius)) for name, cat, conc, angle, radius in rows]
    _write_table(path, POLAR_MAGIC, extra, header, out)


def write_xy(
    xs: Sequence[float],
    ys: Sequence[float],
    path: str | Path,
    meta: dict[str, str] | None = None,
) -> None:
    if len(xs) != len(ys):
        raise DataError(f"write_xy: length mismatch {len(xs)} vs {len(ys)}")
    _write_table(path, XY_MAGIC, meta, _XY_HEADER, ((_fmt(x), _fmt(y)) for x, y in zip(xs, ys)))


def read_xy(path: str | Path) -> tuple[np.ndarray, np.ndarray]:
    spath = str(path)
    _, rows = _read_table(path, XY_MAGIC, _XY_HEADER)
    xs = [_parse_float(f[0], "x", spath, lineno) for lineno, f in rows]
    ys = [_parse_float(f[1], "y", spath, lineno) for lineno, f in rows]
    if not xs:
        raise DataError(f"{spath}: no data rows")
    return np.array(xs), np.array(ys)


def read_manifest(path: str | Path) -> list[tuple[float, Path]]:
    """Read a (concentration, spectrum path) manifest.

    Relative paths are resolved against the manifest's directory.
    """
    spath = str(path)
    base = Path(path).parent
    _, rows = _read_table(path, MANIFEST_MAGIC, _MANIFEST_HEADER)
    out = []
    for lineno, fields in rows:
        conc = _parse_float(fields[0], "concentration_wt", spath, lineno)
        p = Path(fields[1])
        if not fields[1]:
            raise DataError(f"{spath}:{lineno}: empty path")
        out.append((conc, p if p.is_absolute() else base / p))
    if not out:
        raise DataError(f"{spath}: no manifest rows")
    return out


def write_report(
    path: str | Path,
    fields: Sequence[tuple[str, str]],
    meta: dict[str, str] | None = None,
) -> None:
    """Write a structured-text report of ordered "key: value" lines."""
    buf = _stdio.StringIO()
    buf.write(f"# {REPORT_MAGIC}\n")
    merged = {"tool_version": TOOL_VERSION}
    merged.update(meta or {})
    for key, value in merged.items():
        buf.write(f"# {key}: {value}\n")
    for key, value in fields:
        buf.write(f"{key}: {value}\n")
    atomic_write_text(path, buf.getvalue())


def read_report(path: str | Path) -> tuple[dict[str, str], list[tuple[str, str]]]:
    """Read a report back as (metadata, ordered key/value fields)."""
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as e:
        raise DataError(f"{path}: cannot read: {e.strerror or e}") from None
    if not lines or lines[0].strip() != f"# {REPORT_MAGIC}":
        found = lines[0].strip() if lines else "<empty file>"
        raise DataError(f"{path}:1: expected format line '# {REPORT_MAGIC}', found {found!r}")
    meta: dict[str, str] = {}
    fields: list[tuple[str, str]] = []
    for lineno, raw in enumerate(lines[1:], start=2):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line.lstrip("#").strip()
            if ":" in body:
                key, _, value = body.partition(":")
                meta[key.strip()] = value.strip()
            continue
        if ":" not in line:
            raise DataError(f"{path}:{lineno}: expected 'key: value', got {line!r}")
        key, _, value = line.partition(":")
        fields.append((key.strip(), value.strip()))
    return meta, fields
