"""Command-line surface: reproducible batch runs of every analysis.

Configuration comes from an optional key = value file (# comments and
blank lines allowed) plus a small set of flags that override it; every
key is validated against the subcommand's schema and unknown keys are
rejected.  A digest of the effective configuration and the tool version
are embedded in every output file, and all randomness flows from the
single seed recorded there too, so a run is reproducible from its
outputs.

Exit codes: 0 ok, 2 configuration error, 3 data error, 4 numerical
failure.  Output files are written atomically into --out-dir and
nowhere else.
"""

from __future__ import annotations

import argparse
import hashlib
import math
import sys
from pathlib import Path

import numpy as np

from . import io as iomod
from .acquisition import RNG_ALGORITHM, SweepConfig, records_to_spectrum, simulate_sweep
from .circuit import CircuitParams, ImpedanceSpectrum, nyquist_points, to_parallel_cg
from .classify import DEFAULT_F_REF, build_signature_map, classify, polar_points
from .constants import VACUUM_PERMITTIVITY
from .dielectric import (
    DielectricSystem,
    complex_permittivity,
    effective_permittivity,
    solution_capacitance,
)
from .errors import ConfigError, DataError, NumericalError
from .fitting import (
    estimate_circuit_params,
    interval_envelope,
    linearity_regime_detect,
    ols_fit,
    prediction_interval,
    sensitivity_profile,
)
from .spectral import SampledSpectrum, find_peaks, fwhm, peak_shift

_REQUIRED = object()

_SENSITIVITY_PARAMETERS = ("capacitance", "conductance", "impedance")


# ---------------------------------------------------------------------------
# Config handling


def _parse_config_file(path: str) -> dict[str, str]:
    """Parse a key = value config file; # comments and blank lines ignored."""
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as e:
        raise ConfigError(f"{path}: cannot read config: {e.strerror or e}") from None
    out: dict[str, str] = {}
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.split(" #", 1)[0].strip()
        if not key:
            raise ConfigError(f"{path}:{lineno}: empty key")
        if key in out:
            raise ConfigError(f"{path}:{lineno}: duplicate key {key!r}")
        out[key] = value
    return out


def _conv_float(v, key: str) -> float:
    if isinstance(v, bool):
        raise ConfigError(f"config key {key!r}: expected a number, got {v!r}")
    if isinstance(v, (int, float)):
        f = float(v)
    else:
        try:
            f = float(str(v))
        except ValueError:
            raise ConfigError(f"config key {key!r}: not a number: {v!r}") from None
    if not math.isfinite(f):
        raise ConfigError(f"config key {key!r}: must be finite, got {v!r}")
    return f


def _conv_int(v, key: str) -> int:
    if isinstance(v, bool):
        raise ConfigError(f"config key {key!r}: expected an integer, got {v!r}")
    if isinstance(v, int):
        return v
    try:
        return int(str(v), 10)
    except ValueError:
        raise ConfigError(f"config key {key!r}: not an integer: {v!r}") from None


def _conv_str(v, key: str) -> str:
    s = str(v)
    if not s:
        raise ConfigError(f"config key {key!r}: empty value")
    return s


def _conv_bool(v, key: str) -> bool:
    if isinstance(v, bool):
        return v
    s = str(v).strip().lower()
    if s in ("true", "1", "yes", "on"):
        return True
    if s in ("false", "0", "no", "off"):
        return False
    raise ConfigError(f"config key {key!r}: not a boolean: {v!r}")


def _conv_names(v, key: str) -> tuple[str, ...]:
    if isinstance(v, (tuple, list)):
        return tuple(str(item) for item in v)
    parts = [p.strip() for p in str(v).split(",")]
    return tuple(p for p in parts if p)


def _resolve(
    args: argparse.Namespace,
    schema: dict[str, tuple],
    overrides: dict[str, object],
) -> dict[str, object]:
    """Merge defaults < config file < CLI flags under the schema."""
    file_cfg = _parse_config_file(args.config) if args.config else {}
    unknown = sorted(set(file_cfg) - set(schema))
    if unknown:
        raise ConfigError(f"unknown config keys: {unknown}")
    resolved: dict[str, object] = {}
    for key, (conv, default) in schema.items():
        ov = overrides.get(key)
        if ov is not None:
            resolved[key] = conv(ov, key)
        elif key in file_cfg:
            resolved[key] = conv(file_cfg[key], key)
        elif default is _REQUIRED:
            raise ConfigError(f"missing required config key {key!r}")
        else:
            resolved[key] = default
    return resolved


def _digest(subcommand: str, resolved: dict[str, object]) -> str:
    text = subcommand + "\n" + "\n".join(f"{k}={resolved[k]!r}" for k in sorted(resolved))
    return hashlib.sha256(text.encode("utf-8")).hexdigest()[:16]


def _out_dir(args: argparse.Namespace) -> Path:
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _read_impedance(path) -> ImpedanceSpectrum:
    s = iomod.read_spectrum(path)
    if not isinstance(s, ImpedanceSpectrum):
        raise DataError(f"{path}: expected an impedance spectrum, found an optical one")
    return s


def _read_optical(path) -> SampledSpectrum:
    s = iomod.read_spectrum(path)
    if not isinstance(s, SampledSpectrum):
        raise DataError(f"{path}: expected an optical spectrum, found an impedance one")
    return s


def _fmt(v: float) -> str:
    return repr(float(v))


# ---------------------------------------------------------------------------
# Subcommands

_DIELECTRIC_POP_KEYS = (
    "dielectric.n_d",
    "dielectric.p_d",
    "dielectric.n_i",
    "dielectric.p_i",
    "dielectric.n_i1",
    "dielectric.n_i2",
    "dielectric.n_w",
    "dielectric.p_w",
    "dielectric.temperature",
)

_SIMULATE_SCHEMA = {
    "circuit.r_sol": (_conv_float, _REQUIRED),
    "circuit.c_dl": (_conv_float, _REQUIRED),
    "circuit.c_sol": (_conv_float, None),
    "circuit.c_stray": (_conv_float, 0.0),
    "circuit.l_stray": (_conv_float, 0.0),
    "sweep.f_start": (_conv_float, 100.0),
    "sweep.f_stop": (_conv_float, 5e6),
    "sweep.points": (_conv_int, 201),
    "sweep.amplitude": (_conv_float, 1.0),
    "sweep.noise_rel": (_conv_float, 0.0),
    "seed": (_conv_int, 0),
    "f_ref": (_conv_float, DEFAULT_F_REF),
    **{k: (_conv_float, None) for k in _DIELECTRIC_POP_KEYS},
    "dielectric.sigma": (_conv_float, 0.0),
    "dielectric.area": (_conv_float, 1.0),
    "dielectric.gap": (_conv_float, 1.0),
}


def cmd_simulate(args: argparse.Namespace) -> int:
    resolved = _resolve(
        args, _SIMULATE_SCHEMA, {"seed": args.seed, "f_ref": args.f_ref}
    )
    digest = _digest("simulate", resolved)

    given_pop = [k for k in _DIELECTRIC_POP_KEYS if resolved[k] is not None]
    c_sol = resolved["circuit.c_sol"]
    if given_pop and c_sol is not None:
        raise ConfigError("give either circuit.c_sol or a dielectric block, not both")
    if given_pop:
        missing = sorted(set(_DIELECTRIC_POP_KEYS) - set(given_pop))
        if missing:
            raise ConfigError(f"incomplete dielectric block; missing {missing}")
        system = DielectricSystem(
            n_d=resolved["dielectric.n_d"],
            p_d=resolved["dielectric.p_d"],
            n_i=resolved["dielectric.n_i"],
            p_i=resolved["dielectric.p_i"],
            n_i1=resolved["dielectric.n_i1"],
            n_i2=resolved["dielectric.n_i2"],
            n_w=resolved["dielectric.n_w"],
            p_w=resolved["dielectric.p_w"],
            temperature=resolved["dielectric.temperature"],
            sigma=resolved["dielectric.sigma"],
            area=resolved["dielectric.area"],
            gap=resolved["dielectric.gap"],
        )
        eps_star = complex_permittivity(
            effective_permittivity(system) * VACUUM_PERMITTIVITY,
            system.sigma,
            resolved["f_ref"],
        )
        c_sol = solution_capacitance(eps_star, system.area, system.gap)
    elif c_sol is None:
        raise ConfigError("missing circuit.c_sol (or a dielectric block to derive it)")

    params = CircuitParams(
        r_sol=resolved["circuit.r_sol"],
        c_dl=resolved["circuit.c_dl"],
        c_sol=c_sol,
        c_stray=resolved["circuit.c_stray"],
        l_stray=resolved["circuit.l_stray"],
    )
    cfg = SweepConfig(
        f_start=resolved["sweep.f_start"],
        f_stop=resolved["sweep.f_stop"],
        points=resolved["sweep.points"],
        amplitude=resolved["sweep.amplitude"],
        noise_rel=resolved["sweep.noise_rel"],
        seed=resolved["seed"],
    )
    spectrum = records_to_spectrum(simulate_sweep(params, cfg))
    meta = {
        "config_digest": digest,
        "seed": str(cfg.seed),
        "rng": RNG_ALGORITHM,
        "r_sol": _fmt(params.r_sol),
        "c_dl": _fmt(params.c_dl),
        "c_sol": _fmt(params.c_sol),
        "c_stray": _fmt(params.c_stray),
        "l_stray": _fmt(params.l_stray),
        "f_start": _fmt(cfg.f_start),
        "f_stop": _fmt(cfg.f_stop),
        "points": str(cfg.points),
        "amplitude": _fmt(cfg.amplitude),
        "noise_rel": _fmt(cfg.noise_rel),
    }
    out = _out_dir(args) / "spectrum.csv"
    iomod.write_spectrum(spectrum, out, meta)
    print(f"wrote {out}")
    return 0


_FIT_SCHEMA = {
    "spectrum": (_conv_str, _REQUIRED),
    "guess.r_sol": (_conv_float, _REQUIRED),
    "guess.c_dl": (_conv_float, _REQUIRED),
    "guess.c_sol": (_conv_float, _REQUIRED),
    "guess.c_stray": (_conv_float, 0.0),
    "guess.l_stray": (_conv_float, 0.0),
    "fixed": (_conv_names, ()),
    "max_iterations": (_conv_int, 10_000),
}


def cmd_fit_circuit(args: argparse.Namespace) -> int:
    resolved = _resolve(args, _FIT_SCHEMA, {"spectrum": args.spectrum})
    digest = _digest("fit-circuit", resolved)
    s = _read_impedance(resolved["spectrum"])
    guess = CircuitParams(
        r_sol=resolved["guess.r_sol"],
        c_dl=resolved["guess.c_dl"],
        c_sol=resolved["guess.c_sol"],
        c_stray=resolved["guess.c_stray"],
        l_stray=resolved["guess.l_stray"],
    )
    fixed = frozenset(resolved["fixed"])
    params, residual = estimate_circuit_params(
        s, guess, fixed=fixed, max_iterations=resolved["max_iterations"]
    )
    fields = [(name, _fmt(value)) for name, value in params.as_dict().items()]
    fields += [
        ("residual", _fmt(residual)),
        ("points", str(len(s))),
        ("fixed", ",".join(sorted(fixed)) or "none"),
        ("spectrum", str(resolved["spectrum"])),
    ]
    out = _out_dir(args) / "fit_circuit.txt"
    iomod.write_report(out, fields, {"config_digest": digest, "subcommand": "fit-circuit"})
    print(f"wrote {out}")
    return 0


_CALIBRATE_SCHEMA = {
    "data": (_conv_names, _REQUIRED),
    "coverage_k": (_conv_float, 2.0),
    "level": (_conv_float, 0.95),
    "predict_at": (_conv_float, None),
    "r2_threshold": (_conv_float, 0.95),
}


def cmd_calibrate(args: argparse.Namespace) -> int:
    overrides: dict[str, object] = {"r2_threshold": args.r2_threshold}
    if args.data:
        overrides["data"] = tuple(args.data)
    resolved = _resolve(args, _CALIBRATE_SCHEMA, overrides)
    digest = _digest("calibrate", resolved)
    paths = resolved["data"]
    if not paths:
        raise ConfigError("no calibration datasets given")
    fields: list[tuple[str, str]] = [("datasets", str(len(paths)))]
    fits = []
    for i, p in enumerate(paths):
        xs, ys = iomod.read_xy(p)
        fit = ols_fit(xs, ys, coverage_k=resolved["coverage_k"])
        fits.append(fit)
        prefix = f"set{i}"
        fields += [
            (f"{prefix}.file", str(p)),
            (f"{prefix}.n", str(fit.n)),
            (f"{prefix}.line", fit.line_text()),
            (f"{prefix}.m", _fmt(fit.m)),
            (f"{prefix}.c", _fmt(fit.c)),
            (f"{prefix}.r2", _fmt(fit.r2)),
            (f"{prefix}.se_m", _fmt(fit.se_m)),
            (f"{prefix}.se_c", _fmt(fit.se_c)),
            (f"{prefix}.ci_m_lo", _fmt(fit.ci_m[0])),
            (f"{prefix}.ci_m_hi", _fmt(fit.ci_m[1])),
            (f"{prefix}.ci_c_lo", _fmt(fit.ci_c[0])),
            (f"{prefix}.ci_c_hi", _fmt(fit.ci_c[1])),
            (f"{prefix}.s_reg", _fmt(fit.s_reg)),
        ]
        if fit.n >= 4 and np.all(np.diff(xs) > 0.0):
            boundary, _, _ = linearity_regime_detect(xs, ys, resolved["r2_threshold"])
            if boundary is None:
                regime = "nonlinear"
            elif boundary == 0:
                regime = "linear"
            else:
                regime = f"linear_from_index_{boundary}"
        else:
            regime = "not_assessed"
        fields.append((f"{prefix}.regime", regime))
        if resolved["predict_at"] is not None:
            lo, hi = prediction_interval(
                fit, xs, ys, resolved["predict_at"], level=resolved["level"]
            )
            fields += [
                (f"{prefix}.prediction_at", _fmt(resolved["predict_at"])),
                (f"{prefix}.prediction_lo", _fmt(lo)),
                (f"{prefix}.prediction_hi", _fmt(hi)),
            ]
    if len(fits) > 1:
        (m_lo, m_hi), (c_lo, c_hi) = interval_envelope(fits)
        fields += [
            ("envelope.m_lo", _fmt(m_lo)),
            ("envelope.m_hi", _fmt(m_hi)),
            ("envelope.c_lo", _fmt(c_lo)),
            ("envelope.c_hi", _fmt(c_hi)),
        ]
    out = _out_dir(args) / "calibration.txt"
    iomod.write_report(out, fields, {"config_digest": digest, "subcommand": "calibrate"})
    print(f"wrote {out}")
    return 0


_SENSITIVITY_SCHEMA = {
    "manifest": (_conv_str, _REQUIRED),
    "parameter": (_conv_str, "capacitance"),
}


def cmd_sensitivity(args: argparse.Namespace) -> int:
    resolved = _resolve(
        args, _SENSITIVITY_SCHEMA, {"manifest": args.manifest, "parameter": args.parameter}
    )
    digest = _digest("sensitivity", resolved)
    parameter = resolved["parameter"]
    if parameter not in _SENSITIVITY_PARAMETERS:
        raise ConfigError(f"parameter must be one of {_SENSITIVITY_PARAMETERS}, got {parameter!r}")
    entries = sorted(iomod.read_manifest(resolved["manifest"]))
    concs = [conc for conc, _ in entries]
    if len(set(concs)) != len(concs):
        raise DataError("manifest has duplicate concentrations")
    spectra = [_read_impedance(p) for _, p in entries]
    freqs = spectra[0].frequencies
    for (_, p), s in zip(entries[1:], spectra[1:]):
        if not np.array_equal(s.frequencies, freqs):
            raise DataError(f"{p}: frequency grid differs from the first spectrum's")
    columns = []
    for s in spectra:
        if parameter == "impedance":
            columns.append(np.abs(s.z))
        else:
            cg = [to_parallel_cg(z, f) for z, f in zip(s.z, s.frequencies)]
            idx = 0 if parameter == "capacitance" else 1
            columns.append(np.array([pair[idx] for pair in cg]))
    values = np.column_stack(columns)
    results = sensitivity_profile(freqs, concs, values)
    out = _out_dir(args) / "sensitivity.csv"
    iomod.write_table(
        out,
        ["frequency_hz", "beta"],
        ((r.frequency, r.beta) for r in results),
        {"config_digest": digest, "parameter": parameter, "series": str(len(concs))},
    )
    print(f"wrote {out}")
    return 0


_NYQUIST_SCHEMA = {"spectrum": (_conv_str, _REQUIRED)}


def cmd_nyquist(args: argparse.Namespace) -> int:
    resolved = _resolve(args, _NYQUIST_SCHEMA, {"spectrum": args.spectrum})
    digest = _digest("nyquist", resolved)
    s = _read_impedance(resolved["spectrum"])
    pts = nyquist_points(s)
    out = _out_dir(args) / "nyquist.csv"
    iomod.write_table(
        out,
        ["frequency_hz", "re_ohm", "abs_im_ohm"],
        ((f, re, im) for f, (re, im) in zip(s.frequencies, pts)),
        {"config_digest": digest},
    )
    print(f"wrote {out}")
    return 0


_FWHM_SCHEMA = {
    "spectrum": (_conv_str, _REQUIRED),
    "min_prominence": (_conv_float, None),
}


def cmd_fwhm(args: argparse.Namespace) -> int:
    resolved = _resolve(
        args, _FWHM_SCHEMA, {"spectrum": args.spectrum, "min_prominence": args.min_prominence}
    )
    digest = _digest("fwhm", resolved)
    s = _read_optical(resolved["spectrum"])
    peaks = find_peaks(s, resolved["min_prominence"])
    fields: list[tuple[str, str]] = [("peaks", str(len(peaks)))]
    for i, peak in enumerate(peaks):
        prefix = f"peak{i}"
        fields += [
            (f"{prefix}.position", _fmt(peak.position)),
            (f"{prefix}.height", _fmt(peak.height)),
        ]
        try:
            w = fwhm(s, peak)
        except DataError:
            fields.append((f"{prefix}.fwhm", "unbounded"))
            continue
        fields += [
            (f"{prefix}.left_half", _fmt(w.left_half)),
            (f"{prefix}.right_half", _fmt(w.right_half)),
            (f"{prefix}.fwhm", _fmt(w.fwhm)),
        ]
    out = _out_dir(args) / "fwhm.txt"
    iomod.write_report(out, fields, {"config_digest": digest, "subcommand": "fwhm"})
    print(f"wrote {out}")
    return 0


_PEAK_SHIFT_SCHEMA = {
    "reference": (_conv_str, _REQUIRED),
    "sample": (_conv_str, _REQUIRED),
    "window_lo": (_conv_float, _REQUIRED),
    "window_hi": (_conv_float, _REQUIRED),
}


def cmd_peak_shift(args: argparse.Namespace) -> int:
    resolved = _resolve(
        args,
        _PEAK_SHIFT_SCHEMA,
        {
            "reference": args.reference,
            "sample": args.sample,
            "window_lo": args.window_lo,
            "window_hi": args.window_hi,
        },
    )
    digest = _digest("peak-shift", resolved)
    ref = _read_optical(resolved["reference"])
    sam = _read_optical(resolved["sample"])
    shift = peak_shift(ref, sam, (resolved["window_lo"], resolved["window_hi"]))
    fields = [
        ("shift", _fmt(shift)),
        ("window_lo", _fmt(resolved["window_lo"])),
        ("window_hi", _fmt(resolved["window_hi"])),
        ("reference", str(resolved["reference"])),
        ("sample", str(resolved["sample"])),
    ]
    out = _out_dir(args) / "peak_shift.txt"
    iomod.write_report(out, fields, {"config_digest": digest, "subcommand": "peak-shift"})
    print(f"wrote {out}")
    return 0


_MAP_BUILD_SCHEMA = {
    "calibration": (_conv_str, _REQUIRED),
    "f_ref": (_conv_float, None),
    "double_angles": (_conv_bool, False),
}


def cmd_map_build(args: argparse.Namespace) -> int:
    resolved = _resolve(
        args,
        _MAP_BUILD_SCHEMA,
        {
            "calibration": args.calibration,
            "f_ref": args.f_ref,
            "double_angles": args.double_angles or None,
        },
    )
    digest = _digest("map-build", resolved)
    series, f_file = iomod.read_calibration(resolved["calibration"])
    f_ref = resolved["f_ref"]
    if f_ref is not None and not math.isclose(f_ref, f_file, rel_tol=1e-9):
        # Angles only make sense at the frequency the data was taken at.
        raise ConfigError(
            f"--f-ref {f_ref:g} contradicts the calibration file's f_ref_hz {f_file:g}"
        )
    f_ref = f_file
    signatures = build_signature_map(series, f_ref)
    out_dir = _out_dir(args)
    map_path = out_dir / "map.csv"
    iomod.write_map(signatures, f_ref, map_path, {"config_digest": digest})
    polar_path = out_dir / "polar_points.csv"
    iomod.write_polar_points(
        polar_points(series, f_ref, doubled=resolved["double_angles"]),
        f_ref,
        polar_path,
        {"config_digest": digest, "double_angles": str(resolved["double_angles"]).lower()},
    )
    print(f"wrote {map_path}")
    print(f"wrote {polar_path}")
    return 0


_CLASSIFY_SCHEMA = {
    "map": (_conv_str, _REQUIRED),
    "unknown": (_conv_str, _REQUIRED),
}


def cmd_classify(args: argparse.Namespace) -> int:
    resolved = _resolve(args, _CLASSIFY_SCHEMA, {"map": args.map, "unknown": args.unknown})
    digest = _digest("classify", resolved)
    signatures, f_map = iomod.read_map(resolved["map"])
    unknown, f_unknown = iomod.read_unknown(resolved["unknown"])
    if not math.isclose(f_map, f_unknown, rel_tol=1e-9):
        raise DataError(
            f"map ({f_map:g} Hz) and unknown ({f_unknown:g} Hz) were measured at "
            "different reference frequencies"
        )
    result = classify(unknown, signatures, f_map)
    if result.adulterant is None:
        adulterant = "none"
    elif isinstance(result.adulterant, frozenset):
        adulterant = "ambiguous: " + ", ".join(sorted(result.adulterant))
    else:
        adulterant = result.adulterant
    d = result.diagnostics
    fields = [
        ("adulterant", adulterant),
        ("category", result.category.value),
        (
            "concentration",
            _fmt(result.concentration_estimate)
            if result.concentration_estimate is not None
            else "none",
        ),
        ("angle_deg", _fmt(d.angle_deg)),
        ("percent_change", _fmt(d.percent_change)),
        ("trend", d.trend.value),
        ("extrapolated", str(d.extrapolated).lower()),
        ("candidates", ", ".join(d.candidates) or "none"),
    ]
    out = _out_dir(args) / "classification.txt"
    iomod.write_report(out, fields, {"config_digest": digest, "subcommand": "classify"})
    print(f"adulterant: {adulterant}")
    print(f"wrote {out}")
    return 0


# ---------------------------------------------------------------------------
# Parser


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="key = value configuration file")
    p.add_argument("--out-dir", default=".", help="directory for output files (default: .)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="eiskit",
        description="Impedance-spectroscopy sensing toolkit: simulation, fitting, "
        "calibration, spectral analysis, and adulterant classification.",
    )
    sub = parser.add_subparsers(dest="subcommand", metavar="subcommand")

    p = sub.add_parser("simulate", help="simulate a frequency sweep of the cell model")
    _add_common(p)
    p.add_argument("--seed", type=int, help="noise RNG seed (recorded in the output)")
    p.add_argument("--f-ref", type=float, help="frequency for the dielectric loss term, Hz")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("fit-circuit", help="fit circuit parameters to a measured spectrum")
    _add_common(p)
    p.add_argument("--spectrum", help="impedance spectrum file")
    p.set_defaults(func=cmd_fit_circuit)

    p = sub.add_parser("calibrate", help="least-squares calibration line(s) with intervals")
    _add_common(p)
    p.add_argument(
        "--data", action="append", default=[], help="x/y dataset file (repeatable)"
    )
    p.add_argument("--r2-threshold", type=float, help="linear-regime detection threshold")
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("sensitivity", help="per-frequency sensitivity across a sweep series")
    _add_common(p)
    p.add_argument("--manifest", help="manifest of (concentration, spectrum file) rows")
    p.add_argument(
        "--parameter",
        choices=_SENSITIVITY_PARAMETERS,
        help="response to analyze (default: capacitance)",
    )
    p.set_defaults(func=cmd_sensitivity)

    p = sub.add_parser("nyquist", help="export Nyquist plot data from a spectrum")
    _add_common(p)
    p.add_argument("--spectrum", help="impedance spectrum file")
    p.set_defaults(func=cmd_nyquist)

    p = sub.add_parser("fwhm", help="peak widths of an optical spectrum")
    _add_common(p)
    p.add_argument("--spectrum", help="optical spectrum file")
    p.add_argument("--min-prominence", type=float, help="peak prominence threshold")
    p.set_defaults(func=cmd_fwhm)

    p = sub.add_parser("peak-shift", help="dominant peak shift between two spectra")
    _add_common(p)
    p.add_argument("--reference", help="reference optical spectrum")
    p.add_argument("--sample", help="sample optical spectrum")
    p.add_argument("--window-lo", type=float, help="window lower bound (axis units)")
    p.add_argument("--window-hi", type=float, help="window upper bound (axis units)")
    p.set_defaults(func=cmd_peak_shift)

    p = sub.add_parser("map-build", help="build a signature map from calibration series")
    _add_common(p)
    p.add_argument("--calibration", help="calibration series file")
    p.add_argument("--f-ref", type=float, help="reference frequency, Hz (must match the file)")
    p.add_argument(
        "--double-angles",
        action="store_true",
        default=False,
        help="double angles in the polar export (presentation only)",
    )
    p.set_defaults(func=cmd_map_build)

    p = sub.add_parser("classify", help="classify an unknown sample against a map")
    _add_common(p)
    p.add_argument("--map", help="signature map file")
    p.add_argument("--unknown", help="unknown sample file")
    p.set_defaults(func=cmd_classify)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not hasattr(args, "func"):
        parser.print_help(sys.stderr)
        return 2
    try:
        return args.func(args)
    except ConfigError as e:
        print(f"eiskit: config error: {e}", file=sys.stderr)
        return e.exit_code
    except DataError as e:
        print(f"eiskit: data error: {e}", file=sys.stderr)
        return e.exit_code
    except NumericalError as e:
        print(f"eiskit: numerical failure: {e}", file=sys.stderr)
        return e.exit_code


if __name__ == "__main__":
    sys.exit(main())
