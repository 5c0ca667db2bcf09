"""Polar signature map construction and the three-step identification."""

import math

import pytest

from eiskit.classify import (
    AdulterantSignature,
    CalibrationPoint,
    CalibrationSeries,
    Category,
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
from eiskit.errors import ConfigError, DataError, UnclassifiableError

F_REF = 1000.0
TWO_PI = 2.0 * math.pi


def _cg_at_angle(angle_deg, f=F_REF):
    """(c, g) pair whose admittance phase is exactly the given angle."""
    rad = math.radians(angle_deg)
    return math.sin(rad) / (TWO_PI * f), math.cos(rad)


def _series(name, category, angles_deg, magnitudes, concs=None, ref_mag=100.0):
    """Calibration series with prescribed per-point angles and |z| values."""
    concs = concs if concs is not None else [float(i + 1) for i in range(len(angles_deg))]
    points = []
    for conc, ang, mag in zip(concs, angles_deg, magnitudes):
        c, g = _cg_at_angle(ang)
        points.append(CalibrationPoint(concentration=conc, z=complex(mag, 0.0), c=c, g=g))
    c0, g0 = _cg_at_angle(sum(angles_deg) / len(angles_deg))
    return CalibrationSeries(
        adulterant=name,
        category=category,
        reference=MeasurementPoint(z=complex(ref_mag, 0.0), c=c0, g=g0),
        points=tuple(points),
    )


# ---------------------------------------------------------------------------
# percent change


def test_percent_change_trivial():
    assert percent_impedance_change(100.0, 110.0) == pytest.approx(10.0, abs=1e-15)
    assert percent_impedance_change(100.0, 100.0) == 0.0
    assert percent_impedance_change(100.0, 90.0) == pytest.approx(-10.0, abs=1e-15)


def test_percent_change_honey_fixture():
    # pure 66.94 kOhm rising to 72.51 kOhm fully adulterated
    got = percent_impedance_change(66.94e3, 72.51e3)
    want = 100.0 * (72.51e3 - 66.94e3) / 66.94e3
    assert abs(got - want) <= 1e-12 * abs(want)
    assert got == pytest.approx(8.320884374066328, rel=1e-13)


def test_percent_change_accepts_complex():
    assert percent_impedance_change(3 + 4j, 10.0) == pytest.approx(100.0, rel=1e-12)


def test_percent_change_inverse_relation():
    # swapping the +x% construction into its reciprocal reference
    for x in (10.0, 8.32, 250.0, -40.0):
        ref = 100.0
        sample = ref * (1.0 + x / 100.0)
        back = percent_impedance_change(sample, ref)
        want = 100.0 * (1.0 / (1.0 + x / 100.0) - 1.0)
        assert abs(back - want) <= 1e-12 * max(1.0, abs(want))


def test_percent_change_zero_reference():
    with pytest.raises(DataError):
        percent_impedance_change(0.0, 10.0)


# ---------------------------------------------------------------------------
# phase angle


def test_phase_angle_anchors_exact():
    assert phase_angle(0.0, 2.5, F_REF) == 0.0
    assert phase_angle(3.3e-9, 0.0, F_REF) == 90.0
    # 2*pi*f*c == g: build g from the product so both sides are the
    # same float
    c = 4.7e-8
    g = TWO_PI * F_REF * c
    assert phase_angle(c, g, F_REF) == 45.0


def test_phase_angle_range():
    for ang in (5.0, 30.0, 60.0, 85.0):
        c, g = _cg_at_angle(ang)
        assert phase_angle(c, g, F_REF) == pytest.approx(ang, abs=1e-12)
        assert 0.0 <= phase_angle(c, g, F_REF) <= 90.0


def test_phase_angle_scale_invariance():
    c, g = 3.7e-9, 2.6e-4
    base = phase_angle(c, g, F_REF)
    # power-of-two scaling is exact in binary floating point
    for s in (2.0, 0.25, 1024.0):
        assert phase_angle(s * c, s * g, F_REF) == base
    for s in (3.0, 17.3, 1e-5):
        assert phase_angle(s * c, s * g, F_REF) == pytest.approx(base, rel=1e-12)


def test_phase_angle_validation():
    with pytest.raises(DataError):
        phase_angle(0.0, 0.0, F_REF)
    with pytest.raises(ConfigError):
        phase_angle(1e-9, 1e-4, 0.0)


# ---------------------------------------------------------------------------
# trend


def test_trend_increasing_decreasing():
    up = _series("up", Category.POLAR, [40.0, 42.0, 44.0], [105.0, 110.0, 116.0])
    down = _series("down", Category.NONPOLAR_IONIC, [40.0, 42.0, 44.0], [95.0, 89.0, 83.0])
    assert trend_direction(up) is Trend.Z_INCREASING
    assert trend_direction(down) is Trend.Z_DECREASING


def test_trend_flat_within_noise_floor():
    flat = _series("flat", Category.POLAR, [40.0, 42.0, 44.0], [100.1, 99.95, 100.05])
    assert trend_direction(flat) is Trend.NON_MONOTONE


def test_trend_uses_reference_point():
    # points alone would look flat; the reference pins the rise from zero
    s = _series("ref-anchored", Category.POLAR, [40.0, 42.0], [150.0, 151.0], ref_mag=100.0)
    assert trend_direction(s) is Trend.Z_INCREASING


# ---------------------------------------------------------------------------
# map construction


def test_map_single_series_degenerate_range():
    s = _series("solo", Category.POLAR, [37.0, 37.0], [110.0, 120.0])
    (sig,) = build_signature_map([s], F_REF)
    lo, hi = sig.angle_range
    assert lo == pytest.approx(hi, abs=1e-12)
    assert sig.trend is Trend.Z_INCREASING
    assert sig.concentrations[0] == 0.0
    assert sig.percents[0] == 0.0


def test_map_sorted_by_angle_lo_then_name():
    a = _series("beta", Category.POLAR, [50.0, 55.0], [110.0, 120.0])
    b = _series("alpha", Category.POLAR, [20.0, 25.0], [110.0, 120.0])
    c = _series("gamma", Category.POLAR, [20.0, 28.0], [110.0, 120.0])
    sigs = build_signature_map([a, b, c], F_REF)
    assert [s.adulterant for s in sigs] == ["alpha", "gamma", "beta"]


def test_map_rejects_duplicate_names():
    a = _series("dup", Category.POLAR, [20.0, 25.0], [110.0, 120.0])
    b = _series("dup", Category.POLAR, [50.0, 55.0], [110.0, 120.0])
    with pytest.raises(DataError, match="duplicate"):
        build_signature_map([a, b], F_REF)


def test_map_rejects_nonmonotone_radial_naming_series():
    bad = _series("zigzag", Category.POLAR, [20.0, 25.0, 30.0], [110.0, 150.0, 120.0])
    with pytest.raises(DataError, match="zigzag"):
        build_signature_map([bad], F_REF)


def test_map_rejects_flat_series_naming_it():
    flat = _series("plateau", Category.POLAR, [20.0, 25.0], [100.02, 99.99])
    with pytest.raises(DataError, match="plateau"):
        build_signature_map([flat], F_REF)


def test_map_angle_range_spans_points_only():
    # reference angle (62 deg here) must not widen the range
    s = CalibrationSeries(
        adulterant="narrow",
        category=Category.POLAR,
        reference=MeasurementPoint(z=100.0 + 0j, c=_cg_at_angle(62.0)[0], g=_cg_at_angle(62.0)[1]),
        points=(
            CalibrationPoint(1.0, 110.0 + 0j, *_cg_at_angle(30.0)),
            CalibrationPoint(2.0, 120.0 + 0j, *_cg_at_angle(34.0)),
        ),
    )
    (sig,) = build_signature_map([s], F_REF)
    assert sig.angle_range == pytest.approx((30.0, 34.0), abs=1e-12)


def test_invert_radial_clamps_and_flags():
    sig = AdulterantSignature(
        adulterant="x",
        category=Category.POLAR,
        trend=Trend.Z_INCREASING,
        angle_range=(10.0, 20.0),
        concentrations=(0.0, 1.0, 2.0),
        percents=(0.0, 5.0, 12.0),
    )
    conc, ex = sig.invert_radial(5.0)
    assert conc == pytest.approx(1.0, abs=1e-12) and not ex
    conc, ex = sig.invert_radial(8.5)
    assert conc == pytest.approx(1.5, abs=1e-12) and not ex
    conc, ex = sig.invert_radial(20.0)
    assert conc == 2.0 and ex
    conc, ex = sig.invert_radial(-1.0)
    assert conc == 0.0 and ex


def test_invert_radial_decreasing_curve():
    sig = AdulterantSignature(
        adulterant="y",
        category=Category.NONPOLAR_IONIC,
        trend=Trend.Z_DECREASING,
        angle_range=(10.0, 20.0),
        concentrations=(0.0, 1.0, 2.0),
        percents=(0.0, -4.0, -10.0),
    )
    conc, ex = sig.invert_radial(-7.0)
    assert conc == pytest.approx(1.5, abs=1e-12) and not ex


# ---------------------------------------------------------------------------
# classification


def _unknown_from(series, index):
    p = series.points[index]
    return UnknownSeries(
        reference=series.reference,
        samples=(MeasurementPoint(z=p.z, c=p.c, g=p.g),),
    )


def test_classify_self_consistency():
    series = [
        _series("glucose", Category.POLAR, [15.0, 17.0, 19.0], [108.0, 117.0, 128.0]),
        _series("urea", Category.POLAR, [35.0, 37.0, 39.0], [105.0, 112.0, 121.0]),
        _series("salt", Category.NONPOLAR_IONIC, [55.0, 57.0, 59.0], [92.0, 83.0, 72.0]),
    ]
    sigs = build_signature_map(series, F_REF)
    for s in series:
        for i, p in enumerate(s.points):
            result = classify(_unknown_from(s, i), sigs, F_REF)
            assert result.adulterant == s.adulterant, (s.adulterant, i)
            assert result.concentration_estimate == pytest.approx(p.concentration, abs=1e-9)
            assert result.category is s.category


def test_classify_midway_interpolation():
    s = _series("glucose", Category.POLAR, [15.0, 17.0], [110.0, 130.0], concs=[1.0, 3.0])
    sigs = build_signature_map([s], F_REF)
    # sample midway between the two calibration points
    c, g = _cg_at_angle(16.0)
    unknown = UnknownSeries(
        reference=s.reference,
        samples=(MeasurementPoint(z=120.0 + 0j, c=c, g=g),),
    )
    result = classify(unknown, sigs, F_REF)
    assert result.adulterant == "glucose"
    assert result.concentration_estimate == pytest.approx(2.0, abs=1e-9)
    assert not result.diagnostics.extrapolated


def test_classify_overlapping_ranges_resolved_by_trend():
    up = _series("polar-one", Category.POLAR, [30.0, 40.0], [110.0, 125.0])
    down = _series("ionic-one", Category.NONPOLAR_IONIC, [30.0, 40.0], [90.0, 75.0])
    sigs = build_signature_map([up, down], F_REF)
    c, g = _cg_at_angle(35.0)
    rising = UnknownSeries(
        reference=MeasurementPoint(z=100.0 + 0j, c=c, g=g),
        samples=(MeasurementPoint(z=115.0 + 0j, c=c, g=g),),
    )
    result = classify(rising, sigs, F_REF)
    assert result.adulterant == "polar-one"
    # both signatures' ranges contained the angle
    assert set(result.diagnostics.candidates) == {"polar-one", "ionic-one"}
    falling = UnknownSeries(
        reference=MeasurementPoint(z=100.0 + 0j, c=c, g=g),
        samples=(MeasurementPoint(z=82.0 + 0j, c=c, g=g),),
    )
    assert classify(falling, sigs, F_REF).adulterant == "ionic-one"


def test_classify_ambiguous_same_trend_overlap():
    a = _series("amb-a", Category.POLAR, [30.0, 40.0], [110.0, 125.0])
    b = _series("amb-b", Category.POLAR, [32.0, 42.0], [112.0, 130.0])
    sigs = build_signature_map([a, b], F_REF)
    c, g = _cg_at_angle(36.0)
    unknown = UnknownSeries(
        reference=MeasurementPoint(z=100.0 + 0j, c=c, g=g),
        samples=(MeasurementPoint(z=118.0 + 0j, c=c, g=g),),
    )
    result = classify(unknown, sigs, F_REF)
    assert result.adulterant == frozenset({"amb-a", "amb-b"})
    assert result.concentration_estimate is None


def test_classify_no_match_returns_none():
    s = _series("lonely", Category.POLAR, [10.0, 12.0], [110.0, 120.0])
    sigs = build_signature_map([s], F_REF)
    c, g = _cg_at_angle(80.0)
    unknown = UnknownSeries(
        reference=MeasurementPoint(z=100.0 + 0j, c=c, g=g),
        samples=(MeasurementPoint(z=115.0 + 0j, c=c, g=g),),
    )
    result = classify(unknown, sigs, F_REF)
    assert result.adulterant is None
    assert result.concentration_estimate is None
    assert result.diagnostics.candidates == ()


def test_classify_flat_unknown_unclassifiable():
    s = _series("whatever", Category.POLAR, [10.0, 12.0], [110.0, 120.0])
    sigs = build_signature_map([s], F_REF)
    c, g = _cg_at_angle(11.0)
    unknown = UnknownSeries(
        reference=MeasurementPoint(z=100.0 + 0j, c=c, g=g),
        samples=(MeasurementPoint(z=100.5 + 0j, c=c, g=g),),
    )
    with pytest.raises(UnclassifiableError):
        classify(unknown, sigs, F_REF)


def test_classify_extrapolation_flagged():
    s = _series("ex", Category.POLAR, [10.0, 12.0], [110.0, 120.0], concs=[1.0, 2.0])
    sigs = build_signature_map([s], F_REF)
    c, g = _cg_at_angle(11.0)
    unknown = UnknownSeries(
        reference=MeasurementPoint(z=100.0 + 0j, c=c, g=g),
        samples=(MeasurementPoint(z=150.0 + 0j, c=c, g=g),),
    )
    result = classify(unknown, sigs, F_REF)
    assert result.adulterant == "ex"
    assert result.diagnostics.extrapolated
    assert result.concentration_estimate == 2.0  # clamped to the last node


def test_classify_empty_map_rejected():
    c, g = _cg_at_angle(20.0)
    unknown = UnknownSeries(
        reference=MeasurementPoint(z=100.0 + 0j, c=c, g=g),
        samples=(MeasurementPoint(z=120.0 + 0j, c=c, g=g),),
    )
    with pytest.raises(DataError):
        classify(unknown, (), F_REF)


def test_polar_points_doubling_is_display_only():
    s = _series("p", Category.POLAR, [20.0, 30.0], [110.0, 120.0])
    plain = polar_points([s], F_REF)
    doubled = polar_points([s], F_REF, doubled=True)
    for (_, _, _, ang1, r1), (_, _, _, ang2, r2) in zip(plain, doubled):
        assert ang2 == pytest.approx(2.0 * ang1, rel=1e-15)
        assert r1 == r2
    # rows carry (name, category, conc, angle, percent)
    assert plain[0][0] == "p"
    assert plain[0][1] == "polar"
    assert plain[0][2] == 1.0
