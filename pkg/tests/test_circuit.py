"""Circuit element algebra and the cell forward model."""

import math

import numpy as np
import pytest

from eiskit.circuit import (
    CircuitParams,
    ImpedanceSpectrum,
    cell_impedance,
    element_impedance,
    nyquist_points,
    parallel,
    series,
    to_parallel_cg,
)
from eiskit.errors import ConfigError, DataError, NumericalError

from oracles import oracle_cell_impedance, oracle_parallel_cg

TWO_PI = 2.0 * math.pi


def test_element_resistor_is_real():
    assert element_impedance("resistor", 50.0, 1e3) == 50.0 + 0j


def test_element_capacitor_reactance():
    z = element_impedance("capacitor", 1e-6, 1e3)
    assert z.real == 0.0
    assert z.imag == pytest.approx(-1.0 / (TWO_PI * 1e3 * 1e-6), rel=1e-15)


def test_element_inductor_frozen_value():
    # 1 uH at 1 MHz
    z = element_impedance("inductor", 1e-6, 1e6)
    assert z == pytest.approx(6.283185307179586j, rel=1e-15)


def test_element_rejects_unknown_kind():
    with pytest.raises(ConfigError):
        element_impedance("memristor", 1.0, 1e3)


def test_element_rejects_nonpositive_value_and_frequency():
    with pytest.raises(ConfigError):
        element_impedance("resistor", 0.0, 1e3)
    with pytest.raises(ConfigError):
        element_impedance("capacitor", 1e-6, 0.0)


def test_series_adds():
    assert series(3 + 4j, 1 - 2j) == 4 + 2j


def test_parallel_frozen_value():
    # equal magnitudes at right angles: 100 || 100j = 50 + 50j exactly
    assert parallel(100.0 + 0j, 100j) == 50 + 50j


def test_parallel_matches_reciprocal_form():
    rng = np.random.default_rng(7)
    for _ in range(200):
        a = complex(*rng.uniform(0.1, 1e4, 2))
        b = complex(*rng.uniform(0.1, 1e4, 2))
        got = parallel(a, b)
        want = 1.0 / (1.0 / a + 1.0 / b)
        assert got == pytest.approx(want, rel=1e-12)


def test_parallel_zero_denominator_raises():
    with pytest.raises(NumericalError):
        parallel(1 + 1j, -1 - 1j)


def test_combinators_are_elementwise():
    a = np.array([1 + 1j, 2 + 2j])
    b = np.array([3 - 1j, 4 + 0j])
    assert np.allclose(series(a, b), a + b)
    assert np.allclose(parallel(a, b), a * b / (a + b))


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(r_sol=0.0, c_dl=1e-6, c_sol=1e-11),
        dict(r_sol=1e3, c_dl=0.0, c_sol=1e-11),
        dict(r_sol=1e3, c_dl=1e-6, c_sol=0.0),
        dict(r_sol=1e3, c_dl=1e-6, c_sol=1e-11, c_stray=-1e-12),
        dict(r_sol=1e3, c_dl=1e-6, c_sol=1e-11, l_stray=-1e-6),
        dict(r_sol=math.nan, c_dl=1e-6, c_sol=1e-11),
    ],
)
def test_params_validation(kwargs):
    with pytest.raises(ConfigError):
        CircuitParams(**kwargs)


def test_params_as_dict_order():
    p = CircuitParams(r_sol=1.0, c_dl=2.0, c_sol=3.0, c_stray=4.0, l_stray=5.0)
    assert list(p.as_dict()) == ["r_sol", "c_dl", "c_sol", "c_stray", "l_stray"]


def test_cell_impedance_frozen_values():
    p = CircuitParams(r_sol=1e5, c_dl=1e-6, c_sol=40e-12, c_stray=10e-12, l_stray=1e-6)
    assert cell_impedance(p, 1e3) == pytest.approx(
        99902.15123194117 - 3142.6875400471386j, rel=1e-13
    )
    assert cell_impedance(p, 5e6) == pytest.approx(
        5.003264857414139 - 675.903982050297j, rel=1e-13
    )


def test_cell_impedance_scalar_matches_vector():
    p = CircuitParams(r_sol=2e4, c_dl=5e-7, c_sol=30e-12, c_stray=5e-12, l_stray=2e-6)
    freqs = np.geomspace(10.0, 1e7, 25)
    zs = cell_impedance(p, freqs)
    for f, z in zip(freqs, zs):
        assert cell_impedance(p, float(f)) == z


def test_cell_impedance_against_highprecision_oracle():
    # random parameter draws spanning the physical decades, including the
    # structural zero branches
    rng = np.random.default_rng(2024)
    for trial in range(60):
        r_sol = 10.0 ** rng.uniform(2, 6)
        c_dl = 10.0 ** rng.uniform(-8, -5)
        c_sol = 10.0 ** rng.uniform(-12, -9)
        c_stray = 0.0 if trial % 3 == 0 else 10.0 ** rng.uniform(-13, -11)
        l_stray = 0.0 if trial % 4 == 0 else 10.0 ** rng.uniform(-8, -5)
        p = CircuitParams(r_sol=r_sol, c_dl=c_dl, c_sol=c_sol, c_stray=c_stray, l_stray=l_stray)
        for f in (1e2, 1.7e3, 9.9e4, 2.3e6):
            want = oracle_cell_impedance(r_sol, c_dl, c_sol, c_stray, l_stray, f)
            got = cell_impedance(p, f)
            assert abs(got - want) <= 1e-12 * abs(want), (trial, f)


def test_stray_capacitance_degeneracy():
    # only c_sol + c_stray/2 is observable: these two parameter sets give
    # the same spectrum
    freqs = np.geomspace(100.0, 5e6, 40)
    a = CircuitParams(r_sol=1e5, c_dl=1e-6, c_sol=40e-12, c_stray=10e-12, l_stray=0.0)
    b = CircuitParams(r_sol=1e5, c_dl=1e-6, c_sol=45e-12, c_stray=0.0, l_stray=0.0)
    za = cell_impedance(a, freqs)
    zb = cell_impedance(b, freqs)
    assert np.allclose(za, zb, rtol=1e-12, atol=0.0)


def test_low_frequency_impedance_approaches_double_layer():
    # at very low frequency the double-layer reactance dominates everything
    p = CircuitParams(r_sol=1e3, c_dl=1e-6, c_sol=1e-11, c_stray=0.0, l_stray=0.0)
    z = cell_impedance(p, 1e-3)
    expected = -1.0 / (math.pi * 1e-3 * 1e-6)
    assert z.imag == pytest.approx(expected, rel=1e-3)


def test_spectrum_validation():
    f = np.array([1.0, 10.0, 100.0])
    z = np.array([1 + 1j, 2 + 2j, 3 + 3j])
    s = ImpedanceSpectrum(f, z)
    assert len(s) == 3
    with pytest.raises(DataError):
        ImpedanceSpectrum(np.array([10.0, 1.0, 100.0]), z)
    with pytest.raises(DataError):
        ImpedanceSpectrum(f, z[:2])
    with pytest.raises(DataError):
        ImpedanceSpectrum(np.array([0.0, 1.0, 2.0]), z)
    with pytest.raises(DataError):
        ImpedanceSpectrum(f, np.array([1 + 1j, math.nan + 0j, 3 + 3j]))


def test_to_parallel_cg_frozen_value():
    c, g = to_parallel_cg(50 + 50j, 1e3)
    assert c == pytest.approx(-1.5915494309189533e-06, rel=1e-15)
    assert g == pytest.approx(0.01, rel=1e-15)


def test_to_parallel_cg_matches_oracle():
    rng = np.random.default_rng(5)
    for _ in range(100):
        z = complex(rng.uniform(1, 1e5), rng.uniform(-1e5, 1e5))
        f = 10.0 ** rng.uniform(1, 7)
        want_c, want_g = oracle_parallel_cg(z, f)
        got_c, got_g = to_parallel_cg(z, f)
        assert got_c == pytest.approx(want_c, rel=1e-12)
        assert got_g == pytest.approx(want_g, rel=1e-12)


def test_to_parallel_cg_roundtrip_capacitor():
    # a pure capacitor comes back as (C, 0)
    c_true = 33e-12
    f = 1e4
    z = element_impedance("capacitor", c_true, f)
    c, g = to_parallel_cg(z, f)
    assert c == pytest.approx(c_true, rel=1e-12)
    assert abs(g) < 1e-20


def test_nyquist_points_shape_and_sign():
    p = CircuitParams(r_sol=1e4, c_dl=1e-6, c_sol=20e-12)
    freqs = np.geomspace(100.0, 1e6, 11)
    s = ImpedanceSpectrum(freqs, cell_impedance(p, freqs))
    pts = nyquist_points(s)
    assert pts.shape == (11, 2)
    assert np.all(pts[:, 1] >= 0.0)
    assert np.allclose(pts[:, 0], s.z.real)
    assert np.allclose(pts[:, 1], np.abs(s.z.imag))
