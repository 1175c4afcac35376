import math

import numpy as np
import pytest
from scipy import integrate

from sensorphonon import spectra
from sensorphonon.errors import AxisMismatch, DuplicateSensorIndex, PeaksNotFound
from sensorphonon.liouvillian import PhononMode, build_liouvillian, steady_state
from sensorphonon.model import EmitterParams, SensorParams, build_composite
from sensorphonon.spectra import (
    SpectrumResult,
    extract_sidepeak_separation,
    g2_normalize,
    g2_points,
    normal_ordered_moment,
    qrt_reference_spectrum,
    single_photon_spectrum,
    two_photon_spectrum,
)

from conftest import FIG2_BATH

# a fast, well-separated Mollow regime
FAST = EmitterParams(rabi=0.5, gamma=0.05)
FAST_SENSOR = SensorParams(linewidth=0.02, coupling=1e-5)


def _triplet(x, centers, widths, heights):
    return sum(h * (w / 2) ** 2 / ((x - c) ** 2 + (w / 2) ** 2) for c, w, h in zip(centers, widths, heights))


def test_sensor_matches_regression_fast_regime():
    axis = np.linspace(-1.0, 1.0, 81)
    s = single_photon_spectrum(FAST, FAST_SENSOR, None, PhononMode.OFF, axis)
    q = qrt_reference_spectrum(FAST, None, PhononMode.OFF, axis, FAST_SENSOR.linewidth)
    np.testing.assert_allclose(s.s1, q.s1, rtol=1e-3)


def test_regression_spectrum_integrates_to_population():
    # the filtered spectrum integrates to <s^+ s>
    e = EmitterParams(rabi=0.5, gamma=0.3)
    model = build_composite(e)
    pop = steady_state(build_liouvillian(model, None, PhononMode.OFF))[1, 1].real

    def f(w):
        return qrt_reference_spectrum(e, None, PhononMode.OFF, [w], 0.2).s1[0]

    total = sum(integrate.quad(f, a, b, limit=200)[0] for a, b in [(-60, -1), (-1, 1), (1, 60)])
    # Lorentzian tails beyond |w| = 60 carry ~ (Gamma + gamma)/(2 pi 60) of the weight
    assert total == pytest.approx(pop, rel=2e-3)


def test_qrt_rejects_joint():
    with pytest.raises(ValueError):
        qrt_reference_spectrum(FAST, FIG2_BATH, PhononMode.JOINT, [0.0], 0.01)


def test_single_photon_symmetric_without_phonons():
    axis = np.linspace(-0.8, 0.8, 17)
    s = single_photon_spectrum(FAST, FAST_SENSOR, None, PhononMode.OFF, axis)
    np.testing.assert_allclose(s.s1, s.s1[::-1], rtol=1e-8)


def test_workers_do_not_change_results():
    axis = np.linspace(-0.8, 0.8, 9)
    a = single_photon_spectrum(FAST, FAST_SENSOR, None, PhononMode.OFF, axis, workers=1)
    b = single_photon_spectrum(FAST, FAST_SENSOR, None, PhononMode.OFF, axis, workers=3)
    np.testing.assert_array_equal(a.s1, b.s1)


def test_workers_with_bath_kernel(fig2_kernel):
    axis = np.linspace(-0.3, 0.3, 5)
    e = EmitterParams(rabi=0.5, gamma=0.05)
    a = single_photon_spectrum(e, FAST_SENSOR, FIG2_BATH, PhononMode.JOINT, axis, fig2_kernel, workers=1)
    b = single_photon_spectrum(e, FAST_SENSOR, FIG2_BATH, PhononMode.JOINT, axis, fig2_kernel, workers=2)
    np.testing.assert_array_equal(a.s1, b.s1)


def test_axis_validation():
    with pytest.raises(AxisMismatch):
        single_photon_spectrum(FAST, FAST_SENSOR, None, PhononMode.OFF, [0.1, 0.0])
    with pytest.raises(AxisMismatch):
        single_photon_spectrum(FAST, FAST_SENSOR, None, PhononMode.OFF, [])


def test_normal_ordered_moment_checks():
    model = build_composite(FAST, [FAST_SENSOR, FAST_SENSOR])
    rho = steady_state(build_liouvillian(model, None, PhononMode.OFF))
    with pytest.raises(DuplicateSensorIndex):
        normal_ordered_moment(rho, model, [1, 1])
    with pytest.raises(IndexError):
        normal_ordered_moment(rho, model, [3])
    assert normal_ordered_moment(rho, model, []) == pytest.approx(1.0)


def test_two_photon_map_and_swap_symmetry():
    axis = np.array([-0.5, 0.0, 0.5])
    res = two_photon_spectrum(FAST, [FAST_SENSOR, FAST_SENSOR], None, PhononMode.OFF, axis)
    assert res.is_map and res.g2.shape == (3, 3)
    np.testing.assert_allclose(res.s2, res.s2.T, rtol=1e-9)
    np.testing.assert_allclose(res.g2, res.g2.T, rtol=1e-9)
    assert not res.failed


def test_g2_points_match_grid():
    axis = np.array([-0.5, 0.5])
    grid = two_photon_spectrum(FAST, [FAST_SENSOR, FAST_SENSOR], None, PhononMode.OFF, axis)
    pts = g2_points(FAST, [FAST_SENSOR, FAST_SENSOR], None, PhononMode.OFF, [(-0.5, 0.5)])
    assert pts[0] == pytest.approx(grid.g2[0, 1], rel=1e-12)


def test_broadband_sensors_recover_antibunching():
    # filters much wider than the triplet see the unfiltered g2(0) = 0 of a two-level emitter
    wide = SensorParams(linewidth=50.0, coupling=1e-4)
    g2 = g2_points(FAST, [wide, wide], None, PhononMode.OFF, [(0.0, 0.0)])
    assert 0 <= g2[0] < 1e-3


def test_g2_normalize_zero_denominator():
    ax = np.array([0.0, 1.0])
    s2 = SpectrumResult(axis1=ax, axis2=ax, s2=np.ones((2, 2)), mode=PhononMode.OFF)
    s1 = SpectrumResult(axis1=ax, s1=np.array([1.0, 0.0]), mode=PhononMode.OFF)
    res = g2_normalize(s2, s1, s1)
    assert res.g2[0, 0] == 1.0
    assert math.isnan(res.g2[0, 1]) and math.isnan(res.g2[1, 1])
    assert res.failed == [1, 2, 3]


def test_g2_normalize_axis_mismatch():
    ax = np.array([0.0, 1.0])
    s2 = SpectrumResult(axis1=ax, axis2=ax, s2=np.ones((2, 2)), mode=PhononMode.OFF)
    s1 = SpectrumResult(axis1=np.array([0.0, 2.0]), s1=np.ones(2), mode=PhononMode.OFF)
    with pytest.raises(AxisMismatch):
        g2_normalize(s2, s1, s1)


def test_failed_point_is_nan(monkeypatch):
    real = spectra.sensor_moment

    def flaky(emitter, sensors, *a, **k):
        if sensors[0].detuning == 0.0:
            raise spectra.SensorPhononError("synthetic failure")
        return real(emitter, sensors, *a, **k)

    monkeypatch.setattr(spectra, "sensor_moment", flaky)
    res = single_photon_spectrum(FAST, FAST_SENSOR, None, PhononMode.OFF, [-0.1, 0.0, 0.1])
    assert res.failed == [1]
    assert math.isnan(res.s1[1]) and np.isfinite(res.s1[[0, 2]]).all()


def test_extract_sidepeak_synthetic():
    x = np.linspace(-1, 1, 2001)
    y = _triplet(x, [-0.4, 0.0, 0.4], [0.05, 0.03, 0.05], [1.0, 3.0, 1.0])
    res = SpectrumResult(axis1=x, s1=y, mode=PhononMode.OFF)
    pa = extract_sidepeak_separation(res)
    assert pa.omega_r == pytest.approx(0.4, abs=1e-4)
    assert pa.central == pytest.approx(0.0, abs=1e-6)
    assert pa.uncertainty == pytest.approx(1e-3)


def test_extract_sidepeak_ignores_small_wiggles():
    x = np.linspace(-1, 1, 2001)
    y = _triplet(x, [-0.3, 0.0, 0.3, 0.8], [0.05, 0.03, 0.05, 0.02], [1.0, 3.0, 1.0, 0.1])
    pa = extract_sidepeak_separation(SpectrumResult(axis1=x, s1=y, mode=PhononMode.OFF))
    assert pa.omega_r == pytest.approx(0.3, abs=1e-4)


def test_extract_sidepeak_not_found():
    x = np.linspace(-1, 1, 201)
    y = _triplet(x, [0.0], [0.1], [1.0])
    with pytest.raises(PeaksNotFound):
        extract_sidepeak_separation(SpectrumResult(axis1=x, s1=y, mode=PhononMode.OFF))


def test_provenance_recorded(fig2_kernel):
    res = single_photon_spectrum(FAST, FAST_SENSOR, FIG2_BATH, PhononMode.JOINT, [0.0], fig2_kernel)
    prov = res.provenance
    assert prov["mode"] == "joint"
    assert prov["bath"]["alpha"] == 0.027
    assert prov["quadrature"]["tau_max"] == 15.0
