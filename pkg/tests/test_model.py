import warnings

import numpy as np
import pytest

from sensorphonon.bath import BathParams, polaron_shift
from sensorphonon.errors import TooManySensors, WeakSensorWarning
from sensorphonon.model import EmitterParams, SensorParams, build_composite, resonant_drive
from sensorphonon.operators import is_hermitian


def test_emitter_hamiltonian_rotating_frame():
    h = EmitterParams(rabi=0.2, detuning=0.3).hamiltonian()
    np.testing.assert_allclose(h, [[0, 0.1], [0.1, 0.3]])


def test_emitter_requires_positive_gamma():
    with pytest.raises(ValueError):
        EmitterParams(gamma=0.0)


def test_sensor_validation():
    with pytest.raises(ValueError):
        SensorParams(linewidth=0.0)
    with pytest.raises(ValueError):
        SensorParams(coupling=-1e-6)
    assert SensorParams().tuned(0.4).detuning == 0.4


def test_dimensions():
    e = EmitterParams()
    for n in range(4):
        m = build_composite(e, [SensorParams()] * n)
        assert m.dim == 2 ** (n + 1)
        assert m.h_prime.shape == (m.dim, m.dim)
        assert is_hermitian(m.h_prime)
        assert len(m.collapse) == n + 1


def test_too_many_sensors():
    with pytest.raises(TooManySensors):
        build_composite(EmitterParams(), [SensorParams()] * 4)


def test_coupling_matrix_elements():
    eps = 1e-3
    m = build_composite(
        EmitterParams(rabi=0.0, gamma=1.0), [SensorParams(linewidth=1.0, coupling=eps, detuning=0.2)]
    )
    # basis |emitter, sensor>: index 2*e + s
    h = m.h_prime
    assert h[1, 2] == pytest.approx(eps)  # <g,1|H|e,0>
    assert h[2, 1] == pytest.approx(eps)
    assert h[1, 1] == pytest.approx(0.2)
    assert h[3, 3] == pytest.approx(0.2)


def test_number_operator():
    m = build_composite(EmitterParams(), [SensorParams(), SensorParams()])
    n2 = m.number_operator(1)
    np.testing.assert_allclose(np.diag(n2).real, [0, 1, 0, 1, 0, 1, 0, 1])


def test_weak_sensor_warning():
    e = EmitterParams(gamma=1e-2)
    with pytest.warns(WeakSensorWarning):
        build_composite(e, [SensorParams(linewidth=1e-2, coupling=1e-2)])
    with warnings.catch_warnings():
        warnings.simplefilter("error", WeakSensorWarning)
        build_composite(e, [SensorParams(linewidth=1e-2, coupling=1e-4)])


def test_resonant_drive():
    bath = BathParams()
    e = resonant_drive(1000.0, bath, rabi=0.05)
    assert e.detuning == 0.0
    assert e.omega0_prime == pytest.approx(1000.0 + polaron_shift(bath))
