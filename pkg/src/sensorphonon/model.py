"""Joint emitter-sensor system in the frame rotating at the laser frequency.

Tensor ordering is ``emitter (x) sensor_1 (x) ... (x) sensor_N`` with basis
``(|g>, |e>)`` for the emitter and ``(|0>, |1>)`` for each sensor.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from .bath import BathParams, polaron_shift
from .errors import TooManySensors, WeakSensorWarning
from .operators import (
    PROJ_EXCITED,
    SIGMA_MINUS,
    SIGMA_X,
    dag,
    lift,
)

MAX_SENSORS = 3
WEAK_SENSOR_LIMIT = 1e-2


@dataclass(frozen=True)
class EmitterParams:
    """Driven two-level emitter. ``detuning`` is ``omega_0' - omega_L``."""

    rabi: float = 0.05
    gamma: float = 1.0 / 700.0
    detuning: float = 0.0
    omega0_prime: float | None = None

    def __post_init__(self):
        if not self.gamma > 0:
            raise ValueError(f"gamma must be > 0, got {self.gamma}")

    def hamiltonian(self):
        return self.detuning * PROJ_EXCITED + 0.5 * self.rabi * SIGMA_X


@dataclass(frozen=True)
class SensorParams:
    """Two-level sensor; ``detuning`` is ``omega_m - omega_L``."""

    linewidth: float = 1e-4
    coupling: float = 1e-6
    detuning: float = 0.0

    def __post_init__(self):
        if not self.linewidth > 0:
            raise ValueError(f"linewidth must be > 0, got {self.linewidth}")
        if not self.coupling >= 0:
            raise ValueError(f"coupling must be >= 0, got {self.coupling}")

    def tuned(self, detuning):
        return replace(self, detuning=float(detuning))


@dataclass(frozen=True, eq=False)
class CompositeModel:
    emitter: EmitterParams
    sensors: tuple
    dims: tuple
    h_prime: np.ndarray = field(repr=False)
    h_emitter: np.ndarray = field(repr=False)
    sigma: np.ndarray = field(repr=False)
    a: np.ndarray = field(repr=False)
    varsigma: tuple = field(repr=False)
    collapse: tuple = field(repr=False)

    @property
    def dim(self):
        return int(np.prod(self.dims))

    @property
    def n_sensors(self):
        return len(self.sensors)

    def number_operator(self, m):
        """Number operator of sensor ``m`` (0-based)."""
        s = self.varsigma[m]
        return dag(s) @ s


def build_composite(emitter, sensors=()):
    sensors = tuple(sensors)
    if len(sensors) > MAX_SENSORS:
        raise TooManySensors(f"{len(sensors)} sensors requested, at most {MAX_SENSORS} supported")
    dims = (2,) * (len(sensors) + 1)

    sigma = lift(SIGMA_MINUS, 0, dims)
    a = lift(PROJ_EXCITED, 0, dims)
    h_emitter = lift(emitter.hamiltonian(), 0, dims)
    h = h_emitter.copy()
    varsigma = []
    collapse = [(sigma, emitter.gamma)]
    for m, s in enumerate(sensors, start=1):
        vs = lift(SIGMA_MINUS, m, dims)
        varsigma.append(vs)
        h = h + s.detuning * (dag(vs) @ vs) + s.coupling * (dag(sigma) @ vs + sigma @ dag(vs))
        collapse.append((vs, s.linewidth))
        if s.coupling**2 / (s.linewidth * emitter.gamma) >= WEAK_SENSOR_LIMIT:
            warnings.warn(
                f"sensor {m}: eps^2/(Gamma gamma) = "
                f"{s.coupling**2 / (s.linewidth * emitter.gamma):.2e} is not weak",
                WeakSensorWarning,
                stacklevel=2,
            )
    return CompositeModel(
        emitter=emitter,
        sensors=sensors,
        dims=dims,
        h_prime=h,
        h_emitter=h_emitter,
        sigma=sigma,
        a=a,
        varsigma=tuple(varsigma),
        collapse=tuple(collapse),
    )


def resonant_drive(emitter_gap, bath: BathParams, rabi=0.05, gamma=1.0 / 700.0):
    """Emitter driven on its polaron-shifted resonance.

    The laser sits at ``omega_0' = omega_0 + delta_P``, so the rotating-frame
    detuning is zero; ``omega0_prime`` is kept only for labelling axes.
    """
    return EmitterParams(
        rabi=rabi,
        gamma=gamma,
        detuning=0.0,
        omega0_prime=emitter_gap + polaron_shift(bath),
    )
