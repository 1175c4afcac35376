"""Frequency-filtered photon spectra of a driven emitter in a phonon bath.

The emitter, N two-level sensors and a weak-coupling phonon dissipator built in
the joint emitter-sensor eigenbasis are combined into one Markovian generator;
steady-state sensor occupations give the filtered N-photon spectra.
"""

__version__ = "0.1.0"

from .bath import BathKernel, BathParams, bath_correlation, half_fourier, polaron_shift
from .liouvillian import PhononMode, build_liouvillian, steady_state
from .model import EmitterParams, SensorParams, build_composite, resonant_drive
from .spectra import (
    extract_sidepeak_separation,
    g2_normalize,
    qrt_reference_spectrum,
    single_photon_spectrum,
    two_photon_spectrum,
)

__all__ = [
    "BathKernel",
    "BathParams",
    "EmitterParams",
    "PhononMode",
    "SensorParams",
    "bath_correlation",
    "build_composite",
    "build_liouvillian",
    "extract_sidepeak_separation",
    "g2_normalize",
    "half_fourier",
    "polaron_shift",
    "qrt_reference_spectrum",
    "resonant_drive",
    "single_photon_spectrum",
    "steady_state",
    "two_photon_spectrum",
]
