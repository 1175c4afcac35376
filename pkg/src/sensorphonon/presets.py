"""Figure presets: resonantly driven quantum dot in a super-Ohmic phonon bath."""

from __future__ import annotations

import hashlib
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .bath import BathKernel, BathParams
from .liouvillian import PhononMode
from .model import EmitterParams, SensorParams
from .output import emit_data, render_svg
from .spectra import extract_sidepeak_separation, single_photon_spectrum, two_photon_spectrum
from .errors import PeaksNotFound

log = logging.getLogger(__name__)

GAMMA = 1.0 / 700.0
FIG2_EMITTER = EmitterParams(rabi=0.05, gamma=GAMMA, detuning=0.0)
FIG2_BATH = BathParams(alpha=0.027, nu_c=2.2, temperature=4.0)
NO_BATH = BathParams(alpha=0.0, nu_c=2.2, temperature=4.0)
FIG2_SENSOR = SensorParams(linewidth=1e-4, coupling=1e-6)
FIG3_SENSOR = SensorParams(linewidth=2 * GAMMA, coupling=1e-6)

# (name, start, stop, points)
FIG2_AXES = [("main", -2.5, 2.5, 2001), ("inset", -0.1, 0.1, 801)]
FIG3_AXES = [
    ("main", -1.0, 1.0, 301),
    ("psb", -0.65, -0.35, 61),
    ("resonance", -0.1, 0.1, 81),
]

PRESETS = ("fig2", "fig3a", "fig3b", "figS2")


@dataclass
class PresetOutcome:
    name: str
    results: dict = field(default_factory=dict)
    files: list = field(default_factory=list)
    failed_points: int = 0
    summary: dict = field(default_factory=dict)


def _axis(start, stop, points, override):
    n = points if override is None else int(override)
    return np.linspace(start, stop, n)


def preset_hash(name, results):
    doc = {
        "preset": name,
        "engine_version": __version__,
        "runs": {
            k: {"provenance": r.provenance, "axis1": [r.axis1[0], r.axis1[-1], r.axis1.size]}
            for k, r in sorted(results.items())
        },
    }
    return hashlib.sha256(json.dumps(doc, sort_keys=True, default=str).encode()).hexdigest()


def _fig2(points, workers):
    kernel = BathKernel(FIG2_BATH)
    results = {}
    summary = {}
    for region, start, stop, n in FIG2_AXES:
        axis = _axis(start, stop, n, points)
        for mode in (PhononMode.JOINT, PhononMode.ADDITIVE, PhononMode.OFF):
            res = single_photon_spectrum(
                FIG2_EMITTER, FIG2_SENSOR, FIG2_BATH, mode, axis, kernel=kernel, workers=workers
            )
            results[f"{region}_{mode.value}"] = res
            if region == "inset":
                try:
                    pa = extract_sidepeak_separation(res)
                    summary[f"omega_r_{mode.value}"] = pa.omega_r
                    summary[f"omega_r_uncertainty_{mode.value}"] = pa.uncertainty
                except PeaksNotFound as exc:
                    log.warning("peak extraction failed for %s: %s", mode.value, exc)
    return results, summary


def _fig3(with_bath, points, workers):
    bath = FIG2_BATH if with_bath else NO_BATH
    mode = PhononMode.JOINT if with_bath else PhononMode.OFF
    kernel = BathKernel(bath) if with_bath else None
    results = {}
    for region, start, stop, n in FIG3_AXES:
        axis = _axis(start, stop, n, points)
        results[region] = two_photon_spectrum(
            FIG2_EMITTER,
            [FIG3_SENSOR, FIG3_SENSOR],
            bath,
            mode,
            axis,
            kernel=kernel,
            workers=workers,
        )
    return results


def run_preset(name, out_dir, workers=1, fmt="csv", svg=False, points=None):
    """Compute a preset, then write its data files (and SVGs) from this process."""
    if name not in PRESETS:
        raise KeyError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")
    out = Path(out_dir)
    outcome = PresetOutcome(name=name)
    if name == "fig2":
        results, outcome.summary = _fig2(points, workers)
        outcome.results = results
    elif name in ("fig3a", "fig3b"):
        outcome.results = _fig3(name == "fig3b", points, workers)
    else:
        for tag, with_bath in (("a", False), ("b", True)):
            for k, v in _fig3(with_bath, points, workers).items():
                outcome.results[f"{tag}_{k}"] = v

    digest = preset_hash(name, outcome.results)
    ext = "json" if fmt == "json" else "csv"
    for key, res in outcome.results.items():
        outcome.files.append(emit_data(res, fmt, out / f"{name}_{key}.{ext}", digest))
        outcome.failed_points += len(res.failed)
    if svg:
        if name == "fig2":
            for region, *_ in FIG2_AXES:
                series = [outcome.results[f"{region}_{m}"] for m in ("joint", "additive", "off")]
                outcome.files.append(
                    render_svg(series, out / f"{name}_{region}.svg", title=f"{name} {region}", config_hash=digest)
                )
        else:
            style = "symlog" if name == "figS2" else "linear"
            for key, res in outcome.results.items():
                outcome.files.append(
                    render_svg(res, out / f"{name}_{key}.svg", style=style, title=f"{name} {key}", config_hash=digest)
                )
    outcome.summary["config_hash"] = digest
    return outcome
