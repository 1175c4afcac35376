"""Run configuration: TOML in, validated dataclasses out.

Example::

    workers = "auto"

    [emitter]
    gamma = 0.0014285714285714286
    rabi = 0.05

    [bath]
    alpha = 0.027
    nu_c = 2.2
    temperature_K = 4.0
    mode = "joint"

    [[sensors]]
    linewidth = 1e-4
    coupling = 1e-6

    [sweep.axis1]
    start = -2.5
    stop = 2.5
    points = 2001
"""

from __future__ import annotations

import dataclasses
import hashlib
import logging
import math
import os
import re
from dataclasses import dataclass, field

import numpy as np
import tomli
import tomli_w

from .bath import BathKernel, BathParams
from .errors import ParseError, ValidationError
from .liouvillian import PhononMode
from .model import MAX_SENSORS, EmitterParams, SensorParams

log = logging.getLogger(__name__)

OUT_DIR_ENV = "SENSORPHONON_OUT"


@dataclass(frozen=True)
class AxisConfig:
    start: float
    stop: float
    points: int

    def values(self):
        return np.linspace(self.start, self.stop, self.points)


@dataclass(frozen=True)
class EmitterConfig:
    gamma: float = 1.0 / 700.0
    rabi: float = 0.05
    detuning: float = 0.0


@dataclass(frozen=True)
class BathConfig:
    alpha: float = 0.027
    nu_c: float = 2.2
    temperature_K: float = 4.0
    mode: str = "joint"


@dataclass(frozen=True)
class SensorConfig:
    linewidth: float = 1e-4
    coupling: float = 1e-6


@dataclass(frozen=True)
class SweepConfig:
    axis1: AxisConfig
    axis2: AxisConfig | None = None


@dataclass(frozen=True)
class QuadratureConfig:
    tau_max: float = 15.0
    tolerance: float = 1e-10


@dataclass(frozen=True)
class OutputConfig:
    format: str = "csv"
    path: str = ""
    svg: bool = False


@dataclass(frozen=True)
class RunConfig:
    emitter: EmitterConfig
    bath: BathConfig
    sensors: tuple
    sweep: SweepConfig
    quadrature: QuadratureConfig = field(default_factory=QuadratureConfig)
    output: OutputConfig = field(default_factory=OutputConfig)
    workers: int | str = "auto"

    def emitter_params(self):
        e = self.emitter
        return EmitterParams(rabi=e.rabi, gamma=e.gamma, detuning=e.detuning)

    def bath_params(self):
        b = self.bath
        return BathParams(alpha=b.alpha, nu_c=b.nu_c, temperature=b.temperature_K)

    def sensor_params(self):
        return [SensorParams(linewidth=s.linewidth, coupling=s.coupling) for s in self.sensors]

    @property
    def mode(self):
        return PhononMode(self.bath.mode)

    def kernel(self):
        return BathKernel(
            self.bath_params(), tau_max=self.quadrature.tau_max, tol=self.quadrature.tolerance
        )

    def worker_count(self):
        if self.workers == "auto":
            return os.cpu_count() or 1
        return int(self.workers)

    def output_dir(self):
        return self.output.path or os.environ.get(OUT_DIR_ENV, "") or "."


def _check_keys(table, allowed, where):
    for key in table:
        if key not in allowed:
            raise ValidationError(f"{where}.{key}" if where else key, "unknown key")


def _number(table, key, where, default, positive=False, nonneg=False, defaults=None):
    name = f"{where}.{key}"
    if key not in table:
        if default is None:
            raise ValidationError(name, "required")
        if defaults is not None:
            defaults.append((name, default))
        return default
    val = table[key]
    if isinstance(val, bool) or not isinstance(val, (int, float)):
        raise ValidationError(name, "must be a number")
    val = float(val)
    if not math.isfinite(val):
        raise ValidationError(name, "must be finite")
    if positive and not val > 0:
        raise ValidationError(name, "must be > 0")
    if nonneg and not val >= 0:
        raise ValidationError(name, "must be >= 0")
    return val


def _section(doc, key, cls, fields, defaults, required=False):
    raw = doc.get(key)
    if raw is None:
        if required:
            raise ValidationError(key, "section required")
        raw = {}
        defaults.append((key, "all defaults"))
    if not isinstance(raw, dict):
        raise ValidationError(key, "must be a table")
    _check_keys(raw, [f.name for f in dataclasses.fields(cls)], key)
    kw = {}
    base = cls()
    for name, flags in fields.items():
        kw[name] = _number(raw, name, key, getattr(base, name), defaults=defaults, **flags)
    return raw, kw


def _axis(raw, name):
    if not isinstance(raw, dict):
        raise ValidationError(name, "must be a table with start, stop, points")
    _check_keys(raw, ["start", "stop", "points"], name)
    start = _number(raw, "start", name, None)
    stop = _number(raw, "stop", name, None)
    pts = raw.get("points")
    if isinstance(pts, bool) or not isinstance(pts, int):
        raise ValidationError(f"{name}.points", "must be an integer")
    if pts < 1:
        raise ValidationError(f"{name}.points", "must be >= 1")
    if pts > 1 and not stop > start:
        raise ValidationError(name, "stop must exceed start")
    return AxisConfig(start=start, stop=stop, points=pts)


_LINE_COL = re.compile(r"line (\d+), column (\d+)")


def parse_config(text):
    """Parse and validate a TOML run configuration.

    Every default that had to be filled in is logged at INFO level.
    """
    try:
        doc = tomli.loads(text)
    except tomli.TOMLDecodeError as exc:
        m = _LINE_COL.search(str(exc))
        line, col = (int(m.group(1)), int(m.group(2))) if m else (None, None)
        raise ParseError(str(exc), line, col) from exc

    _check_keys(
        doc, ["emitter", "bath", "sensors", "sweep", "quadrature", "output", "workers"], ""
    )
    defaults = []

    _, kw = _section(
        doc, "emitter", EmitterConfig,
        {"gamma": {"positive": True}, "rabi": {"nonneg": True}, "detuning": {}},
        defaults,
    )
    emitter = EmitterConfig(**kw)

    raw, kw = _section(
        doc, "bath", BathConfig,
        {"alpha": {"nonneg": True}, "nu_c": {"positive": True}, "temperature_K": {"positive": True}},
        defaults,
    )
    mode = raw.get("mode", "joint")
    if "mode" not in raw:
        defaults.append(("bath.mode", mode))
    try:
        mode = PhononMode(mode).value
    except ValueError:
        raise ValidationError("bath.mode", "must be one of joint, additive, off") from None
    bath = BathConfig(mode=mode, **kw)

    raw_sensors = doc.get("sensors", [])
    if not isinstance(raw_sensors, list):
        raise ValidationError("sensors", "must be an array of tables")
    if not raw_sensors:
        raise ValidationError("sensors", "at least one sensor")
    if len(raw_sensors) > MAX_SENSORS:
        raise ValidationError("sensors", f"at most {MAX_SENSORS} sensors")
    sensors = []
    for i, s in enumerate(raw_sensors):
        where = f"sensors[{i}]"
        if not isinstance(s, dict):
            raise ValidationError(where, "must be a table")
        _check_keys(s, ["linewidth", "coupling"], where)
        sensors.append(
            SensorConfig(
                linewidth=_number(s, "linewidth", where, 1e-4, positive=True, defaults=defaults),
                coupling=_number(s, "coupling", where, 1e-6, positive=True, defaults=defaults),
            )
        )

    raw_sweep = doc.get("sweep")
    if not isinstance(raw_sweep, dict):
        raise ValidationError("sweep", "section required")
    _check_keys(raw_sweep, ["axis1", "axis2"], "sweep")
    if "axis1" not in raw_sweep:
        raise ValidationError("sweep.axis1", "required")
    axis1 = _axis(raw_sweep["axis1"], "sweep.axis1")
    axis2 = _axis(raw_sweep["axis2"], "sweep.axis2") if "axis2" in raw_sweep else None
    if len(sensors) == 2 and axis2 is None:
        raise ValidationError("sweep.axis2", "required for two sensors")
    if len(sensors) == 1 and axis2 is not None:
        raise ValidationError("sweep.axis2", "only valid with two sensors")
    if len(sensors) == 3:
        raise ValidationError("sensors", "sweeps support one or two sensors")
    sweep = SweepConfig(axis1=axis1, axis2=axis2)

    _, kw = _section(
        doc, "quadrature", QuadratureConfig,
        {"tau_max": {"positive": True}, "tolerance": {"positive": True}},
        defaults,
    )
    quadrature = QuadratureConfig(**kw)

    raw_out = doc.get("output", {})
    if not isinstance(raw_out, dict):
        raise ValidationError("output", "must be a table")
    _check_keys(raw_out, ["format", "path", "svg"], "output")
    fmt = raw_out.get("format", "csv")
    if fmt not in ("csv", "json"):
        raise ValidationError("output.format", "must be csv or json")
    path = raw_out.get("path", "")
    if not isinstance(path, str):
        raise ValidationError("output.path", "must be a string")
    svg = raw_out.get("svg", False)
    if not isinstance(svg, bool):
        raise ValidationError("output.svg", "must be true or false")
    for key, val in (("format", fmt), ("path", path), ("svg", svg)):
        if key not in raw_out:
            defaults.append((f"output.{key}", val))
    output = OutputConfig(format=fmt, path=path, svg=svg)

    workers = doc.get("workers", "auto")
    if "workers" not in doc:
        defaults.append(("workers", "auto"))
    if workers != "auto" and (isinstance(workers, bool) or not isinstance(workers, int) or workers < 1):
        raise ValidationError("workers", "must be a positive integer or 'auto'")

    for name, val in defaults:
        log.info("default applied: %s = %r", name, val)

    return RunConfig(
        emitter=emitter,
        bath=bath,
        sensors=tuple(sensors),
        sweep=sweep,
        quadrature=quadrature,
        output=output,
        workers=workers,
    )


def to_dict(cfg: RunConfig):
    d = {"workers": cfg.workers}
    d["emitter"] = dataclasses.asdict(cfg.emitter)
    d["bath"] = dataclasses.asdict(cfg.bath)
    d["sensors"] = [dataclasses.asdict(s) for s in cfg.sensors]
    sweep = {"axis1": dataclasses.asdict(cfg.sweep.axis1)}
    if cfg.sweep.axis2 is not None:
        sweep["axis2"] = dataclasses.asdict(cfg.sweep.axis2)
    d["sweep"] = sweep
    d["quadrature"] = dataclasses.asdict(cfg.quadrature)
    d["output"] = dataclasses.asdict(cfg.output)
    return d


def serialize(cfg: RunConfig):
    return tomli_w.dumps(to_dict(cfg))


def config_hash(cfg: RunConfig):
    """Hash of the physics and sweep settings; output location and workers are excluded."""
    d = to_dict(cfg)
    d.pop("workers")
    d.pop("output")
    return hashlib.sha256(tomli_w.dumps(d).encode()).hexdigest()
