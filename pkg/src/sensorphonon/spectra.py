"""Frequency-resolved photon spectra from sensor occupations.

All frequencies are detunings from the laser, ``omega - omega_L``, in ps^-1.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import find_peaks

from . import __version__
from .bath import BathKernel, BathParams
from .errors import (
    AxisMismatch,
    DuplicateSensorIndex,
    PeaksNotFound,
    SensorPhononError,
)
from .liouvillian import PhononMode, build_liouvillian, steady_state
from .model import EmitterParams, SensorParams, build_composite
from .operators import SIGMA_MINUS, vec

log = logging.getLogger(__name__)

G2_FLOOR = 1e-300


@dataclass
class SpectrumResult:
    """Spectrum on one axis (``s1``) or on a two-axis grid (``s2``, ``g2``).

    Failed points are NaN and listed in ``failed``.
    """

    axis1: np.ndarray
    mode: PhononMode
    s1: np.ndarray | None = None
    axis2: np.ndarray | None = None
    s2: np.ndarray | None = None
    g2: np.ndarray | None = None
    provenance: dict = field(default_factory=dict)
    failed: list = field(default_factory=list)
    label: str = ""

    @property
    def is_map(self):
        return self.axis2 is not None

    @property
    def step(self):
        return float(np.min(np.diff(self.axis1))) if self.axis1.size > 1 else 0.0


@dataclass(frozen=True)
class PeakAnalysis:
    positions: tuple
    heights: tuple
    central: float
    omega_r: float
    uncertainty: float


def _check_axis(axis, name="axis"):
    axis = np.asarray(axis, dtype=float)
    if axis.ndim != 1 or axis.size == 0:
        raise AxisMismatch(f"{name} must be a non-empty 1-D array")
    if axis.size > 1 and not np.all(np.diff(axis) > 0):
        raise AxisMismatch(f"{name} must be strictly increasing")
    return axis


def provenance_record(emitter, sensors, bath, mode, kernel, **extra):
    rec = {
        "engine_version": __version__,
        "mode": PhononMode(mode).value,
        "emitter": {"rabi": emitter.rabi, "gamma": emitter.gamma, "detuning": emitter.detuning},
        "sensors": [{"linewidth": s.linewidth, "coupling": s.coupling} for s in sensors],
        "bath": None
        if bath is None
        else {"alpha": bath.alpha, "nu_c": bath.nu_c, "temperature": bath.temperature},
        "quadrature": None
        if kernel is None
        else {"tau_max": kernel.tau_max, "tolerance": kernel.tol},
    }
    rec.update(extra)
    return rec


def normal_ordered_moment(rho_ss, model, sensor_indices):
    """``<s_1^+ ... s_k^+ s_k ... s_1>`` for distinct 1-based sensor indices."""
    idx = list(sensor_indices)
    if len(set(idx)) != len(idx):
        raise DuplicateSensorIndex(f"sensor indices must be distinct, got {idx}")
    for i in idx:
        if not 1 <= i <= model.n_sensors:
            raise IndexError(f"sensor index {i} outside [1, {model.n_sensors}]")
    op = np.eye(model.dim, dtype=complex)
    for i in idx:
        op = op @ model.number_operator(i - 1)
    return float(np.real(np.trace(rho_ss @ op)))


def sensor_moment(emitter, sensors, bath, mode, kernel, counterterm=True):
    """Steady-state ``<:n_1 ... n_N:>`` for one sensor configuration."""
    model = build_composite(emitter, sensors)
    rho = steady_state(build_liouvillian(model, bath, mode, kernel, counterterm))
    return normal_ordered_moment(rho, model, range(1, len(sensors) + 1))


def _prefactor(sensors):
    out = 1.0
    for s in sensors:
        out *= s.linewidth / (2.0 * math.pi * s.coupling**2)
    return out


def _evaluate_chunk(args):
    emitter, templates, bath, mode, kernel, points, counterterm = args
    out = []
    for pt in points:
        sensors = [t.tuned(w) for t, w in zip(templates, pt)]
        try:
            out.append(_prefactor(sensors) * sensor_moment(emitter, sensors, bath, mode, kernel, counterterm))
        except (SensorPhononError, np.linalg.LinAlgError) as exc:
            log.warning("point %s failed: %s", pt, exc)
            out.append(math.nan)
    return out


def _make_kernel(bath, kernel, mode):
    if PhononMode(mode) is PhononMode.OFF or bath is None or bath.alpha == 0:
        return None
    return kernel if kernel is not None else BathKernel(bath)


def evaluate_points(
    emitter,
    templates,
    bath,
    mode,
    points,
    kernel=None,
    workers=1,
    counterterm=True,
):
    """Physical N-photon spectrum at each detuning tuple in ``points``.

    Points are dealt round-robin to ``workers`` processes and written back to
    their own slots, so results do not depend on the worker count.
    """
    templates = list(templates)
    points = [tuple(float(w) for w in np.atleast_1d(p)) for p in points]
    if any(len(p) != len(templates) for p in points):
        raise AxisMismatch("each point needs one detuning per sensor")
    kernel = _make_kernel(bath, kernel, mode)
    if kernel is not None:
        kernel.table()
    out = np.full(len(points), math.nan)
    workers = max(1, min(int(workers), len(points)))
    if workers == 1:
        out[:] = _evaluate_chunk((emitter, templates, bath, mode, kernel, points, counterterm))
        return out
    chunks = [list(range(w, len(points), workers)) for w in range(workers)]
    jobs = [
        (emitter, templates, bath, mode, kernel, [points[i] for i in c], counterterm)
        for c in chunks
    ]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        for c, vals in zip(chunks, pool.map(_evaluate_chunk, jobs)):
            out[c] = vals
    return out


def single_photon_spectrum(
    emitter: EmitterParams,
    sensor: SensorParams,
    bath: BathParams | None,
    mode,
    axis,
    kernel=None,
    workers=1,
    counterterm=True,
):
    """``S1(w) = Gamma / (2 pi eps^2) <n>_ss`` along ``axis``."""
    axis = _check_axis(axis, "axis1")
    mode = PhononMode(mode)
    kernel = _make_kernel(bath, kernel, mode)
    vals = evaluate_points(emitter, [sensor], bath, mode, axis[:, None], kernel, workers, counterterm)
    return SpectrumResult(
        axis1=axis,
        s1=vals,
        mode=mode,
        provenance=provenance_record(emitter, [sensor], bath, mode, kernel, counterterm=counterterm),
        failed=[int(i) for i in np.flatnonzero(np.isnan(vals))],
        label=mode.value,
    )


def two_photon_spectrum(
    emitter: EmitterParams,
    sensors,
    bath: BathParams | None,
    mode,
    axis1,
    axis2=None,
    kernel=None,
    workers=1,
    counterterm=True,
    normalize=True,
):
    """``S2(w1, w2) = prod_i Gamma_i / (2 pi eps_i^2) <:n1 n2:>_ss`` on a grid.

    With ``normalize`` the dedicated single-sensor spectra along each axis are
    also computed and ``g2`` is filled in.
    """
    sensors = list(sensors)
    if len(sensors) != 2:
        raise AxisMismatch(f"two-photon spectrum needs two sensors, got {len(sensors)}")
    axis1 = _check_axis(axis1, "axis1")
    axis2 = axis1 if axis2 is None else _check_axis(axis2, "axis2")
    mode = PhononMode(mode)
    kernel = _make_kernel(bath, kernel, mode)
    pts = [(w1, w2) for w1 in axis1 for w2 in axis2]
    s2 = evaluate_points(emitter, sensors, bath, mode, pts, kernel, workers, counterterm)
    s2 = s2.reshape(axis1.size, axis2.size)
    res = SpectrumResult(
        axis1=axis1,
        axis2=axis2,
        s2=s2,
        mode=mode,
        provenance=provenance_record(emitter, sensors, bath, mode, kernel, counterterm=counterterm),
        failed=[int(i) for i in np.flatnonzero(np.isnan(s2.ravel()))],
        label=mode.value,
    )
    if normalize:
        s1a = single_photon_spectrum(emitter, sensors[0], bath, mode, axis1, kernel, workers, counterterm)
        s1b = single_photon_spectrum(emitter, sensors[1], bath, mode, axis2, kernel, workers, counterterm)
        res = g2_normalize(res, s1a, s1b)
    return res


def g2_normalize(s2: SpectrumResult, s1_axis1: SpectrumResult, s1_axis2: SpectrumResult):
    """``g2 = S2 / (S1(w1) S1(w2))``; cells with a vanishing denominator become NaN."""
    for s1, ax in ((s1_axis1, s2.axis1), (s1_axis2, s2.axis2)):
        if s1.axis1.shape != ax.shape or not np.array_equal(s1.axis1, ax):
            raise AxisMismatch("single-photon axis does not match the two-photon grid")
    denom = np.outer(s1_axis1.s1, s1_axis2.s1)
    g2 = np.full_like(s2.s2, math.nan)
    ok = np.isfinite(denom) & (np.abs(denom) > G2_FLOOR)
    g2[ok] = s2.s2[ok] / denom[ok]
    prov = dict(s2.provenance)
    prov["normalization"] = "dedicated single-sensor runs"
    return SpectrumResult(
        axis1=s2.axis1,
        axis2=s2.axis2,
        s2=s2.s2,
        g2=g2,
        mode=s2.mode,
        provenance=prov,
        failed=sorted(set(s2.failed) | {int(i) for i in np.flatnonzero(~ok.ravel())}),
        label=s2.label,
    )


def g2_points(emitter, sensors, bath, mode, points, kernel=None, workers=1, counterterm=True):
    """g2 at scattered ``(w1, w2)`` points, each normalised by its own S1 runs."""
    sensors = list(sensors)
    mode = PhononMode(mode)
    kernel = _make_kernel(bath, kernel, mode)
    points = [tuple(map(float, p)) for p in points]
    s2 = evaluate_points(emitter, sensors, bath, mode, points, kernel, workers, counterterm)
    s1a = evaluate_points(emitter, [sensors[0]], bath, mode, [(p[0],) for p in points], kernel, workers, counterterm)
    s1b = evaluate_points(emitter, [sensors[1]], bath, mode, [(p[1],) for p in points], kernel, workers, counterterm)
    return s2 / (s1a * s1b)


def qrt_reference_spectrum(
    emitter: EmitterParams,
    bath: BathParams | None,
    mode,
    axis,
    linewidth,
    kernel=None,
    counterterm=True,
):
    """Lorentzian-filtered spectrum from the emitter-only first-order correlation.

    ``S(w) = (1/pi) Re int_0^inf exp(-(Gamma/2 + i w) tau) <s^+(tau) s(0)> dtau``
    with ``<s^+(tau) s(0)> = Tr[s^+ exp(L tau)(s rho_ss)]``. The Laplace
    transform of the propagated state is taken exactly, as a resolvent solve.
    """
    mode = PhononMode(mode)
    if mode is PhononMode.JOINT:
        raise ValueError("the regression-theorem reference is defined for 'off' or 'additive' only")
    axis = _check_axis(axis)
    kernel = _make_kernel(bath, kernel, mode)
    model = build_composite(emitter, [])
    l = build_liouvillian(model, bath, mode, kernel, counterterm)
    rho = steady_state(l)
    x0 = vec(SIGMA_MINUS @ rho)
    bra = vec(SIGMA_MINUS).conj()  # Tr[s^+ X] = vec(s)^H vec(X)
    eye = np.eye(l.matrix.shape[0])
    vals = np.empty(axis.size)
    for i, w in enumerate(axis):
        s = 0.5 * linewidth + 1j * w
        y = np.linalg.solve(s * eye - l.matrix, x0)
        vals[i] = (bra @ y).real / math.pi
    return SpectrumResult(
        axis1=axis,
        s1=vals,
        mode=mode,
        provenance=provenance_record(
            emitter, [], bath, mode, kernel, method="regression", linewidth=linewidth
        ),
        label=f"qrt-{mode.value}",
    )


def _parabolic_vertex(x, y, i):
    if i == 0 or i == len(y) - 1:
        return float(x[i]), float(y[i])
    x0, x1, x2 = x[i - 1], x[i], x[i + 1]
    y0, y1, y2 = y[i - 1], y[i], y[i + 1]
    denom = (x0 - x1) * (x0 - x2) * (x1 - x2)
    a = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / denom
    b = (x2**2 * (y0 - y1) + x1**2 * (y2 - y0) + x0**2 * (y1 - y2)) / denom
    if a >= 0:
        return float(x1), float(y1)
    xv = -b / (2 * a)
    c = y1 - a * x1**2 - b * x1
    return float(xv), float(a * xv**2 + b * xv + c)


def extract_sidepeak_separation(result: SpectrumResult, prominence=0.01):
    """Mollow sidepeak splitting from the three strongest maxima.

    Maxima need a prominence of ``prominence * max(S)``; positions are refined
    by a parabola through the three samples around each maximum.
    """
    x = result.axis1
    y = np.asarray(result.s1, dtype=float)
    good = np.isfinite(y)
    x, y = x[good], y[good]
    if y.size < 3:
        raise PeaksNotFound("too few valid points")
    idx, _ = find_peaks(y, prominence=prominence * float(np.max(y)))
    if idx.size < 3:
        raise PeaksNotFound(f"found {idx.size} maxima, need 3")
    top = sorted(idx[np.argsort(y[idx])[-3:]])
    refined = [_parabolic_vertex(x, y, i) for i in top]
    pos = [p for p, _ in refined]
    central = pos[1]
    omega_r = 0.5 * (abs(pos[2] - central) + abs(central - pos[0]))
    return PeakAnalysis(
        positions=tuple(pos),
        heights=tuple(h for _, h in refined),
        central=central,
        omega_r=omega_r,
        uncertainty=result.step,
    )

