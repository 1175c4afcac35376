"""Phonon bath kernels for a super-Ohmic spectral density.

Units: frequencies in ps^-1, times in ps, temperature in K.
"""

from __future__ import annotations

import math
import threading
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import constants, integrate

from .errors import (
    NegativeFrequency,
    NonPositiveFrequency,
    QuadratureNonConvergence,
    TruncationWarning,
)

KB = constants.k  # J/K
HBAR = constants.hbar  # J s
KB_OVER_HBAR = KB / HBAR * 1e-12  # ps^-1 K^-1, ~0.1309

_TINY_NU = 1e-300
_CACHE_QUANTUM = 1e-12


@dataclass(frozen=True)
class BathParams:
    """Super-Ohmic bath ``J(nu) = alpha nu^3 exp(-nu^2 / nu_c^2)``."""

    alpha: float = 0.027
    nu_c: float = 2.2
    temperature: float = 4.0

    def __post_init__(self):
        if not self.alpha >= 0:
            raise ValueError(f"alpha must be >= 0, got {self.alpha}")
        if not self.nu_c > 0:
            raise ValueError(f"nu_c must be > 0, got {self.nu_c}")
        if not self.temperature > 0:
            raise ValueError(f"temperature must be > 0, got {self.temperature}")

    @property
    def beta_inv(self):
        return KB_OVER_HBAR * self.temperature

    @property
    def nu_max(self):
        # exp(-64) ~ 1e-28 relative
        return 8.0 * self.nu_c

    def j(self, nu):
        nu = np.asarray(nu, dtype=float)
        return self.alpha * nu**3 * np.exp(-((nu / self.nu_c) ** 2))


def spectral_density(nu, params):
    if np.any(np.asarray(nu) < 0):
        raise NegativeFrequency(f"spectral density needs nu >= 0, got {nu}")
    out = params.j(nu)
    return float(out) if np.ndim(out) == 0 else out


def bose_occupation(nu, beta_inv):
    nu = np.asarray(nu, dtype=float)
    if np.any(nu <= 0):
        raise NonPositiveFrequency(f"Bose occupation needs nu > 0, got {nu}")
    out = 1.0 / np.expm1(nu / beta_inv)
    return float(out) if out.ndim == 0 else out


def polaron_shift(params):
    """Closed form of ``-int_0^inf J(nu)/nu dnu``."""
    return -params.alpha * math.sqrt(math.pi) * params.nu_c**3 / 4.0


def _j_coth(nu, params, j=None):
    """``J(nu) coth(beta nu / 2)``, finite at nu = 0."""
    j = params.j if j is None else j
    nu = np.maximum(np.asarray(nu, dtype=float), _TINY_NU)
    return j(nu) / np.tanh(0.5 * nu / params.beta_inv)


def bath_correlation(tau, params, rtol=1e-8, j=None):
    """Phonon correlation function C(tau) by adaptive quadrature over nu.

    Uses QUADPACK's oscillatory weights for tau > 0, so the error estimate
    stays meaningful at large tau.
    """
    if tau < 0:
        raise ValueError(f"tau must be >= 0, got {tau}")
    jf = params.j if j is None else j
    if params.alpha == 0 and j is None:
        return 0j
    top = params.nu_max
    kw = dict(epsabs=0.0, epsrel=rtol, limit=500)
    if tau == 0:
        re, re_err = integrate.quad(lambda v: _j_coth(v, params, jf), 0, top, **kw)
        im, im_err = 0.0, 0.0
    else:
        re, re_err = integrate.quad(
            lambda v: _j_coth(v, params, jf), 0, top, weight="cos", wvar=tau, **kw
        )
        im, im_err = integrate.quad(jf, 0, top, weight="sin", wvar=tau, **kw)
        im = -im
    scale = math.hypot(re, im)
    err = math.hypot(re_err, im_err)
    # absolute floor: C(tau) is compared against C(0), not against itself
    floor = rtol * 1e-6 * float(_j_coth(params.nu_c, params, jf)) * params.nu_c
    if err > max(rtol * scale, floor):
        raise QuadratureNonConvergence(
            f"C({tau}) quadrature error {err:.2e} above tolerance", error_estimate=err
        )
    return complex(re, im)


def detailed_balance_rate(lam, params):
    """Frequency-domain value of Re F(lam).

    ``pi J(lam) (n(lam) + 1)`` for lam > 0 and ``pi J(|lam|) n(|lam|)`` for
    lam < 0; zero at lam = 0 for a density vanishing faster than nu.
    """
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    out = np.zeros_like(lam)
    nz = lam != 0
    w = np.abs(lam[nz])
    n = 1.0 / np.expm1(w / params.beta_inv)
    out[nz] = np.pi * params.j(w) * np.where(lam[nz] > 0, n + 1.0, n)
    return out if out.size > 1 else float(out[0])


def _gauss_panels(lo, hi, n_panels, order):
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(lo, hi, n_panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


@dataclass
class BathKernel:
    """Tabulated C(tau) on [0, tau_max] and its one-sided Fourier transform.

    ``F(lam) = int_0^tau_max exp(i lam tau) C(tau) dtau`` is evaluated with a
    composite Gauss-Legendre rule in tau; C at the tau nodes comes from a
    composite rule in nu. Panel widths are halved until the probe values of F
    change by less than ``tol`` times the scale ``int |C|``.
    """

    params: BathParams
    tau_max: float = 15.0
    tol: float = 1e-10
    j: object = None
    order: int = 16
    max_levels: int = 6
    _cache: dict = field(default_factory=dict, init=False, repr=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, init=False, repr=False)
    _table: tuple | None = field(default=None, init=False, repr=False)
    error_estimate: float = field(default=0.0, init=False)

    def __post_init__(self):
        if not self.tau_max > 0:
            raise ValueError("tau_max must be positive")
        if not self.tol > 0:
            raise ValueError("tol must be positive")

    def __getstate__(self):
        state = self.__dict__.copy()
        state.pop("_lock")
        return state

    def __setstate__(self, state):
        self.__dict__.update(state)
        self._lock = threading.Lock()

    @property
    def trivial(self):
        return self.j is None and self.params.alpha == 0

    def _correlation_on(self, taus, level):
        p = self.params
        jf = p.j if self.j is None else self.j
        # ~4 rad of phase per nu panel at the largest tau on level 0
        n_nu = max(8, math.ceil(p.nu_max * self.tau_max / 4.0)) * 2**level
        nu, w = _gauss_panels(0.0, p.nu_max, n_nu, self.order)
        wre = w * _j_coth(nu, p, jf)
        wim = w * jf(nu)
        out = np.empty(taus.size, dtype=complex)
        step = 512
        for s in range(0, taus.size, step):
            phase = np.outer(taus[s : s + step], nu)
            out[s : s + step] = np.cos(phase) @ wre - 1j * (np.sin(phase) @ wim)
        return out

    def _build(self, level):
        p = self.params
        n_tau = max(8, math.ceil(p.nu_max * self.tau_max / 4.0)) * 2**level
        taus, wt = _gauss_panels(0.0, self.tau_max, n_tau, self.order)
        c = self._correlation_on(taus, level)
        return taus, wt * c

    def _probe(self, table):
        taus, wc = table
        probes = self.params.nu_c * np.array([-2.0, -1.0, -0.25, 0.0, 0.25, 1.0, 2.0])
        return np.exp(1j * np.outer(probes, taus)) @ wc

    def table(self):
        if self._table is not None:
            return self._table
        with self._lock:
            if self._table is not None:
                return self._table
            prev = self._build(0)
            scale = float(np.sum(np.abs(prev[1]))) or 1.0
            err = math.inf
            for level in range(1, self.max_levels + 1):
                cur = self._build(level)
                err = float(np.max(np.abs(self._probe(cur) - self._probe(prev))))
                prev = cur
                if err <= self.tol * scale:
                    break
            else:
                raise QuadratureNonConvergence(
                    f"F(lambda) did not converge to {self.tol:.1e} (estimate {err / scale:.2e})",
                    error_estimate=err / scale,
                )
            self.error_estimate = err / scale
            c_end = abs(self._correlation_on(np.array([self.tau_max]), level)[0])
            c_0 = abs(self._correlation_on(np.array([0.0]), level)[0])
            if c_end > 1e-3 * c_0:
                warnings.warn(
                    f"|C(tau_max)| = {c_end:.2e} exceeds 1e-3 |C(0)| = {1e-3 * c_0:.2e}",
                    TruncationWarning,
                    stacklevel=3,
                )
            self._table = prev
            return prev

    def __call__(self, lam):
        return self.evaluate(np.atleast_1d(lam)).reshape(np.shape(lam))

    def evaluate(self, lams):
        """F at each entry of ``lams`` (any shape), served from the cache."""
        lams = np.asarray(lams, dtype=float)
        if self.trivial:
            return np.zeros(lams.shape, dtype=complex)
        keys = np.round(lams / _CACHE_QUANTUM).astype(np.int64)
        flat = keys.ravel()
        uniq, inverse = np.unique(flat, return_inverse=True)
        vals = np.empty(uniq.size, dtype=complex)
        missing = []
        for i, k in enumerate(uniq):
            hit = self._cache.get(int(k))
            if hit is None:
                missing.append(i)
            else:
                vals[i] = hit
        if missing:
            taus, wc = self.table()
            idx = np.array(missing)
            lam_m = uniq[idx] * _CACHE_QUANTUM
            new = np.exp(1j * np.outer(lam_m, taus)) @ wc
            vals[idx] = new
            with self._lock:
                for k, v in zip(uniq[idx], new):
                    self._cache.setdefault(int(k), complex(v))
        return vals[inverse].reshape(lams.shape)


def half_fourier(lam, kernel):
    """One-sided Fourier transform ``F(lam) = int_0^inf exp(i lam tau) C(tau) dtau``."""
    return complex(kernel.evaluate(np.array([lam]))[0])
