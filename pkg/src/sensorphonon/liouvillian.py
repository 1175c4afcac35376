"""Master-equation generator for the emitter-sensor system and its steady state."""

from __future__ import annotations

import enum
import hashlib
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .bath import BathKernel, BathParams, polaron_shift
from .errors import (
    DegenerateKernel,
    NegativeRate,
    NonHermitianCoupling,
    PositivityWarning,
    SingularSolve,
    StepSizeTooLarge,
)
from .model import CompositeModel
from .operators import (
    PROJ_EXCITED,
    EigenDecomposition,
    commutator_superop,
    dag,
    devec,
    hermitian_eig,
    is_hermitian,
    kron,
    sandwich_superop,
    spost,
    spre,
    vec,
)

POSITIVITY_TOL = 1e-6


class PhononMode(str, enum.Enum):
    """How the phonon dissipator is attached to the emitter-sensor system.

    JOINT    rate operator from the eigenbasis of the full emitter+sensor Hamiltonian
    ADDITIVE rate operator from the bare emitter Hamiltonian, lifted to the joint space
    OFF      no phonon dissipator
    """

    JOINT = "joint"
    ADDITIVE = "additive"
    OFF = "off"


@dataclass(frozen=True, eq=False)
class Liouvillian:
    matrix: np.ndarray
    mode: PhononMode
    dim: int
    fingerprint: str = ""

    @property
    def norm(self):
        return float(np.max(np.abs(self.matrix)))

    def apply(self, rho):
        return devec(self.matrix @ vec(rho), self.dim)


def lindblad_dissipator(c, rate):
    """Superoperator of ``(rate/2) (2 c rho c^+ - c^+ c rho - rho c^+ c)``."""
    if rate < 0:
        raise NegativeRate(f"rate must be >= 0, got {rate}")
    c = np.asarray(c, dtype=complex)
    cd = dag(c)
    cdc = cd @ c
    return 0.5 * rate * (2.0 * sandwich_superop(c, cd) - spre(cdc) - spost(cdc))


def rate_operator(decomp: EigenDecomposition, a, kernel: BathKernel):
    """``Z = sum_ab <a|A|b> F(-(e_a - e_b)) |a><b|`` in the original basis."""
    a_eig = decomp.to_eigenbasis(a)
    f = kernel.evaluate(-decomp.gaps)
    return decomp.from_eigenbasis(a_eig * f)


def phonon_dissipator(a, z):
    """Superoperator of ``K(rho) = -[A, Z rho] + [A, rho Z^+]``."""
    a = np.asarray(a, dtype=complex)
    if not is_hermitian(a):
        raise NonHermitianCoupling("phonon coupling operator must be Hermitian")
    zd = dag(z)
    return (
        -spre(a @ z)
        + sandwich_superop(z, a)
        + sandwich_superop(a, zd)
        - spost(zd @ a)
    )


def _fingerprint(model, bath, mode, kernel):
    parts = [
        repr(model.emitter),
        repr(model.sensors),
        repr(bath),
        mode.value,
        f"{kernel.tau_max!r}/{kernel.tol!r}" if kernel is not None else "-",
    ]
    return hashlib.sha256("|".join(parts).encode()).hexdigest()[:16]


def build_liouvillian(
    model: CompositeModel,
    bath: BathParams | None,
    mode=PhononMode.JOINT,
    kernel: BathKernel | None = None,
    counterterm=True,
):
    """Full generator: coherent part, phonon dissipator, radiative and sensor decay.

    With ``counterterm`` the polaron shift produced by the phonon dissipator is
    cancelled by ``+delta_P A`` subtracted from the Hamiltonian, so that zero
    emitter detuning means driving the polaron-shifted transition.
    """
    mode = PhononMode(mode)
    h = model.h_prime
    phonons = mode is not PhononMode.OFF and bath is not None and bath.alpha > 0
    if phonons and counterterm:
        h = h - polaron_shift(bath) * model.a
    mat = -1j * commutator_superop(h)
    for c, rate in model.collapse:
        mat = mat + lindblad_dissipator(c, rate)

    if phonons:
        if kernel is None:
            kernel = BathKernel(bath)
        if mode is PhononMode.JOINT:
            z = rate_operator(hermitian_eig(model.h_prime), model.a, kernel)
        else:
            h_bare = model.emitter.hamiltonian()
            z_bare = rate_operator(hermitian_eig(h_bare), PROJ_EXCITED, kernel)
            z = kron(z_bare, np.eye(model.dim // 2))
        mat = mat + phonon_dissipator(model.a, z)
    return Liouvillian(
        matrix=mat,
        mode=mode,
        dim=model.dim,
        fingerprint=_fingerprint(model, bath, mode, kernel),
    )


def steady_state(l: Liouvillian, check_positivity=True):
    """Unique steady state from the bordered system (trace row replaces row 0)."""
    d = l.dim
    m = np.array(l.matrix, dtype=complex)
    trace_row = vec(np.eye(d)).real
    m[0, :] = trace_row
    rhs = np.zeros(d * d, dtype=complex)
    rhs[0] = 1.0
    try:
        lu, piv = sla.lu_factor(m, check_finite=True)
    except (ValueError, sla.LinAlgError) as exc:
        raise SingularSolve(str(exc)) from exc
    anorm = np.linalg.norm(m, 1)
    rcond, info = sla.lapack.zgecon(lu, anorm, norm="1")
    if info != 0 or not np.isfinite(rcond):
        raise SingularSolve(f"condition estimate failed (info={info})")
    if rcond < 1e-14:
        raise DegenerateKernel(
            f"steady state not unique (rcond {rcond:.1e}); a sector is decoupled"
        )
    x = sla.lu_solve((lu, piv), rhs)
    # one step of iterative refinement
    r = rhs - m @ x
    x = x + sla.lu_solve((lu, piv), r)

    rho = devec(x, d)
    rho = 0.5 * (rho + dag(rho))
    rho = rho / np.trace(rho).real
    if check_positivity:
        low = float(np.min(np.linalg.eigvalsh(rho)))
        if low < -POSITIVITY_TOL:
            warnings.warn(
                f"steady state has eigenvalue {low:.2e}; the non-secular phonon "
                "dissipator does not guarantee positivity",
                PositivityWarning,
                stacklevel=2,
            )
    return rho


def time_evolve_oracle(l: Liouvillian, rho0, t_end, dt, tol=1e-10):
    """Classical RK4 propagation of ``vec(rho)`` to ``t_end``.

    For a linear generator one RK4 step is the fixed polynomial
    ``P(L dt) = 1 + L dt + (L dt)^2/2 + (L dt)^3/6 + (L dt)^4/24``; the step
    count is applied by repeated squaring so long horizons stay cheap.
    """
    if t_end < 0 or dt <= 0:
        raise ValueError("need t_end >= 0 and dt > 0")
    if t_end == 0:
        return np.array(rho0, dtype=complex)
    n_steps = int(np.ceil(t_end / dt))
    dt = t_end / n_steps
    radius = float(np.max(np.abs(np.linalg.eigvals(l.matrix))))
    estimate = n_steps * (radius * dt) ** 5 / 120.0
    if estimate > tol or radius * dt > 2.5:
        raise StepSizeTooLarge(
            f"dt = {dt:.3e} gives error estimate {estimate:.2e} (spectral radius {radius:.3e})"
        )
    x = l.matrix * dt
    eye = np.eye(x.shape[0])
    x2 = x @ x
    step = eye + x + x2 / 2.0 + x2 @ x / 6.0 + x2 @ x2 / 24.0
    v = vec(np.asarray(rho0, dtype=complex))
    n = n_steps
    power = step
    while n:
        if n & 1:
            v = power @ v
        n >>= 1
        if n:
            power = power @ power
    return devec(v, l.dim)
