"""Dense operator algebra on small Hilbert spaces.

Operators are plain square ``complex128`` numpy arrays. Superoperators act on
column-stacked density matrices::

    vec(rho) = rho.reshape(-1, order="F")
    vec(a @ rho @ b) = kron(b.T, a) @ vec(rho)

Every superoperator in the package is built from :func:`sandwich_superop`, so
this is the only place the convention lives.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np

from .errors import DimensionMismatch, NonHermitianInput

HERMITICITY_TOL = 1e-10

# two-level building blocks, basis order (|g>, |e>) / (|0>, |1>)
SIGMA_MINUS = np.array([[0, 1], [0, 0]], dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
PROJ_EXCITED = np.array([[0, 0], [0, 1]], dtype=complex)
IDENTITY2 = np.eye(2, dtype=complex)


def _square(a, name="operand"):
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"{name} must be square, got shape {a.shape}")
    return a


def kron(a, b):
    """Kronecker product of two square operators."""
    return np.kron(_square(a, "a"), _square(b, "b"))


def kron_all(ops):
    return reduce(kron, ops)


def lift(op, site, dims):
    """Embed ``op`` acting on factor ``site`` into the tensor product ``dims``."""
    factors = [np.eye(d, dtype=complex) for d in dims]
    factors[site] = _square(op)
    return kron_all(factors)


def dag(a):
    return np.conj(np.transpose(a))


def commutator(a, b):
    return a @ b - b @ a


def max_norm(a):
    return float(np.max(np.abs(a))) if np.size(a) else 0.0


def hermiticity_error(a):
    return max_norm(a - dag(a))


def is_hermitian(a, rtol=HERMITICITY_TOL):
    return hermiticity_error(a) <= rtol * max(max_norm(a), 1.0)


@dataclass(frozen=True)
class EigenDecomposition:
    """Ascending eigenvalues and orthonormal eigenvector columns."""

    values: np.ndarray
    vectors: np.ndarray

    @property
    def gaps(self):
        """``gaps[a, b] = values[a] - values[b]``."""
        return self.values[:, None] - self.values[None, :]

    def reconstruct(self):
        return (self.vectors * self.values) @ dag(self.vectors)

    def to_eigenbasis(self, op):
        return dag(self.vectors) @ op @ self.vectors

    def from_eigenbasis(self, op):
        return self.vectors @ op @ dag(self.vectors)


def hermitian_eig(h, rtol=HERMITICITY_TOL):
    h = _square(h, "h")
    scale = max(max_norm(h), 1.0)
    err = hermiticity_error(h)
    if err > rtol * scale:
        raise NonHermitianInput(f"asymmetry {err:.3e} exceeds {rtol:.1e} * {scale:.3e}")
    h = 0.5 * (h + dag(h))
    values, vectors = np.linalg.eigh(h)
    # fix the phase: first significant component real and positive
    for k in range(vectors.shape[1]):
        col = vectors[:, k]
        idx = int(np.argmax(np.abs(col) > 1e-8))
        phase = col[idx] / abs(col[idx])
        vectors[:, k] = col / phase
    return EigenDecomposition(values=values, vectors=vectors)


def vec(rho):
    return np.asarray(rho).reshape(-1, order="F")


def devec(v, dim=None):
    v = np.asarray(v)
    if dim is None:
        dim = int(round(np.sqrt(v.size)))
    if dim * dim != v.size:
        raise DimensionMismatch(f"vector of length {v.size} is not a square operator")
    return v.reshape((dim, dim), order="F")


def sandwich_superop(a, b):
    """Matrix of ``rho -> a @ rho @ b``."""
    a = _square(a, "a")
    b = _square(b, "b")
    if a.shape != b.shape:
        raise DimensionMismatch(f"dims differ: {a.shape[0]} vs {b.shape[0]}")
    return np.kron(b.T, a)


def spre(a):
    a = _square(a)
    return sandwich_superop(a, np.eye(a.shape[0]))


def spost(b):
    b = _square(b)
    return sandwich_superop(np.eye(b.shape[0]), b)


def commutator_superop(h):
    """Matrix of ``rho -> [h, rho]``."""
    return spre(h) - spost(h)
