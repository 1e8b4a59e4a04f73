"""FHRR hypervector algebra on complex128 numpy arrays.

A hypervector is a 1-D ``np.ndarray`` of dtype complex128. Random symbol
vectors are phasors (unit modulus per component); memories built by bundling
and decay are general complex vectors.
"""
from __future__ import annotations

import warnings

import numpy as np

Hypervector = np.ndarray

# |x| below this is treated as zero when deciding whether a cosine is defined
NORM_EPS = 1e-12
PHASOR_TOL = 1e-6


class DimensionMismatchError(ValueError):
    pass


class ZeroNormError(ValueError):
    pass


def _check_dims(a: Hypervector, b: Hypervector) -> None:
    if a.shape[-1] != b.shape[-1]:
        raise DimensionMismatchError(f"dimension mismatch: {a.shape[-1]} != {b.shape[-1]}")


def random_phasor(dim: int, rng: np.random.Generator) -> Hypervector:
    """Draw ``exp(i*theta)`` with theta ~ U[0, 2pi) per component."""
    if dim < 1:
        raise ValueError(f"dim must be >= 1, got {dim}")
    theta = rng.uniform(0.0, 2.0 * np.pi, size=dim)
    return np.exp(1j * theta)


def zeros(dim: int) -> Hypervector:
    return np.zeros(dim, dtype=np.complex128)


def is_phasor(a: Hypervector, tol: float = PHASOR_TOL) -> bool:
    return bool(np.all(np.abs(np.abs(a) - 1.0) <= tol))


def bind(a: Hypervector, b: Hypervector) -> Hypervector:
    _check_dims(a, b)
    return a * b


def unbind(m: Hypervector, k: Hypervector) -> Hypervector:
    """Retrieve from ``m`` with key ``k`` by multiplying with ``conj(k)``.

    Exact inverse of :func:`bind` only when ``k`` is a phasor; a warning is
    raised otherwise.
    """
    _check_dims(m, k)
    if not is_phasor(k):
        warnings.warn("unbind key is not a phasor; conjugate unbinding is approximate",
                      RuntimeWarning, stacklevel=2)
    return m * np.conj(k)


def bundle(a: Hypervector, b: Hypervector) -> Hypervector:
    _check_dims(a, b)
    return a + b


def scale(a: Hypervector, c: float) -> Hypervector:
    return a * c


def norms(a: np.ndarray) -> np.ndarray:
    """L2 norm over the last axis; fast path for contiguous complex128."""
    if a.dtype == np.complex128 and a.flags.c_contiguous:
        flat = a.view(np.float64)
        return np.sqrt(np.einsum("...j,...j->...", flat, flat))
    return np.linalg.norm(a, axis=-1)


def l2_norm(a: Hypervector) -> float:
    return float(norms(a))


def cosine_sim(a: Hypervector, b: Hypervector) -> float:
    """Modulus of the Hermitian inner product over the product of norms.

    Raises :class:`ZeroNormError` if either input has (numerically) zero norm.
    """
    _check_dims(a, b)
    na, nb = l2_norm(a), l2_norm(b)
    if na <= NORM_EPS or nb <= NORM_EPS:
        raise ZeroNormError("cosine similarity undefined for a zero-norm vector")
    return abs(np.vdot(b, a)) / (na * nb)
