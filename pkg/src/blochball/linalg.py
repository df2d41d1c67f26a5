"""Dense complex matrix kernel backed by LAPACK via numpy.

Operator norms, Hermitian eigendecompositions, Kronecker products with a size
cap, and the permutation symmetrizer of the N-fold qubit space used by the
brute-force oracles.  All functions are pure and deterministic for fixed
inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .errors import CapacityError, DimensionError

# Result dimension cap for Kronecker products (guards runaway tensor builds).
DEFAULT_KRON_CAP = 1 << 14
# Site cap for full 2^N-dimensional oracle objects.
ORACLE_SITE_CAP = 10


def as_complex_matrix(a) -> np.ndarray:
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2:
        raise DimensionError(f"expected a 2-D matrix, got shape {m.shape}")
    return m


def _require_square(m: np.ndarray) -> None:
    if m.shape[0] != m.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {m.shape}")


def hermitian_deviation(a) -> float:
    m = as_complex_matrix(a)
    _require_square(m)
    return float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0


def hermitian_eigen(a) -> Tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and unitary eigenvectors of a Hermitian matrix.

    The input is symmetrized internally, so deviations from Hermiticity at
    rounding level are harmless.
    """
    m = as_complex_matrix(a)
    _require_square(m)
    w, v = np.linalg.eigh((m + m.conj().T) / 2.0)
    return w, v


def operator_norm(a) -> float:
    """Spectral norm (largest singular value) of a square matrix."""
    m = as_complex_matrix(a)
    _require_square(m)
    if m.size == 0:
        return 0.0
    scale = float(np.max(np.abs(m)))
    if scale == 0.0:
        return 0.0
    if hermitian_deviation(m) <= 1e-12 * max(1.0, scale):
        w = np.linalg.eigvalsh((m + m.conj().T) / 2.0)
        return float(max(abs(w[0]), abs(w[-1])))
    return float(np.linalg.svd(m, compute_uv=False)[0])


def kron(a, b, cap: int = DEFAULT_KRON_CAP) -> np.ndarray:
    """Kronecker product with a result-dimension cap."""
    ma, mb = as_complex_matrix(a), as_complex_matrix(b)
    rows = ma.shape[0] * mb.shape[0]
    cols = ma.shape[1] * mb.shape[1]
    if max(rows, cols) > cap:
        raise CapacityError(f"kron result {rows}x{cols} exceeds cap {cap}")
    return np.kron(ma, mb)


def kron_chain(factors, cap: int = DEFAULT_KRON_CAP) -> np.ndarray:
    """Left-to-right Kronecker product of a sequence of matrices."""
    factors = list(factors)
    if not factors:
        return np.eye(1, dtype=complex)
    out = as_complex_matrix(factors[0])
    for f in factors[1:]:
        out = kron(out, f, cap=cap)
    return out


@dataclass(frozen=True)
class FullTensorOperator:
    """Operator on the full N-fold qubit tensor space (2^N dimensional)."""

    n_sites: int
    matrix: np.ndarray

    def __post_init__(self):
        m = as_complex_matrix(self.matrix)
        dim = 1 << self.n_sites
        if m.shape != (dim, dim):
            raise DimensionError(
                f"matrix shape {m.shape} does not match 2^{self.n_sites}"
            )


def symmetrizer_full(n_sites: int, cap: int = ORACLE_SITE_CAP) -> FullTensorOperator:
    """Average of all N! permutation matrices on the N-fold qubit space.

    A permutation maps a basis bitstring to another bitstring with the same
    popcount, uniformly over its orbit, so the average is block constant:
    entry 1/C(N, k) between any two bitstrings of popcount k.  The result is
    the orthogonal projector onto the symmetric subspace.
    """
    if n_sites < 1:
        raise DimensionError("n_sites must be at least 1")
    if n_sites > cap:
        raise CapacityError(f"n_sites={n_sites} exceeds oracle cap {cap}")
    dim = 1 << n_sites
    pop = np.array([bin(i).count("1") for i in range(dim)])
    m = np.zeros((dim, dim), dtype=complex)
    for k in range(n_sites + 1):
        idx = np.nonzero(pop == k)[0]
        m[np.ix_(idx, idx)] = 1.0 / math.comb(n_sites, k)
    return FullTensorOperator(n_sites=n_sites, matrix=m)
