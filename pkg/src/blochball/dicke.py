"""The symmetric subspace of N qubits and the bulk quantization map.

The symmetric subspace is spanned by the Dicke vectors, indexed here by the
number ``n`` of down spins (``n = 0`` is the all-up, highest-weight state).
A degree-L monomial in x, y, z quantizes to the permutation average of the
corresponding Pauli tensor padded with identities; restricted to the
symmetric subspace this equals

    (1 / (N)_L) * sum over pairwise-distinct sites of sigma products,

with ``(N)_L`` the falling factorial.  The distinct-site sums reduce to
ordered products of the collective operators ``C_a = sum_i sigma_a(i)``
through the single-site relation ``sigma_a sigma_b = delta_ab I +
i eps_abc sigma_c``; ``quantize_bulk`` evaluates that reduction recursively
with memoization on the multiset of remaining labels.  ``quantize_bulk_oracle``
builds the same operator from the literal 2^N-dimensional tensors instead and
is capped at small N.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Dict, Sequence, Tuple

import numpy as np

from . import linalg
from .errors import CapacityError, DimensionError, DomainError
from .poly3 import Polynomial3

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
IDENTITY_2 = np.eye(2, dtype=complex)
PAULI = (SIGMA_X, SIGMA_Y, SIGMA_Z)

# eps[a][b] = (c, sign) with eps_abc = sign, or None when a == b.
_EPS = {
    (0, 1): (2, 1.0),
    (1, 2): (0, 1.0),
    (2, 0): (1, 1.0),
    (1, 0): (2, -1.0),
    (2, 1): (0, -1.0),
    (0, 2): (1, -1.0),
}


@dataclass(frozen=True)
class DickeSpace:
    """Symmetric subspace of N qubits; dimension N + 1."""

    n_sites: int

    def __post_init__(self):
        if self.n_sites < 1:
            raise DomainError("n_sites must be at least 1")

    @property
    def dim(self) -> int:
        return self.n_sites + 1


@dataclass(frozen=True)
class SymOperator:
    """Dense operator on the Dicke basis of a :class:`DickeSpace`."""

    space: DickeSpace
    matrix: np.ndarray

    def __post_init__(self):
        m = linalg.as_complex_matrix(self.matrix)
        if m.shape != (self.space.dim, self.space.dim):
            raise DimensionError(
                f"matrix shape {m.shape} does not match Dicke dimension {self.space.dim}"
            )

    def norm(self) -> float:
        return linalg.operator_norm(self.matrix)

    def to_json(self) -> str:
        return json.dumps(
            {
                "n_sites": self.space.n_sites,
                "re": self.matrix.real.tolist(),
                "im": self.matrix.imag.tolist(),
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "SymOperator":
        data = json.loads(text)
        m = np.array(data["re"], dtype=float) + 1j * np.array(data["im"], dtype=float)
        return cls(space=DickeSpace(data["n_sites"]), matrix=m)


@dataclass(frozen=True)
class CollectiveOps:
    """Spin-N/2 angular momentum matrices in the Dicke basis."""

    space: DickeSpace
    jx: SymOperator
    jy: SymOperator
    jz: SymOperator


def collective_ops(n_sites: int) -> CollectiveOps:
    """Collective spin matrices; ``jz`` is diagonal with entries (N - 2n)/2."""
    space = DickeSpace(n_sites)
    n = np.arange(n_sites + 1)
    jz = np.diag((n_sites - 2 * n) / 2.0).astype(complex)
    # Raising operator: |n> -> sqrt(n (N - n + 1)) |n - 1>.
    up = np.zeros((space.dim, space.dim), dtype=complex)
    for k in range(1, space.dim):
        up[k - 1, k] = math.sqrt(k * (n_sites - k + 1))
    down = up.conj().T
    jx = (up + down) / 2.0
    jy = (up - down) / (2.0j)
    return CollectiveOps(
        space=space,
        jx=SymOperator(space, jx),
        jy=SymOperator(space, jy),
        jz=SymOperator(space, jz),
    )


def falling_factorial(n: int, k: int) -> int:
    out = 1
    for i in range(k):
        out *= n - i
    return out


_collective_cache: Dict[int, Tuple[np.ndarray, np.ndarray, np.ndarray]] = {}
_distinct_cache: Dict[Tuple[int, int, int, int], np.ndarray] = {}


def _collective_paulis(n_sites: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """The operators C_a = sum_i sigma_a(i) = 2 J_a on the Dicke basis."""
    cached = _collective_cache.get(n_sites)
    if cached is not None:
        return cached
    ops = collective_ops(n_sites)
    cs = tuple(2.0 * j.matrix for j in (ops.jx, ops.jy, ops.jz))
    for c in cs:
        c.setflags(write=False)
    return _collective_cache.setdefault(n_sites, cs)


def _distinct_site_sum(n_sites: int, counts: Tuple[int, int, int]) -> np.ndarray:
    """Sum over pairwise-distinct sites of Pauli products on the Dicke basis.

    ``counts`` gives how many sigma_x, sigma_y, sigma_z factors appear; the
    result is independent of their arrangement because distinct-site factors
    commute.  Recursion: peeling one factor with label ``a`` off the multiset
    ``m`` satisfies

        D(m + e_a) = C_a D(m)
                     - sum_b m_b [ delta_ab (N - |m| + 1) D(m - e_b)
                                   + i eps_abc D(m - e_b + e_c) ].
    """
    key = (n_sites, *counts)
    cached = _distinct_cache.get(key)
    if cached is not None:
        return cached
    total = sum(counts)
    if total == 0:
        value = np.eye(n_sites + 1, dtype=complex)
    else:
        cs = _collective_paulis(n_sites)
        a = next(i for i in range(3) if counts[i] > 0)
        m = list(counts)
        m[a] -= 1
        k = total - 1
        value = cs[a] @ _distinct_site_sum(n_sites, tuple(m))
        for b in range(3):
            if m[b] == 0:
                continue
            shrunk = list(m)
            shrunk[b] -= 1
            if a == b:
                value = value - m[b] * (n_sites - k + 1) * _distinct_site_sum(
                    n_sites, tuple(shrunk)
                )
            else:
                c, sign = _EPS[(a, b)]
                shifted = list(shrunk)
                shifted[c] += 1
                value = value - m[b] * 1j * sign * _distinct_site_sum(
                    n_sites, tuple(shifted)
                )
    value.setflags(write=False)
    return _distinct_cache.setdefault(key, value)


def clear_caches() -> None:
    """Drop memoized collective operators and distinct-site sums."""
    _collective_cache.clear()
    _distinct_cache.clear()


def quantize_bulk(p: Polynomial3, n_sites: int) -> SymOperator:
    """Bulk quantization of a polynomial, restricted to the Dicke basis.

    Linear in ``p``; monomials of degree above N map to zero.  The constant 1
    maps to the identity, and real polynomials give Hermitian matrices.
    """
    space = DickeSpace(n_sites)
    out = np.zeros((space.dim, space.dim), dtype=complex)
    for mono, coeff in p.sorted_terms():
        degree = mono.degree
        if degree > n_sites:
            continue
        block = _distinct_site_sum(n_sites, (mono.ax, mono.ay, mono.az))
        out = out + (complex(coeff) / falling_factorial(n_sites, degree)) * block
    return SymOperator(space, out)


def dicke_isometry(n_sites: int, cap: int = linalg.ORACLE_SITE_CAP) -> np.ndarray:
    """Isometry from the Dicke basis into the full 2^N tensor space.

    Column ``n`` is the normalized sum of the basis bitstrings with ``n`` down
    spins (bit convention: set bits mark down spins, first tensor factor is
    the most significant bit).  Columns are orthonormal and every permutation
    matrix fixes them.
    """
    if n_sites > cap:
        raise CapacityError(f"n_sites={n_sites} exceeds oracle cap {cap}")
    dim = 1 << n_sites
    v = np.zeros((dim, n_sites + 1), dtype=complex)
    for idx in range(dim):
        n = bin(idx).count("1")
        v[idx, n] = 1.0 / math.sqrt(math.comb(n_sites, n))
    return v


def quantize_bulk_oracle(p: Polynomial3, n_sites: int) -> SymOperator:
    """Brute-force bulk quantization through the full tensor space.

    Builds the padded Pauli tensor for each monomial in the 2^N-dimensional
    space and compresses it with the Dicke isometry V.  Permutations fix the
    Dicke vectors, so the compression of the raw tensor equals the compression
    of its permutation average; the small-N equivalence with the literal
    average is covered by tests.  Capped at N <= 10.
    """
    if n_sites > linalg.ORACLE_SITE_CAP:
        raise CapacityError(
            f"n_sites={n_sites} exceeds oracle cap {linalg.ORACLE_SITE_CAP}"
        )
    space = DickeSpace(n_sites)
    v = dicke_isometry(n_sites)
    out = np.zeros((space.dim, space.dim), dtype=complex)
    for mono, coeff in p.sorted_terms():
        degree = mono.degree
        if degree > n_sites:
            continue
        factors = (
            [SIGMA_X] * mono.ax
            + [SIGMA_Y] * mono.ay
            + [SIGMA_Z] * mono.az
            + [IDENTITY_2] * (n_sites - degree)
        )
        tensor = linalg.kron_chain(factors)
        out = out + complex(coeff) * (v.conj().T @ tensor @ v)
    return SymOperator(space, out)


def product_state_expectation(
    p: Polynomial3, bloch: Sequence[float], n_sites: int
) -> float | complex:
    """Expectation of the quantized polynomial in the N-fold product state.

    For the product state with single-site Bloch vector ``r`` the expectation
    of a quantized degree-L monomial factorizes into ``r_{j_1} ... r_{j_L}``
    when ``L <= N`` and vanishes otherwise, so the result is the polynomial
    evaluated at ``r`` with terms of degree above N dropped.  Returns a float
    for real polynomials.
    """
    r = np.asarray(bloch, dtype=float)
    if r.shape != (3,):
        raise DomainError("bloch vector must have three components")
    norm = float(np.linalg.norm(r))
    if norm > 1.0 + 1e-12:
        raise DomainError(f"bloch vector norm {norm} exceeds 1")
    DickeSpace(n_sites)
    total: complex = 0j
    for mono, coeff in p.sorted_terms():
        if mono.degree > n_sites:
            continue
        total += complex(coeff) * (r[0] ** mono.ax) * (r[1] ** mono.ay) * (
            r[2] ** mono.az
        )
    if p.is_real():
        return total.real
    return total


def rotation_sym(u: np.ndarray, n_sites: int) -> np.ndarray:
    """Restriction of the N-fold tensor power of an SU(2) element to the Dicke basis.

    Obtained by exponentiating the collective generators along the axis-angle
    form of ``u``, which matches the compression of the tensor power including
    its overall phase.
    """
    u = linalg.as_complex_matrix(u)
    if u.shape != (2, 2):
        raise DimensionError("expected a 2x2 matrix")
    cos_half = 0.5 * np.trace(u).real
    axis_sin = np.array([0.5j * np.trace(s @ u) for s in PAULI]).real
    sin_half = float(np.linalg.norm(axis_sin))
    dim = n_sites + 1
    if sin_half < 1e-14:
        # u is +/- identity up to rounding; the tensor power is a phase.
        return (np.sign(cos_half) ** n_sites) * np.eye(dim, dtype=complex)
    angle = 2.0 * math.atan2(sin_half, cos_half)
    axis = axis_sin / sin_half
    ops = collective_ops(n_sites)
    generator = axis[0] * ops.jx.matrix + axis[1] * ops.jy.matrix + axis[2] * ops.jz.matrix
    w, vecs = linalg.hermitian_eigen(generator)
    phases = np.exp(-1j * angle * w)
    return (vecs * phases) @ vecs.conj().T
