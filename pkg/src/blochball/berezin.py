"""Spin coherent states and the boundary (Berezin) quantization of the sphere.

The boundary map sends a polynomial restricted to the sphere to

    (N + 1) / (4 pi) * integral of f(Omega) |Omega><Omega|_N dOmega,

realized with a product quadrature that is exact for the trigonometric
integrands involved (Gauss-Legendre in cos(theta), uniform in phi).  The
coherent-state amplitudes factor as A_n(theta) e^(i n phi), so the integral
reduces to a band of nonzero diagonals of width deg(f); the banded assembly
below is an exact regrouping of the quadrature sum.

Also provides the inverse of the boundary map on sphere polynomials of degree
at most N (a dense linear solve over the harmonic basis), the SU(2) to SO(3)
covering map, and the coherent-state covariance deviation.
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence, Tuple

import numpy as np

from . import linalg
from .dicke import DickeSpace, PAULI, SymOperator, rotation_sym
from .errors import ConfigurationError, DomainError, InternalConsistencyError
from .poly3 import Polynomial3, restrict_basis

logger = logging.getLogger(__name__)

# Extra quadrature exactness beyond the minimum 2N + deg(f).
DEFAULT_QUADRATURE_MARGIN = 2


@dataclass(frozen=True)
class SpherePoint:
    """Point on the unit sphere in polar angles.

    ``theta`` in [0, pi], ``phi`` in (-pi, pi]; tiny excursions are folded
    back, anything larger raises.
    """

    theta: float
    phi: float

    def __post_init__(self):
        theta = float(self.theta)
        phi = float(self.phi)
        if theta < -1e-9 or theta > math.pi + 1e-9:
            raise DomainError(f"theta={theta} outside [0, pi]")
        theta = min(max(theta, 0.0), math.pi)
        # Fold phi into (-pi, pi].
        phi = math.remainder(phi, 2.0 * math.pi)
        if phi <= -math.pi:
            phi = math.pi
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "phi", phi)

    @classmethod
    def from_vector(cls, v: Sequence[float]) -> "SpherePoint":
        v = np.asarray(v, dtype=float)
        norm = float(np.linalg.norm(v))
        if abs(norm - 1.0) > 1e-9:
            raise DomainError(f"vector norm {norm} is not 1")
        v = v / norm
        return cls(theta=math.acos(min(1.0, max(-1.0, v[2]))), phi=math.atan2(v[1], v[0]))

    def unit_vector(self) -> np.ndarray:
        s = math.sin(self.theta)
        return np.array(
            [s * math.cos(self.phi), s * math.sin(self.phi), math.cos(self.theta)]
        )


NORTH_POLE = SpherePoint(theta=0.0, phi=0.0)


@dataclass(frozen=True)
class CoherentState:
    """N-fold product of a single-spin coherent state, in the Dicke basis."""

    space: DickeSpace
    amplitudes: np.ndarray


def coherent_state(point: SpherePoint, n_sites: int) -> CoherentState:
    """Coherent state pointing along ``point``.

    Amplitude at Dicke index n (n down spins) is
    ``sqrt(C(N, n)) cos(theta/2)^(N-n) (e^(i phi) sin(theta/2))^n``.
    """
    space = DickeSpace(n_sites)
    c = math.cos(point.theta / 2.0)
    s = math.sin(point.theta / 2.0)
    n = np.arange(n_sites + 1)
    mags = np.array(
        [math.sqrt(math.comb(n_sites, k)) * c ** (n_sites - k) * s ** k for k in n]
    )
    amps = mags * np.exp(1j * point.phi * n)
    return CoherentState(space=space, amplitudes=amps)


class SphereQuadrature:
    """Product quadrature on the sphere, exact up to a stated polynomial degree.

    Gauss-Legendre nodes in u = cos(theta) and a uniform grid in phi; weights
    sum to 4 pi.  ``thetas``, ``phis`` and ``weights`` are the flattened node
    arrays (theta-major).
    """

    def __init__(self, exact_degree: int):
        if exact_degree < 0:
            raise DomainError("exact_degree must be non-negative")
        self.exact_degree = int(exact_degree)
        n_u = max(1, (exact_degree + 2) // 2)
        n_phi = max(1, exact_degree + 1)
        u, w_u = np.polynomial.legendre.leggauss(n_u)
        self.u_nodes = u
        self.u_weights = w_u
        self.phi_nodes = -math.pi + 2.0 * math.pi * (np.arange(n_phi) + 1) / n_phi
        self.phi_weight = 2.0 * math.pi / n_phi
        self.thetas = np.repeat(np.arccos(u), n_phi)
        self.phis = np.tile(self.phi_nodes, n_u)
        self.weights = np.repeat(w_u * self.phi_weight, n_phi)

    @property
    def nodes(self) -> Tuple[SpherePoint, ...]:
        return tuple(
            SpherePoint(theta=t, phi=p) for t, p in zip(self.thetas, self.phis)
        )

    def integrate(self, f) -> float | complex:
        """Quadrature sum of ``f(theta, phi)`` (vectorised callable)."""
        values = f(self.thetas, self.phis)
        return (self.weights * values).sum()

    def integrate_polynomial(self, p: Polynomial3) -> float | complex:
        s = np.sin(self.thetas)
        vals = p.evaluate_many(
            s * np.cos(self.phis), s * np.sin(self.phis), np.cos(self.thetas)
        )
        return (self.weights * vals).sum()

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["theta", "phi", "weight"])
            for t, p, w in zip(self.thetas, self.phis, self.weights):
                writer.writerow([format(t, ".17g"), format(p, ".17g"), format(w, ".17g")])


def gauss_sphere_quadrature(exact_degree: int) -> SphereQuadrature:
    """Quadrature integrating sphere polynomials of degree <= exact_degree exactly."""
    return SphereQuadrature(exact_degree)


def _amplitude_magnitudes(n_sites: int, u: np.ndarray) -> np.ndarray:
    """Matrix A[n, i] = sqrt(C(N, n)) cos(theta_i/2)^(N-n) sin(theta_i/2)^n."""
    c = np.sqrt((1.0 + u) / 2.0)
    s = np.sqrt((1.0 - u) / 2.0)
    n = np.arange(n_sites + 1)[:, None]
    sqrt_binom = np.array([math.sqrt(math.comb(n_sites, k)) for k in range(n_sites + 1)])
    return sqrt_binom[:, None] * c[None, :] ** (n_sites - n) * s[None, :] ** n


def _check_quadrature(q: SphereQuadrature, n_sites: int, degree: int) -> None:
    needed = 2 * n_sites + degree
    if q.exact_degree < needed:
        raise ConfigurationError(
            f"quadrature exact_degree={q.exact_degree} below the {needed} required "
            f"for N={n_sites}, deg(f)={degree}"
        )


def _boundary_matrix_real(
    f: Polynomial3, n_sites: int, quad: SphereQuadrature
) -> np.ndarray:
    """Banded quadrature assembly for a real-coefficient polynomial."""
    degree = f.degree()
    u = quad.u_nodes
    amp = _amplitude_magnitudes(n_sites, u)
    sin_theta = np.sqrt(np.maximum(0.0, 1.0 - u * u))
    fvals = f.evaluate_many(
        sin_theta[:, None] * np.cos(quad.phi_nodes)[None, :],
        sin_theta[:, None] * np.sin(quad.phi_nodes)[None, :],
        np.broadcast_to(u[:, None], (u.size, quad.phi_nodes.size)),
    ).astype(float)
    dim = n_sites + 1
    out = np.zeros((dim, dim), dtype=complex)
    prefactor = (n_sites + 1) / (4.0 * math.pi)
    max_band = min(degree, n_sites)
    for d in range(max_band + 1):
        # Phi sum against e^(-i d phi); rows n, columns n + d.
        phase = np.exp(-1j * d * quad.phi_nodes) * quad.phi_weight
        g = fvals @ phase
        rows = np.arange(dim - d)
        band = ((amp[rows, :] * amp[rows + d, :]) * (quad.u_weights * g)[None, :]).sum(
            axis=1
        )
        out[rows, rows + d] = prefactor * band
        if d > 0:
            out[rows + d, rows] = np.conj(prefactor * band)
    return out


def quantize_boundary(
    f: Polynomial3, n_sites: int, quadrature: SphereQuadrature | None = None
) -> SymOperator:
    """Boundary quantization of a polynomial restricted to the sphere.

    Hermitian for real ``f``, positive semidefinite for ``f`` nonnegative on
    the sphere, and exactly the identity for ``f = 1``.  The quadrature must
    be exact to degree ``2 N + deg(f)``; by default one is built with a small
    margin on top of that.
    """
    space = DickeSpace(n_sites)
    degree = f.degree()
    if quadrature is None:
        quadrature = gauss_sphere_quadrature(
            2 * n_sites + degree + DEFAULT_QUADRATURE_MARGIN
        )
    _check_quadrature(quadrature, n_sites, degree)
    if f.is_real():
        matrix = _boundary_matrix_real(f.real_part(), n_sites, quadrature)
    else:
        matrix = _boundary_matrix_real(
            f.real_part(), n_sites, quadrature
        ) + 1j * _boundary_matrix_real(f.imag_part(), n_sites, quadrature)
    return SymOperator(space, matrix)


def quantize_boundary_dense(
    f: Polynomial3, n_sites: int, quadrature: SphereQuadrature | None = None
) -> SymOperator:
    """Reference implementation summing weighted coherent projectors node by node.

    Mathematically identical to :func:`quantize_boundary`; quadratic in the
    node count, intended for cross-checks at small N.
    """
    space = DickeSpace(n_sites)
    degree = f.degree()
    if quadrature is None:
        quadrature = gauss_sphere_quadrature(
            2 * n_sites + degree + DEFAULT_QUADRATURE_MARGIN
        )
    _check_quadrature(quadrature, n_sites, degree)
    s = np.sin(quadrature.thetas)
    fvals = f.evaluate_many(
        s * np.cos(quadrature.phis), s * np.sin(quadrature.phis), np.cos(quadrature.thetas)
    )
    n = np.arange(n_sites + 1)
    mags = _amplitude_magnitudes(n_sites, np.cos(quadrature.thetas))
    amps = mags * np.exp(1j * np.outer(n, quadrature.phis))
    weighted = amps * (quadrature.weights * fvals)[None, :]
    matrix = (n_sites + 1) / (4.0 * math.pi) * (weighted @ amps.conj().T)
    return SymOperator(space, matrix)


def berezin_property_residual(
    f: Polynomial3,
    point: SpherePoint,
    n_sites: int,
    quadrature: SphereQuadrature | None = None,
) -> float:
    """Deviation of the coherent-state average of the quantized f from f at the point.

    The average equals the expectation of the boundary quantization in the
    coherent state at ``point``; it converges to ``f(point)`` as N grows.
    """
    q = quantize_boundary(f, n_sites, quadrature)
    v = coherent_state(point, n_sites).amplitudes
    value = complex(v.conj() @ (q.matrix @ v))
    return abs(value - complex(f.evaluate(point.unit_vector())))


@lru_cache(maxsize=32)
def boundary_map_matrix(n_sites: int) -> np.ndarray:
    """Matrix of the boundary map on the sphere-polynomial basis.

    Column k holds the flattened quantization of the k-th element of
    ``restrict_basis(N)``; shape ``(N+1)^2 x (N+1)^2``.
    """
    basis = restrict_basis(n_sites)
    dim = (n_sites + 1) ** 2
    out = np.zeros((dim, dim), dtype=complex)
    quadrature = gauss_sphere_quadrature(
        3 * n_sites + DEFAULT_QUADRATURE_MARGIN
    )
    for k, b in enumerate(basis):
        out[:, k] = quantize_boundary(b, n_sites, quadrature).matrix.ravel()
    return out


def boundary_map_rank(n_sites: int, rtol: float = 1e-10) -> int:
    m = boundary_map_matrix(n_sites)
    sv = np.linalg.svd(m, compute_uv=False)
    return int(np.sum(sv > rtol * sv[0]))


def inverse_boundary(a: SymOperator) -> Polynomial3:
    """The unique sphere polynomial of degree <= N quantizing to ``a``.

    Solves the dense linear system over the harmonic basis; requires N > 1.
    Raises :class:`InternalConsistencyError` if the system is singular, which
    would contradict bijectivity of the boundary map.
    """
    n_sites = a.space.n_sites
    if n_sites <= 1:
        raise DomainError("inverse requires more than one site")
    m = boundary_map_matrix(n_sites)
    try:
        coeffs = np.linalg.solve(m, a.matrix.ravel())
    except np.linalg.LinAlgError as exc:
        raise InternalConsistencyError(
            f"boundary map matrix singular at N={n_sites}: {exc}"
        ) from exc
    cond = float(np.linalg.cond(m))
    logger.debug("boundary map inversion at N=%d, condition number %.3e", n_sites, cond)
    basis = restrict_basis(n_sites)
    poly = Polynomial3.zero()
    for c, b in zip(coeffs, basis):
        poly = poly + complex(c) * b
    return poly


def su2_to_so3(u: np.ndarray) -> np.ndarray:
    """Rotation matrix R with ``u sigma_j u* = sum_k (R^-1)_jk sigma_k``.

    ``u`` must be a 2x2 special unitary to within 1e-12; both signs of ``u``
    map to the same rotation.
    """
    u = linalg.as_complex_matrix(u)
    if u.shape != (2, 2):
        raise DomainError("expected a 2x2 matrix")
    if linalg.operator_norm(u @ u.conj().T - np.eye(2)) > 1e-12:
        raise DomainError("matrix is not unitary to 1e-12")
    if abs(np.linalg.det(u) - 1.0) > 1e-12:
        raise DomainError("determinant is not 1 to 1e-12")
    m = np.empty((3, 3))
    for j in range(3):
        conjugated = u @ PAULI[j] @ u.conj().T
        for k in range(3):
            m[j, k] = 0.5 * np.trace(PAULI[k] @ conjugated).real
    return m.T


def coherent_covariance_check(
    u: np.ndarray, point: SpherePoint, n_sites: int
) -> float:
    """Projector distance between the rotated coherent state and the coherent
    state at the rotated point.

    Phase-free by construction; the value is the operator norm of the
    difference of the two rank-one projectors.
    """
    r = su2_to_so3(u)
    rotated_state = rotation_sym(u, n_sites) @ coherent_state(point, n_sites).amplitudes
    target = coherent_state(
        SpherePoint.from_vector(r @ point.unit_vector()), n_sites
    ).amplitudes
    p1 = np.outer(rotated_state, rotated_state.conj())
    p2 = np.outer(target, target.conj())
    return linalg.operator_norm(p1 - p2)
