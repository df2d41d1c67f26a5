"""Mean-field transverse-field spin model on the symmetric subspace.

The quantum Hamiltonian per site, restricted to the Dicke basis, is

    H_N = -(2 J / N^2) Jz^2 - (2 B / N) Jx,

a real symmetric tridiagonal matrix.  Its classical counterpart on the closed
unit ball is ``h0(x, y, z) = -(J/2) z^2 - B x``, minimized in closed form.
The sweep here measures the gap between H_N and the boundary quantization of
``h0`` restricted to the sphere, together with ground-state data.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np
import scipy.linalg

from . import berezin, dicke, linalg
from .errors import DomainError
from .limits import ConvergenceRecord
from .poly3 import Polynomial3, X, Z

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CWParams:
    """Spin-spin coupling J and transverse field B."""

    J: float
    B: float

    def __post_init__(self):
        if not (math.isfinite(self.J) and math.isfinite(self.B)):
            raise DomainError("parameters must be finite")

    def classical_polynomial(self) -> Polynomial3:
        return -0.5 * self.J * Z * Z - self.B * X


@dataclass(frozen=True)
class CWSpectrum:
    """Eigenvalues (ascending) and the ground eigenvector."""

    N: int
    eigenvalues: np.ndarray
    ground_vector: np.ndarray

    @property
    def ground_energy(self) -> float:
        return float(self.eigenvalues[0])

    @property
    def gap(self) -> float:
        return float(self.eigenvalues[1] - self.eigenvalues[0])


@dataclass(frozen=True)
class CWClassicalResult:
    """Minimizer of the classical Hamiltonian over the closed unit ball.

    ``degenerate`` marks a non-isolated minimum (a whole disk or the full
    ball); for J > 0 and |B| < J the returned point is the one with z >= 0 of
    a symmetric pair.
    """

    minimizer: Tuple[float, float, float]
    value: float
    degenerate: bool


def cw_hamiltonian_sym(params: CWParams, n_sites: int) -> dicke.SymOperator:
    """Quantum Hamiltonian per site on the Dicke basis (real symmetric tridiagonal)."""
    ops = dicke.collective_ops(n_sites)
    jz = ops.jz.matrix
    jx = ops.jx.matrix
    matrix = (
        -(2.0 * params.J / n_sites**2) * (jz @ jz) - (2.0 * params.B / n_sites) * jx
    )
    return dicke.SymOperator(ops.space, matrix)


def cw_hamiltonian_full(params: CWParams, n_sites: int) -> linalg.FullTensorOperator:
    """Literal per-site Hamiltonian on the full tensor space (oracle, small N)."""
    if n_sites > linalg.ORACLE_SITE_CAP:
        raise DomainError(f"full construction capped at N={linalg.ORACLE_SITE_CAP}")
    dim = 1 << n_sites
    sz_sites = []
    sx_sites = []
    for i in range(n_sites):
        factors_z = [dicke.IDENTITY_2] * n_sites
        factors_x = [dicke.IDENTITY_2] * n_sites
        factors_z[i] = dicke.SIGMA_Z
        factors_x[i] = dicke.SIGMA_X
        sz_sites.append(linalg.kron_chain(factors_z))
        sx_sites.append(linalg.kron_chain(factors_x))
    h = np.zeros((dim, dim), dtype=complex)
    for i in range(n_sites):
        for j in range(n_sites):
            h += -(params.J / (2.0 * n_sites)) * (sz_sites[i] @ sz_sites[j])
        h += -params.B * sx_sites[i]
    return linalg.FullTensorOperator(n_sites=n_sites, matrix=h / n_sites)


def cw_classical(params: CWParams) -> CWClassicalResult:
    """Closed-form minimum of ``-(J/2) z^2 - B x`` over the closed unit ball."""
    j, b = params.J, params.B
    if j == 0.0 and b == 0.0:
        return CWClassicalResult(minimizer=(0.0, 0.0, 0.0), value=0.0, degenerate=True)
    if j > 0.0 and abs(b) < j:
        x = b / j
        z = math.sqrt(1.0 - x * x)
        return CWClassicalResult(
            minimizer=(x, 0.0, z), value=-(j + b * b / j) / 2.0, degenerate=False
        )
    if b == 0.0:
        # j < 0: the whole z = 0 disk minimizes at value 0.
        return CWClassicalResult(minimizer=(0.0, 0.0, 0.0), value=0.0, degenerate=True)
    sign = 1.0 if b > 0 else -1.0
    return CWClassicalResult(minimizer=(sign, 0.0, 0.0), value=-abs(b), degenerate=False)


def cw_ground_state(params: CWParams, n_sites: int) -> CWSpectrum:
    """Full spectrum and ground vector of the per-site Hamiltonian.

    Uses the symmetric tridiagonal eigensolver when B is nonzero, the dense
    Hermitian path otherwise.  Near-degenerate ground states are resolved by
    picking the candidate whose largest amplitude sits at the lowest Dicke
    index, and the phase is fixed so that amplitude is real positive.
    """
    h = cw_hamiltonian_sym(params, n_sites).matrix
    if params.B != 0.0:
        diag = h.diagonal().real.copy()
        off = h.diagonal(1).real.copy()
        w, v = scipy.linalg.eigh_tridiagonal(diag, off)
    else:
        w, v = linalg.hermitian_eigen(h)
    v = v.astype(complex)
    tol = 1e-12 * max(1.0, abs(float(w[0])))
    candidates = [k for k in range(len(w)) if w[k] - w[0] <= tol]
    if len(candidates) > 1:
        peaks = [int(np.argmax(np.abs(v[:, k]))) for k in candidates]
        pick = candidates[int(np.argmin(peaks))]
        logger.debug(
            "ground state at N=%d degenerate across %d candidates; picked index %d",
            n_sites,
            len(candidates),
            pick,
        )
    else:
        pick = candidates[0]
    ground = v[:, pick]
    peak = int(np.argmax(np.abs(ground)))
    phase = ground[peak] / abs(ground[peak])
    ground = ground * phase.conjugate()
    return CWSpectrum(N=n_sites, eigenvalues=w, ground_vector=ground)


def cw_bulk_defect(params: CWParams, n_sites: int) -> float:
    """Norm gap between the Hamiltonian and the bulk quantization of h0.

    The residual is the coincident-index correction of the spin-spin sum plus
    the 1/N normalization mismatch; it decays like 1/N.
    """
    h = cw_hamiltonian_sym(params, n_sites).matrix
    q = dicke.quantize_bulk(params.classical_polynomial(), n_sites).matrix
    return linalg.operator_norm(h - q)


@dataclass(frozen=True)
class CWRow:
    """One sweep row: spectral data plus the boundary-map gap."""

    N: int
    ground_energy: float
    gap: float
    exp_z2: float
    exp_x: float
    norm_diff: float
    elapsed: float


def cw_sweep(params: CWParams, n_list: Sequence[int]) -> List[CWRow]:
    """Per-N ground-state data and the Hamiltonian-versus-boundary-map gap."""
    h0 = params.classical_polynomial()
    rows: List[CWRow] = []
    for n in n_list:
        start = time.perf_counter()
        spectrum = cw_ground_state(params, n)
        h = cw_hamiltonian_sym(params, n).matrix
        boundary = berezin.quantize_boundary(h0, n).matrix
        norm_diff = linalg.operator_norm(h - boundary)
        psi = spectrum.ground_vector
        z2 = dicke.quantize_bulk(Z * Z, n).matrix
        x1 = dicke.quantize_bulk(X, n).matrix
        rows.append(
            CWRow(
                N=n,
                ground_energy=spectrum.ground_energy,
                gap=spectrum.gap,
                exp_z2=float((psi.conj() @ (z2 @ psi)).real),
                exp_x=float((psi.conj() @ (x1 @ psi)).real),
                norm_diff=norm_diff,
                elapsed=time.perf_counter() - start,
            )
        )
    return rows


def cw_theorem_sweep(
    params: CWParams, n_list: Sequence[int], label: str | None = None
) -> List[ConvergenceRecord]:
    """Records of the Hamiltonian-versus-boundary-map gap per N."""
    rows = cw_sweep(params, n_list)
    name = label or f"cw[J={params.J}, B={params.B}]"
    return [
        ConvergenceRecord(N=r.N, value=r.norm_diff, label=name, elapsed=r.elapsed)
        for r in rows
    ]
