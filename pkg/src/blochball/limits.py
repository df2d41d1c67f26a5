"""Convergence experiments relating the bulk and boundary quantizations.

Each sweep walks a list of site counts N, measures an operator-norm quantity
on the Dicke basis, and returns `(N, value)` records; values below
``EXACT_ZERO_TOL`` are treated as exact zeros (they come from identities that
hold at machine precision, not from decaying sequences).  Decay exponents are
estimated by ordinary least squares on (log N, log value), excluding exact
zeros.
"""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, List, Sequence, Tuple

import numpy as np

from . import berezin, dicke, linalg
from .errors import DomainError
from .poly3 import Polynomial3, R_SQUARED, X, Y, poisson_bracket

# Norms at or below this level count as exact zeros.
EXACT_ZERO_TOL = 1e-12


@dataclass(frozen=True)
class ConvergenceRecord:
    """One row of a sweep: site count, measured value, label, wall time."""

    N: int
    value: float
    label: str
    elapsed: float

    def __post_init__(self):
        if self.value < 0:
            raise DomainError("record values are norms and must be >= 0")


@dataclass(frozen=True)
class SweepConfig:
    """Inputs of a sweep as orchestrated by the CLI."""

    polynomials: Tuple[Polynomial3, ...]
    n_list: Tuple[int, ...]
    bracket_scale: float | str = "auto"
    tolerances: Tuple[Tuple[str, float], ...] = ()

    def __post_init__(self):
        if not self.n_list or any(n < 1 for n in self.n_list):
            raise DomainError("n_list must be nonempty with entries >= 1")


@dataclass(frozen=True)
class FitResult:
    slope: float
    intercept: float
    n_points: int


def fit_decay(
    records: Sequence[ConvergenceRecord], zero_tol: float = EXACT_ZERO_TOL
) -> FitResult | None:
    """Least-squares slope of log(value) against log(N), skipping exact zeros."""
    xs = [math.log(r.N) for r in records if r.value > zero_tol]
    ys = [math.log(r.value) for r in records if r.value > zero_tol]
    if len(xs) < 2:
        return None
    x = np.array(xs)
    y = np.array(ys)
    dx = x - x.mean()
    slope = float(dx @ (y - y.mean()) / (dx @ dx))
    intercept = float(y.mean() - slope * x.mean())
    return FitResult(slope=slope, intercept=intercept, n_points=len(xs))


def _max_workers() -> int:
    try:
        return max(1, int(os.environ.get("BB_THREADS", "1")))
    except ValueError:
        return 1


def _sweep(
    n_list: Sequence[int], label: str, value_fn: Callable[[int], float]
) -> List[ConvergenceRecord]:
    """Evaluate ``value_fn`` per N, optionally in parallel, preserving order."""
    workers = min(_max_workers(), len(n_list))

    def run(n: int) -> ConvergenceRecord:
        start = time.perf_counter()
        value = value_fn(n)
        return ConvergenceRecord(
            N=n, value=value, label=label, elapsed=time.perf_counter() - start
        )

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(run, n_list))
    return [run(n) for n in n_list]


def bulk_boundary_gap(p: Polynomial3, n_sites: int) -> float:
    """Operator norm of bulk minus boundary quantization on the Dicke basis."""
    a = dicke.quantize_bulk(p, n_sites)
    b = berezin.quantize_boundary(p, n_sites)
    return linalg.operator_norm(a.matrix - b.matrix)


def main_theorem_sweep(
    p: Polynomial3, n_list: Sequence[int], label: str | None = None
) -> List[ConvergenceRecord]:
    """Gap between the two quantizations per N; tends to zero as N grows."""
    return _sweep(n_list, label or str(p), lambda n: bulk_boundary_gap(p, n))


def annihilation_sweep(
    q: Polynomial3, n_list: Sequence[int], label: str | None = None
) -> List[ConvergenceRecord]:
    """Norm of the bulk quantization of ``q * (x^2 + y^2 + z^2 - 1)`` per N."""
    product = q * (R_SQUARED - 1)
    return _sweep(
        n_list,
        label or f"({q}) * (r^2 - 1)",
        lambda n: dicke.quantize_bulk(product, n).norm(),
    )


def annihilation_product_residual(q: Polynomial3, n_sites: int) -> float:
    """Norm of Q(q) Q(r^2 - 1) on the Dicke basis; zero at every N."""
    left = dicke.quantize_bulk(q, n_sites).matrix
    right = dicke.quantize_bulk(R_SQUARED - 1, n_sites).matrix
    return linalg.operator_norm(left @ right)


def dgr_residual(
    f: Polynomial3,
    g: Polynomial3,
    n_sites: int,
    bracket_scale: float,
    which: str = "bulk",
) -> float:
    """Commutator-versus-bracket residual at hbar = 1/N.

    Returns the norm of ``i N [Q(f), Q(g)] - Q(scale * {f, g})`` with Q either
    the bulk or the boundary map.
    """
    if which == "bulk":
        quantize = dicke.quantize_bulk
    elif which == "boundary":
        quantize = berezin.quantize_boundary
    else:
        raise DomainError(f"unknown map {which!r}; expected 'bulk' or 'boundary'")
    qf = quantize(f, n_sites).matrix
    qg = quantize(g, n_sites).matrix
    bracket = quantize(poisson_bracket(f, g, bracket_scale), n_sites).matrix
    return linalg.operator_norm(1j * n_sites * (qf @ qg - qg @ qf) - bracket)


DGR_SCALE_CANDIDATES = (-2.0, -1.0, 1.0, 2.0)


def calibrate_bracket_scale(
    n_sites: int = 64,
    candidates: Sequence[float] = DGR_SCALE_CANDIDATES,
    which: str = "bulk",
) -> float:
    """Bracket scale minimizing the commutator residual for (f, g) = (x, y)."""
    residuals = [dgr_residual(X, Y, n_sites, s, which=which) for s in candidates]
    return float(candidates[int(np.argmin(residuals))])


def dgr_sweep(
    f: Polynomial3,
    g: Polynomial3,
    n_list: Sequence[int],
    bracket_scale: float,
    which: str = "bulk",
    label: str | None = None,
) -> List[ConvergenceRecord]:
    return _sweep(
        n_list,
        label or f"dgr[{f}; {g}]",
        lambda n: dgr_residual(f, g, n, bracket_scale, which=which),
    )


def product_continuity_residual(
    f: Polynomial3, g: Polynomial3, n_sites: int
) -> float:
    """Norm of Q(f) Q(g) - Q(f g) for the bulk map; tends to zero."""
    qf = dicke.quantize_bulk(f, n_sites).matrix
    qg = dicke.quantize_bulk(g, n_sites).matrix
    qfg = dicke.quantize_bulk(f * g, n_sites).matrix
    return linalg.operator_norm(qf @ qg - qfg)


def product_continuity_sweep(
    f: Polynomial3, g: Polynomial3, n_list: Sequence[int], label: str | None = None
) -> List[ConvergenceRecord]:
    return _sweep(
        n_list,
        label or f"product[{f}; {g}]",
        lambda n: product_continuity_residual(f, g, n),
    )


def sup_norm_ball(
    p: Polynomial3, grid: int = 64, refine_steps: int = 20
) -> Tuple[float, np.ndarray]:
    """Maximum of |p| over the closed unit ball by dense grid plus refinement.

    Cube points outside the ball are projected to the sphere, so the boundary
    is sampled as densely as the interior.  Accurate to well below 1e-4 for
    smooth polynomials.
    """
    axis = np.linspace(-1.0, 1.0, grid)
    xs, ys, zs = np.meshgrid(axis, axis, axis, indexing="ij")
    pts = np.stack([xs.ravel(), ys.ravel(), zs.ravel()], axis=1)
    best_val, best_pt = -1.0, np.zeros(3)

    def scan(points: np.ndarray) -> None:
        nonlocal best_val, best_pt
        norms = np.linalg.norm(points, axis=1)
        factor = np.where(norms > 1.0, 1.0 / np.maximum(norms, 1e-300), 1.0)
        points = points * factor[:, None]
        vals = np.abs(p.evaluate_many(points[:, 0], points[:, 1], points[:, 2]))
        i = int(np.argmax(vals))
        if vals[i] > best_val:
            best_val = float(vals[i])
            best_pt = points[i]

    scan(pts)
    half_width = 2.0 / (grid - 1)
    offsets = np.array(
        [(i, j, k) for i in range(-2, 3) for j in range(-2, 3) for k in range(-2, 3)],
        dtype=float,
    ) / 2.0
    for _ in range(refine_steps):
        scan(best_pt[None, :] + half_width * offsets)
        half_width *= 0.5
    return best_val, best_pt


def norm_continuity(
    f: Polynomial3, n_list: Sequence[int], label: str | None = None
) -> List[ConvergenceRecord]:
    """Norm of the bulk quantization per N; approaches the sup norm of |f|.

    The comparison target from :func:`sup_norm_ball` is the ball maximum; for
    polynomials that vanish on the sphere the Dicke-restricted norms approach
    the smaller sphere maximum instead.
    """
    return _sweep(
        n_list, label or f"norm[{f}]", lambda n: dicke.quantize_bulk(f, n).norm()
    )


def classical_limit_check(
    p: Polynomial3,
    bloch: Sequence[float],
    n_list: Sequence[int],
    label: str | None = None,
) -> List[ConvergenceRecord]:
    """Gap between the product-state expectation and the classical value.

    Exactly zero (below 1e-12) once N reaches the degree of ``p``.
    """
    target = p.evaluate(bloch)

    def value(n: int) -> float:
        return abs(dicke.product_state_expectation(p, bloch, n) - target)

    return _sweep(n_list, label or f"classical[{p}]", value)


def is_strictly_decreasing(records: Sequence[ConvergenceRecord]) -> bool:
    values = [r.value for r in records]
    return all(b < a for a, b in zip(values, values[1:]))


def all_exact_zero(
    records: Sequence[ConvergenceRecord], zero_tol: float = EXACT_ZERO_TOL
) -> bool:
    return all(r.value <= zero_tol for r in records)
