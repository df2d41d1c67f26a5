"""Exact sparse polynomials in the three Bloch-ball coordinates x, y, z.

A polynomial is a mapping from exponent triples to coefficients.  Coefficients
constructed from integers, fractions or decimal literals stay exact
(``fractions.Fraction``), so algebraic identities such as the harmonic
reconstruction hold literally, not to a tolerance.  Floats and complex values
are accepted as coefficients and propagate through ordinary Python arithmetic.

The module also provides the Poisson bracket of the ball (structure constants
given by the Levi-Civita symbol), the decomposition of a polynomial into
harmonic homogeneous parts plus a multiple of ``x^2 + y^2 + z^2 - 1``, and the
canonical spanning set of polynomial restrictions to the unit sphere.

Text form: terms like ``3/2 x^2 y`` or ``-1 z^3`` joined by ``+``/``-``,
whitespace-insensitive.  ``parse`` and ``str`` round-trip for rational
coefficients.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from numbers import Number
from typing import Dict, Iterator, Mapping, NamedTuple, Sequence, Tuple, Union

import numpy as np

from .errors import DomainError, PolynomialParseError

Scalar = Union[int, Fraction, float, complex]


class Monomial3(NamedTuple):
    """Exponent triple of a monomial x^ax * y^ay * z^az."""

    ax: int
    ay: int
    az: int

    @property
    def degree(self) -> int:
        return self.ax + self.ay + self.az


def _is_zero(c: Scalar) -> bool:
    return c == 0


def _conj(c: Scalar) -> Scalar:
    if isinstance(c, complex):
        return c.conjugate()
    return c


def _coeff_is_real(c: Scalar) -> bool:
    return not isinstance(c, complex) or c.imag == 0.0


class Polynomial3:
    """Immutable sparse polynomial in x, y, z.

    Terms with coefficient exactly zero are never stored.  Supports ``+``,
    ``-``, ``*`` (with scalars and polynomials) and integer powers.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[Tuple[int, int, int], Scalar] | None = None):
        data: Dict[Monomial3, Scalar] = {}
        if terms:
            for mono, coeff in terms.items():
                m = Monomial3(*mono)
                if m.ax < 0 or m.ay < 0 or m.az < 0:
                    raise DomainError(f"negative exponent in monomial {m}")
                if not _is_zero(coeff):
                    data[m] = coeff
        self._terms = data

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls) -> "Polynomial3":
        return cls()

    @classmethod
    def constant(cls, value: Scalar) -> "Polynomial3":
        return cls({(0, 0, 0): value})

    @classmethod
    def monomial(cls, ax: int, ay: int, az: int, coeff: Scalar = 1) -> "Polynomial3":
        return cls({(ax, ay, az): coeff})

    # -- basic queries -------------------------------------------------------

    def terms(self) -> Mapping[Monomial3, Scalar]:
        return dict(self._terms)

    def sorted_terms(self) -> Iterator[Tuple[Monomial3, Scalar]]:
        """Terms in a fixed order (ascending exponent triple)."""
        for mono in sorted(self._terms):
            yield mono, self._terms[mono]

    def coefficient(self, mono: Tuple[int, int, int]) -> Scalar:
        return self._terms.get(Monomial3(*mono), 0)

    def is_zero(self) -> bool:
        return not self._terms

    def is_real(self) -> bool:
        return all(_coeff_is_real(c) for c in self._terms.values())

    def degree(self) -> int:
        """Total degree; 0 for the zero polynomial."""
        if not self._terms:
            return 0
        return max(m.degree for m in self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def __eq__(self, other) -> bool:
        if isinstance(other, Polynomial3):
            return self._terms == other._terms
        if isinstance(other, Number):
            return self._terms == Polynomial3.constant(other)._terms
        return NotImplemented

    def __hash__(self):
        return hash(frozenset((m, complex(c)) for m, c in self._terms.items()))

    # -- arithmetic ----------------------------------------------------------

    def __add__(self, other) -> "Polynomial3":
        if isinstance(other, Number):
            other = Polynomial3.constant(other)
        if not isinstance(other, Polynomial3):
            return NotImplemented
        out = dict(self._terms)
        for mono, coeff in other._terms.items():
            out[mono] = out.get(mono, 0) + coeff
        return Polynomial3(out)

    __radd__ = __add__

    def __neg__(self) -> "Polynomial3":
        return Polynomial3({m: -c for m, c in self._terms.items()})

    def __sub__(self, other) -> "Polynomial3":
        if isinstance(other, Number):
            other = Polynomial3.constant(other)
        if not isinstance(other, Polynomial3):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "Polynomial3":
        return (-self) + other

    def __mul__(self, other) -> "Polynomial3":
        if isinstance(other, Number):
            return Polynomial3({m: c * other for m, c in self._terms.items()})
        if not isinstance(other, Polynomial3):
            return NotImplemented
        out: Dict[Tuple[int, int, int], Scalar] = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                key = (m1.ax + m2.ax, m1.ay + m2.ay, m1.az + m2.az)
                out[key] = out.get(key, 0) + c1 * c2
        return Polynomial3(out)

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "Polynomial3":
        if not isinstance(exponent, int) or exponent < 0:
            raise DomainError("polynomial powers must be non-negative integers")
        result = Polynomial3.constant(1)
        for _ in range(exponent):
            result = result * self
        return result

    def conjugate(self) -> "Polynomial3":
        return Polynomial3({m: _conj(c) for m, c in self._terms.items()})

    def real_part(self) -> "Polynomial3":
        return Polynomial3(
            {m: (c.real if isinstance(c, complex) else c) for m, c in self._terms.items()}
        )

    def imag_part(self) -> "Polynomial3":
        return Polynomial3(
            {m: c.imag for m, c in self._terms.items() if isinstance(c, complex)}
        )

    # -- calculus ------------------------------------------------------------

    def diff(self, var: int | str) -> "Polynomial3":
        """Partial derivative with respect to x (0), y (1) or z (2)."""
        idx = "xyz".index(var) if isinstance(var, str) else var
        if idx not in (0, 1, 2):
            raise DomainError(f"unknown variable {var!r}")
        out: Dict[Tuple[int, int, int], Scalar] = {}
        for m, c in self._terms.items():
            e = m[idx]
            if e == 0:
                continue
            key = list(m)
            key[idx] = e - 1
            out[tuple(key)] = c * e
        return Polynomial3(out)

    def laplacian(self) -> "Polynomial3":
        return self.diff(0).diff(0) + self.diff(1).diff(1) + self.diff(2).diff(2)

    def homogeneous_parts(self) -> Dict[int, "Polynomial3"]:
        """Split into homogeneous components, keyed by degree."""
        parts: Dict[int, Dict[Tuple[int, int, int], Scalar]] = {}
        for m, c in self._terms.items():
            parts.setdefault(m.degree, {})[m] = c
        return {d: Polynomial3(t) for d, t in sorted(parts.items())}

    # -- evaluation ----------------------------------------------------------

    def evaluate(self, point: Sequence[float]) -> float | complex:
        """Value at a 3-vector.  Returns float for real coefficients."""
        x, y, z = (float(point[0]), float(point[1]), float(point[2]))
        total: complex = 0j
        for m, c in self.sorted_terms():
            total += complex(c) * (x ** m.ax) * (y ** m.ay) * (z ** m.az)
        if self.is_real():
            return total.real
        return total

    def evaluate_many(
        self, xs: np.ndarray, ys: np.ndarray, zs: np.ndarray
    ) -> np.ndarray:
        """Vectorised evaluation on same-shape coordinate arrays."""
        xs = np.asarray(xs, dtype=float)
        real = self.is_real()
        out = np.zeros(xs.shape, dtype=float if real else complex)
        for m, c in self.sorted_terms():
            coeff = float(c.real if isinstance(c, complex) else c) if real else complex(c)
            out = out + coeff * (xs ** m.ax) * (ys ** m.ay) * (zs ** m.az)
        return out

    # -- text form -----------------------------------------------------------

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        # Graded lexicographic: descending degree, then x before y before z.
        order = sorted(self._terms, key=lambda m: (-m.degree, -m.ax, -m.ay, -m.az))
        pieces = []
        for i, mono in enumerate(order):
            coeff = self._terms[mono]
            sign, body = _format_term(coeff, mono)
            if i == 0:
                pieces.append(body if sign >= 0 else f"-{body}")
            else:
                pieces.append(f"+ {body}" if sign >= 0 else f"- {body}")
        return " ".join(pieces)

    def __repr__(self) -> str:
        return f"Polynomial3({str(self)!r})"

    @classmethod
    def parse(cls, text: str) -> "Polynomial3":
        return _parse_polynomial(text)


def _format_coeff_magnitude(coeff: Scalar) -> str:
    if isinstance(coeff, complex):
        return repr(coeff)
    if isinstance(coeff, Fraction):
        coeff = abs(coeff)
        return str(coeff.numerator) if coeff.denominator == 1 else str(coeff)
    return repr(abs(coeff))


def _format_term(coeff: Scalar, mono: Monomial3) -> Tuple[int, str]:
    vars_txt = " ".join(
        (v if e == 1 else f"{v}^{e}")
        for v, e in zip("xyz", mono)
        if e > 0
    )
    if isinstance(coeff, complex):
        # Complex coefficients are displayed but lie outside the input grammar.
        body = repr(coeff) if not vars_txt else f"{coeff!r} {vars_txt}"
        return 1, body
    sign = -1 if coeff < 0 else 1
    mag = _format_coeff_magnitude(coeff)
    if vars_txt and mag == "1":
        return sign, vars_txt
    return sign, f"{mag} {vars_txt}" if vars_txt else mag


_NUMBER_RE = re.compile(r"\d+/\d+|\d+\.\d*|\.\d+|\d+")
_INT_RE = re.compile(r"\d+")


def _parse_number(text: str) -> Fraction:
    if "/" in text:
        num, den = text.split("/")
        return Fraction(int(num), int(den))
    return Fraction(text)


def _parse_polynomial(text: str) -> Polynomial3:
    terms: Dict[Tuple[int, int, int], Scalar] = {}
    i, n = 0, len(text)

    def skip_ws(j: int) -> int:
        while j < n and text[j].isspace():
            j += 1
        return j

    i = skip_ws(i)
    if i >= n:
        raise PolynomialParseError("empty polynomial", i)

    first = True
    while i < n:
        sign = 1
        saw_sign = False
        while i < n and text[i] in "+-":
            if text[i] == "-":
                sign = -sign
            saw_sign = True
            i = skip_ws(i + 1)
        if i >= n:
            raise PolynomialParseError("dangling sign", i)
        if not first and not saw_sign:
            raise PolynomialParseError("expected '+' or '-' between terms", i)

        coeff = Fraction(1)
        exps = [0, 0, 0]
        saw_factor = False

        m = _NUMBER_RE.match(text, i)
        if m:
            coeff = _parse_number(m.group())
            i = skip_ws(m.end())
            saw_factor = True

        while i < n:
            if text[i] == "*":
                i = skip_ws(i + 1)
                continue
            ch = text[i].lower()
            if ch in "xyz":
                idx = "xyz".index(ch)
                i = skip_ws(i + 1)
                exp = 1
                if i < n and text[i] == "^":
                    i = skip_ws(i + 1)
                    m = _INT_RE.match(text, i)
                    if not m:
                        raise PolynomialParseError("expected integer exponent after '^'", i)
                    exp = int(m.group())
                    i = skip_ws(m.end())
                exps[idx] += exp
                saw_factor = True
            elif _NUMBER_RE.match(text, i):
                raise PolynomialParseError(
                    "unexpected number; a coefficient must lead its term", i
                )
            elif text[i] in "+-":
                break
            else:
                raise PolynomialParseError(f"unexpected character {text[i]!r}", i)

        if not saw_factor:
            raise PolynomialParseError("expected a term", i)
        key = tuple(exps)
        terms[key] = terms.get(key, 0) + sign * coeff
        first = False

    return Polynomial3(terms)


# Convenience generators.
X = Polynomial3.monomial(1, 0, 0)
Y = Polynomial3.monomial(0, 1, 0)
Z = Polynomial3.monomial(0, 0, 1)
ONE = Polynomial3.constant(1)
R_SQUARED = X * X + Y * Y + Z * Z


def poisson_bracket(f: Polynomial3, g: Polynomial3, scale: Scalar = 1) -> Polynomial3:
    """Poisson bracket of the ball, scaled.

    ``{f, g} = scale * sum_{abc} eps_{abc} x_c (df/dx_a)(dg/dx_b)``.  Exact for
    exact inputs; bilinear, antisymmetric, and a derivation in each slot.
    """
    fx, fy, fz = f.diff(0), f.diff(1), f.diff(2)
    gx, gy, gz = g.diff(0), g.diff(1), g.diff(2)
    bracket = Z * (fx * gy - fy * gx) + X * (fy * gz - fz * gy) + Y * (fz * gx - fx * gz)
    return bracket * scale


@dataclass(frozen=True)
class HarmonicDecomposition:
    """``p = sum_j H_j + (x^2 + y^2 + z^2 - 1) * q`` with harmonic H_j.

    ``harmonic_parts`` lists ``(degree, H_degree)`` pairs in ascending degree;
    each part is harmonic and homogeneous.  The identity holds exactly for
    exact inputs.
    """

    harmonic_parts: Tuple[Tuple[int, Polynomial3], ...]
    radial_cofactor: Polynomial3

    def reconstruct(self) -> Polynomial3:
        total = Polynomial3.zero()
        for _, part in self.harmonic_parts:
            total = total + part
        return total + (R_SQUARED - 1) * self.radial_cofactor

    def harmonic_part(self, degree: int) -> Polynomial3:
        for d, part in self.harmonic_parts:
            if d == degree:
                return part
        return Polynomial3.zero()


def _radial_expansion(p: Polynomial3, degree: int) -> Dict[int, Polynomial3]:
    """Expand homogeneous ``p`` as ``sum_k r^(2k) h_{degree-2k}`` with h harmonic.

    Returns ``{k: h_{degree-2k}}``.  Uses the identity
    ``lap(r^(2k) h_m) = 2k (2m + 2k + 1) r^(2k-2) h_m`` to read the lower
    harmonics off the Laplacian, recursively and exactly.
    """
    if degree <= 1:
        return {0: p}
    lap = p.laplacian()
    if lap.is_zero():
        return {0: p}
    lower = _radial_expansion(lap, degree - 2)
    parts: Dict[int, Polynomial3] = {}
    for k_lower, g in lower.items():
        k = k_lower + 1
        parts[k] = g * Fraction(1, 2 * k * (2 * degree - 2 * k + 1))
    top = p
    for k, h in parts.items():
        top = top - (R_SQUARED ** k) * h
    parts[0] = top
    return parts


def harmonic_decompose(p: Polynomial3) -> HarmonicDecomposition:
    """Decompose ``p`` into harmonic parts plus a multiple of ``r^2 - 1``.

    Coefficient-linear, so complex coefficients are allowed.  On the unit
    sphere ``p`` and the sum of the harmonic parts agree.
    """
    harmonics: Dict[int, Polynomial3] = {}
    cofactor = Polynomial3.zero()
    sphere_defect = R_SQUARED - 1
    for d, component in p.homogeneous_parts().items():
        for k, h in _radial_expansion(component, d).items():
            j = d - 2 * k
            harmonics[j] = harmonics.get(j, Polynomial3.zero()) + h
            # r^(2k) = sum_t C(k, t) (r^2 - 1)^t; the t >= 1 slice feeds q.
            for t in range(1, k + 1):
                cofactor = cofactor + math.comb(k, t) * (sphere_defect ** (t - 1)) * h
    parts = tuple(
        (j, harmonics[j]) for j in sorted(harmonics) if not harmonics[j].is_zero()
    )
    return HarmonicDecomposition(harmonic_parts=parts, radial_cofactor=cofactor)


def restrict_basis(max_degree: int) -> list[Polynomial3]:
    """Spanning basis of polynomial restrictions to the unit sphere.

    Returns ``(max_degree + 1)^2`` harmonic homogeneous polynomials, the
    harmonic projections of the monomials with z-exponent at most one,
    ordered by ascending degree then descending lexicographic exponents.
    Their restrictions to the sphere are linearly independent.
    """
    if max_degree < 0:
        raise DomainError("max_degree must be non-negative")
    basis: list[Polynomial3] = []
    for d in range(max_degree + 1):
        monos = []
        for az in (0, 1):
            if az > d:
                continue
            for ax in range(d - az, -1, -1):
                monos.append((ax, d - az - ax, az))
        monos.sort(key=lambda m: (-m[0], -m[1], -m[2]))
        for mono in monos:
            p = Polynomial3.monomial(*mono)
            basis.append(_radial_expansion(p, d)[0])
    return basis
