# SPDX-License-Identifier: Apache-2.0
# SPDX-FileCopyrightText: 2025 The Linux Foundation

"""Binary and quaternary forms over exact rationals or complex floats."""

import numbers
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import reduce
from itertools import combinations_with_replacement
from math import comb
from typing import (
    TYPE_CHECKING,
    Dict,
    Iterable,
    List,
    Mapping,
    NamedTuple,
    Optional,
    Sequence,
    Tuple,
    Union,
)

import numpy as np
import sympy
from scipy import linalg

from .error_handling import (
    BackendMismatchError,
    DegreeMismatchError,
    SingularContactError,
    ZeroFormError,
)

if TYPE_CHECKING:
    from .lines import LineChart

Scalar = Union[Fraction, complex]
Exponent = Tuple[int, int, int, int]
ProjectivePoint = Tuple[complex, complex]

_T0, _T1 = sympy.symbols("t0 t1")
_EPS = float(np.finfo(float).eps)


class Backend(str, Enum):
    """Scalar backend of a form."""

    EXACT = "exact"
    FLOAT = "float"


def to_fraction(value: object) -> Fraction:
    """Convert an integer, Fraction or sympy rational to a Fraction."""
    if isinstance(value, bool):
        raise BackendMismatchError(f"Boolean is not a scalar: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, numbers.Integral):
        return Fraction(int(value))
    if isinstance(value, sympy.Basic) and value.is_Rational:
        rational = sympy.Rational(value)
        return Fraction(int(rational.p), int(rational.q))
    raise BackendMismatchError(f"Not an exact scalar: {value!r}")


def to_complex(value: object) -> complex:
    """Convert an integer or inexact number to complex."""
    if isinstance(value, bool):
        raise BackendMismatchError(f"Boolean is not a scalar: {value!r}")
    if isinstance(value, (Fraction, sympy.Basic)):
        raise BackendMismatchError(
            f"Exact scalar {value!r} in a float computation; convert explicitly"
        )
    if isinstance(value, numbers.Complex):
        return complex(value)
    raise BackendMismatchError(f"Not a float scalar: {value!r}")


def coerce_scalar(value: object, backend: Backend) -> Scalar:
    if backend is Backend.EXACT:
        return to_fraction(value)
    return to_complex(value)


def infer_backend(values: Iterable[object]) -> Backend:
    """Backend implied by a collection of scalars; integers are exact."""
    exact = False
    inexact = False
    for value in values:
        if isinstance(value, (Fraction, sympy.Basic)):
            exact = True
        elif isinstance(value, numbers.Integral):
            continue
        elif isinstance(value, numbers.Complex):
            inexact = True
    if exact and inexact:
        raise BackendMismatchError("Exact and float scalars mixed in one form")
    return Backend.FLOAT if inexact else Backend.EXACT


def _require_same_backend(*backends: Backend) -> Backend:
    first = backends[0]
    for other in backends[1:]:
        if other is not first:
            raise BackendMismatchError(f"Backend mismatch: {first.value} vs {other.value}")
    return first


def scalar_zero(backend: Backend) -> Scalar:
    return Fraction(0) if backend is Backend.EXACT else 0j


def scalar_one(backend: Backend) -> Scalar:
    return Fraction(1) if backend is Backend.EXACT else 1 + 0j


def scalar_is_zero(value: Scalar, tol: float = 0.0) -> bool:
    if isinstance(value, Fraction):
        return value == 0
    return abs(value) <= tol


@dataclass(frozen=True)
class BinaryForm:
    """Homogeneous form in t0, t1; coeffs[i] multiplies t0^(k-i) t1^i."""

    degree: int
    coeffs: Tuple[Scalar, ...]
    backend: Backend = Backend.EXACT

    def __post_init__(self) -> None:
        if self.degree < 0:
            raise DegreeMismatchError(f"Negative degree {self.degree}")
        if len(self.coeffs) != self.degree + 1:
            raise DegreeMismatchError(
                f"Degree {self.degree} form needs {self.degree + 1} coefficients, "
                f"got {len(self.coeffs)}"
            )
        converted = tuple(coerce_scalar(c, self.backend) for c in self.coeffs)
        object.__setattr__(self, "coeffs", converted)

    @classmethod
    def from_coeffs(
        cls, coeffs: Sequence[object], backend: Optional[Backend] = None
    ) -> "BinaryForm":
        if backend is None:
            backend = infer_backend(coeffs)
        return cls(len(coeffs) - 1, tuple(coeffs), backend)  # type: ignore[arg-type]

    @classmethod
    def zero(cls, degree: int, backend: Backend = Backend.EXACT) -> "BinaryForm":
        return cls(degree, (scalar_zero(backend),) * (degree + 1), backend)

    @classmethod
    def one(cls, backend: Backend = Backend.EXACT) -> "BinaryForm":
        return cls(0, (scalar_one(backend),), backend)

    @classmethod
    def monomial(
        cls, degree: int, t1_power: int, backend: Backend = Backend.EXACT
    ) -> "BinaryForm":
        """The monomial t0^(degree - t1_power) t1^t1_power."""
        coeffs = [scalar_zero(backend)] * (degree + 1)
        coeffs[t1_power] = scalar_one(backend)
        return cls(degree, tuple(coeffs), backend)

    @classmethod
    def linear(cls, c0: object, c1: object, backend: Optional[Backend] = None) -> "BinaryForm":
        """The form c0*t0 + c1*t1."""
        return cls.from_coeffs([c0, c1], backend)

    @classmethod
    def from_root(cls, point: Sequence[object], backend: Optional[Backend] = None) -> "BinaryForm":
        """Linear form vanishing at the point (r0 : r1), namely r1*t0 - r0*t1."""
        r0, r1 = point
        return cls.from_coeffs([r1, -r0], backend)  # type: ignore[operator]

    def _check(self, other: "BinaryForm") -> None:
        _require_same_backend(self.backend, other.backend)
        if self.degree != other.degree:
            raise DegreeMismatchError(f"Degree mismatch: {self.degree} vs {other.degree}")

    def __add__(self, other: "BinaryForm") -> "BinaryForm":
        self._check(other)
        return BinaryForm(
            self.degree,
            tuple(a + b for a, b in zip(self.coeffs, other.coeffs)),
            self.backend,
        )

    def __sub__(self, other: "BinaryForm") -> "BinaryForm":
        self._check(other)
        return BinaryForm(
            self.degree,
            tuple(a - b for a, b in zip(self.coeffs, other.coeffs)),
            self.backend,
        )

    def __neg__(self) -> "BinaryForm":
        return self.scale(-scalar_one(self.backend))

    def __mul__(self, other: object) -> "BinaryForm":
        if isinstance(other, BinaryForm):
            return binary_mul(self, other)
        return self.scale(other)

    __rmul__ = __mul__

    def scale(self, factor: object) -> "BinaryForm":
        c = coerce_scalar(factor, self.backend)
        return BinaryForm(self.degree, tuple(c * a for a in self.coeffs), self.backend)

    def power(self, exponent: int) -> "BinaryForm":
        result = BinaryForm.one(self.backend)
        for _ in range(exponent):
            result = binary_mul(result, self)
        return result

    def is_zero(self, tol: float = 0.0) -> bool:
        if self.backend is Backend.FLOAT and tol > 0:
            return self.max_abs() <= tol
        return all(scalar_is_zero(c) for c in self.coeffs)

    def max_abs(self) -> float:
        return max(abs(complex(c)) for c in self.coeffs)

    def evaluate(self, t0: object, t1: object) -> Scalar:
        x = coerce_scalar(t0, self.backend)
        y = coerce_scalar(t1, self.backend)
        k = self.degree
        return sum(
            (c * x ** (k - i) * y**i for i, c in enumerate(self.coeffs)),
            scalar_zero(self.backend),
        )

    def derivative(self, variable: int) -> "BinaryForm":
        """Partial derivative in t0 (variable=0) or t1 (variable=1)."""
        k = self.degree
        if k == 0:
            return BinaryForm.zero(0, self.backend)
        if variable == 0:
            coeffs = [self.coeffs[i] * (k - i) for i in range(k)]
        else:
            coeffs = [self.coeffs[i] * i for i in range(1, k + 1)]
        return BinaryForm(k - 1, tuple(coeffs), self.backend)

    def substitute(self, matrix: Sequence[Sequence[object]]) -> "BinaryForm":
        """Return b(A w): t0 = A00 w0 + A01 w1, t1 = A10 w0 + A11 w1."""
        l0 = BinaryForm.from_coeffs([matrix[0][0], matrix[0][1]], self.backend)
        l1 = BinaryForm.from_coeffs([matrix[1][0], matrix[1][1]], self.backend)
        k = self.degree
        result = BinaryForm.zero(k, self.backend)
        for i, c in enumerate(self.coeffs):
            if scalar_is_zero(c):
                continue
            term = binary_mul(l0.power(k - i), l1.power(i)).scale(c)
            result = result + term
        return result

    def leading_index(self, tol: float = 0.0) -> Optional[int]:
        """Index of the first coefficient that is not zero."""
        for i, c in enumerate(self.coeffs):
            if not scalar_is_zero(c, tol):
                return i
        return None

    def to_float(self) -> "BinaryForm":
        if self.backend is Backend.FLOAT:
            return self
        return BinaryForm(
            self.degree, tuple(complex(float(c)) for c in self.coeffs), Backend.FLOAT
        )

    def vector(self) -> np.ndarray:
        return np.array([complex(c) for c in self.coeffs], dtype=complex)

    def normalized(self) -> "BinaryForm":
        """Scale to unit max coefficient (float) or leading coefficient one (exact)."""
        if self.is_zero():
            raise ZeroFormError("Cannot normalize the zero form")
        if self.backend is Backend.EXACT:
            lead = self.coeffs[self.leading_index()]  # type: ignore[index]
            return self.scale(1 / lead)
        vec = self.vector()
        pivot = vec[int(np.argmax(np.abs(vec)))]
        return self.scale(1 / pivot)


def binary_mul(a: BinaryForm, b: BinaryForm) -> BinaryForm:
    """Product of two binary forms by coefficient convolution."""
    backend = _require_same_backend(a.backend, b.backend)
    coeffs = [scalar_zero(backend)] * (a.degree + b.degree + 1)
    for i, x in enumerate(a.coeffs):
        if scalar_is_zero(x):
            continue
        for j, y in enumerate(b.coeffs):
            coeffs[i + j] += x * y
    return BinaryForm(a.degree + b.degree, tuple(coeffs), backend)


def monomial_exponents(degree: int, nvars: int = 4) -> List[Tuple[int, ...]]:
    """All exponent tuples of the given degree, t0-exponent descending."""
    exponents = []
    for combo in combinations_with_replacement(range(nvars), degree):
        exponents.append(tuple(combo.count(i) for i in range(nvars)))
    return sorted(exponents, reverse=True)


def surface_space_dimension(degree: int) -> int:
    """Dimension of the projective space of degree-d surfaces in P^3."""
    return comb(degree + 3, 3) - 1


@dataclass(frozen=True)
class QuaternaryForm:
    """Sparse homogeneous form in t0, t1, t2, t3."""

    degree: int
    coeffs: Mapping[Exponent, Scalar] = field(hash=False)
    backend: Backend = Backend.EXACT

    def __post_init__(self) -> None:
        cleaned: Dict[Exponent, Scalar] = {}
        for exps, value in self.coeffs.items():
            exps = tuple(int(e) for e in exps)  # type: ignore[assignment]
            if len(exps) != 4 or min(exps) < 0 or sum(exps) != self.degree:
                raise DegreeMismatchError(
                    f"Exponent {list(exps)} does not have degree {self.degree}"
                )
            c = coerce_scalar(value, self.backend)
            if c == 0:
                continue
            cleaned[exps] = c
        object.__setattr__(self, "coeffs", cleaned)

    @classmethod
    def from_terms(
        cls,
        degree: int,
        terms: Mapping[Sequence[int], object],
        backend: Optional[Backend] = None,
    ) -> "QuaternaryForm":
        if backend is None:
            backend = infer_backend(terms.values())
        return cls(degree, {tuple(k): v for k, v in terms.items()}, backend)  # type: ignore[misc]

    @classmethod
    def zero(cls, degree: int, backend: Backend = Backend.EXACT) -> "QuaternaryForm":
        return cls(degree, {}, backend)

    @classmethod
    def monomial(
        cls, exponent: Sequence[int], coeff: object = 1, backend: Backend = Backend.EXACT
    ) -> "QuaternaryForm":
        return cls(sum(exponent), {tuple(exponent): coeff}, backend)  # type: ignore[dict-item]

    @classmethod
    def linear(
        cls, vector: Sequence[object], backend: Optional[Backend] = None
    ) -> "QuaternaryForm":
        if backend is None:
            backend = infer_backend(vector)
        terms = {}
        for j, value in enumerate(vector):
            exps = [0, 0, 0, 0]
            exps[j] = 1
            terms[tuple(exps)] = value
        return cls(1, terms, backend)  # type: ignore[arg-type]

    @classmethod
    def from_binary(cls, b: BinaryForm) -> "QuaternaryForm":
        """Embed a binary form as a form in t0, t1 only."""
        k = b.degree
        return cls(k, {(k - i, i, 0, 0): c for i, c in enumerate(b.coeffs)}, b.backend)

    def coefficient(self, exponent: Sequence[int]) -> Scalar:
        return self.coeffs.get(tuple(exponent), scalar_zero(self.backend))  # type: ignore[call-overload]

    def terms(self) -> List[Tuple[Exponent, Scalar]]:
        """Nonzero terms in a fixed order."""
        return sorted(self.coeffs.items(), reverse=True)

    def _check(self, other: "QuaternaryForm") -> None:
        _require_same_backend(self.backend, other.backend)
        if self.degree != other.degree:
            raise DegreeMismatchError(f"Degree mismatch: {self.degree} vs {other.degree}")

    def __add__(self, other: "QuaternaryForm") -> "QuaternaryForm":
        self._check(other)
        merged = dict(self.coeffs)
        for exps, c in other.coeffs.items():
            merged[exps] = merged.get(exps, scalar_zero(self.backend)) + c
        return QuaternaryForm(self.degree, merged, self.backend)

    def __sub__(self, other: "QuaternaryForm") -> "QuaternaryForm":
        return self + other.scale(-1)

    def __mul__(self, other: object) -> "QuaternaryForm":
        if not isinstance(other, QuaternaryForm):
            return self.scale(other)
        backend = _require_same_backend(self.backend, other.backend)
        product: Dict[Exponent, Scalar] = {}
        for ea, ca in self.coeffs.items():
            for eb, cb in other.coeffs.items():
                key = (ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2], ea[3] + eb[3])
                product[key] = product.get(key, scalar_zero(backend)) + ca * cb
        return QuaternaryForm(self.degree + other.degree, product, backend)

    __rmul__ = __mul__

    def scale(self, factor: object) -> "QuaternaryForm":
        c = coerce_scalar(factor, self.backend)
        return QuaternaryForm(
            self.degree, {e: c * v for e, v in self.coeffs.items()}, self.backend
        )

    def power(self, exponent: int) -> "QuaternaryForm":
        result = QuaternaryForm.monomial((0, 0, 0, 0), 1, self.backend)
        for _ in range(exponent):
            result = result * self
        return result

    def is_zero(self, tol: float = 0.0) -> bool:
        if not self.coeffs:
            return True
        if self.backend is Backend.FLOAT and tol > 0:
            return self.max_abs() <= tol
        return False

    def max_abs(self) -> float:
        return max((abs(complex(c)) for c in self.coeffs.values()), default=0.0)

    def evaluate(self, point: Sequence[object]) -> Scalar:
        p = [coerce_scalar(x, self.backend) for x in point]
        total = scalar_zero(self.backend)
        for (i0, i1, i2, i3), c in self.coeffs.items():
            total += c * p[0] ** i0 * p[1] ** i1 * p[2] ** i2 * p[3] ** i3
        return total

    def partial(self, variable: int) -> "QuaternaryForm":
        if self.degree == 0:
            return QuaternaryForm.zero(0, self.backend)
        result: Dict[Exponent, Scalar] = {}
        for exps, c in self.coeffs.items():
            if exps[variable] == 0:
                continue
            lowered = list(exps)
            lowered[variable] -= 1
            result[tuple(lowered)] = c * exps[variable]  # type: ignore[index]
        return QuaternaryForm(self.degree - 1, result, self.backend)

    def gradient(self, point: Sequence[object]) -> List[Scalar]:
        return [self.partial(j).evaluate(point) for j in range(4)]

    def hessian(self, point: Sequence[object]) -> List[List[Scalar]]:
        firsts = [self.partial(j) for j in range(4)]
        return [[firsts[i].partial(j).evaluate(point) for j in range(4)] for i in range(4)]

    def restrict_to_points(self, p: Sequence[object], q: Sequence[object]) -> BinaryForm:
        """Binary form f(t0*p + t1*q) on the line through p and q."""
        lines = [BinaryForm.from_coeffs([p[j], q[j]], self.backend) for j in range(4)]
        powers: List[List[BinaryForm]] = []
        for line in lines:
            cache = [BinaryForm.one(self.backend)]
            for _ in range(self.degree):
                cache.append(binary_mul(cache[-1], line))
            powers.append(cache)
        result = BinaryForm.zero(self.degree, self.backend)
        for exps, c in self.coeffs.items():
            term = BinaryForm.one(self.backend)
            for j in range(4):
                if exps[j]:
                    term = binary_mul(term, powers[j][exps[j]])
            result = result + term.scale(c)
        return result

    def substitute_linear(self, matrix: Sequence[Sequence[object]]) -> "QuaternaryForm":
        """Return f(M s), i.e. t_i = sum_j M[i][j] s_j."""
        rows = [QuaternaryForm.linear(list(matrix[i]), self.backend) for i in range(4)]
        powers: List[List[QuaternaryForm]] = []
        for row in rows:
            cache = [QuaternaryForm.monomial((0, 0, 0, 0), 1, self.backend)]
            for _ in range(self.degree):
                cache.append(cache[-1] * row)
            powers.append(cache)
        accumulated: Dict[Exponent, Scalar] = {}
        for exps, c in self.coeffs.items():
            term = powers[0][exps[0]] * powers[1][exps[1]] * powers[2][exps[2]] * powers[3][exps[3]]
            for key, value in term.coeffs.items():
                accumulated[key] = accumulated.get(key, scalar_zero(self.backend)) + c * value
        return QuaternaryForm(self.degree, accumulated, self.backend)

    def to_float(self) -> "QuaternaryForm":
        if self.backend is Backend.FLOAT:
            return self
        return QuaternaryForm(
            self.degree,
            {e: complex(float(c)) for e, c in self.coeffs.items()},
            Backend.FLOAT,
        )

    def exponent_arrays(self) -> Tuple[np.ndarray, np.ndarray]:
        """Exponents (n, 4) and complex coefficients (n,) for vectorized evaluation."""
        items = self.terms()
        if not items:
            return np.zeros((0, 4), dtype=int), np.zeros(0, dtype=complex)
        exps = np.array([e for e, _ in items], dtype=int)
        values = np.array([complex(c) for _, c in items], dtype=complex)
        return exps, values


def restrict_to_line(f: QuaternaryForm, chart: "LineChart") -> BinaryForm:
    """Substitute t2 = a0 t0 + a1 t1, t3 = b0 t0 + b1 t1."""
    zero = scalar_zero(f.backend)
    one = scalar_one(f.backend)
    p = [one, zero, chart.a0, chart.b0]
    q = [zero, one, chart.a1, chart.b1]
    return f.restrict_to_points(p, q)


@dataclass(frozen=True)
class Surface:
    """Degree-d surface Y = (f = 0) in P^3."""

    form: QuaternaryForm

    @property
    def degree(self) -> int:
        return self.form.degree

    @property
    def backend(self) -> Backend:
        return self.form.backend

    @classmethod
    def random(
        cls,
        degree: int,
        rng: np.random.Generator,
        backend: Backend = Backend.FLOAT,
        bound: int = 5,
    ) -> "Surface":
        """Surface with independent random coefficients on every monomial."""
        terms: Dict[Exponent, Scalar] = {}
        for exps in monomial_exponents(degree):
            if backend is Backend.EXACT:
                terms[exps] = Fraction(int(rng.integers(-bound, bound + 1)))  # type: ignore[index]
            else:
                re, im = rng.standard_normal(2)
                terms[exps] = complex(re, im) / np.sqrt(2.0)  # type: ignore[index]
        return cls(QuaternaryForm(degree, terms, backend))

    def restrict(self, p: Sequence[object], q: Sequence[object]) -> BinaryForm:
        return self.form.restrict_to_points(p, q)

    def restrict_to_line(self, chart: "LineChart") -> BinaryForm:
        return restrict_to_line(self.form, chart)

    def evaluate(self, point: Sequence[object]) -> Scalar:
        return self.form.evaluate(point)

    def gradient(self, point: Sequence[object]) -> List[Scalar]:
        return self.form.gradient(point)

    def hessian(self, point: Sequence[object]) -> List[List[Scalar]]:
        return self.form.hessian(point)

    def is_singular_at(self, point: Sequence[object], tol: float = 1e-9) -> bool:
        """True when every partial derivative vanishes at the point."""
        grad = self.gradient(point)
        if self.backend is Backend.EXACT:
            return all(c == 0 for c in grad)
        scale = self.form.max_abs() * max(
            float(np.linalg.norm(np.array(point, dtype=complex))), 1.0
        ) ** max(self.degree - 1, 0)
        return float(np.linalg.norm(np.array(grad, dtype=complex))) <= tol * max(scale, 1.0)

    def tangent_plane(self, point: Sequence[object], tol: float = 1e-9) -> Tuple[Scalar, ...]:
        """Coefficients of the embedded tangent plane at a smooth point."""
        if self.is_singular_at(point, tol):
            raise SingularContactError(
                f"Surface is singular at {list(point)}; no tangent plane", contact=str(point)
            )
        return tuple(self.gradient(point))

    def transformed(self, matrix: Sequence[Sequence[object]]) -> "Surface":
        """Surface pulled back along s -> M s."""
        return Surface(self.form.substitute_linear(matrix))

    def to_float(self) -> "Surface":
        return Surface(self.form.to_float())

    def normalized(self) -> "Surface":
        if self.form.is_zero():
            raise ZeroFormError("Surface equation is zero")
        if self.backend is Backend.EXACT:
            return self
        return Surface(self.form.scale(1 / self.form.max_abs()))


@dataclass(frozen=True)
class FormSpan:
    """Row-reduced basis of a subspace of degree-k binary forms."""

    degree: int
    basis: Tuple[BinaryForm, ...]
    backend: Backend = Backend.EXACT
    rank_tol: float = 1e-9

    @property
    def dim(self) -> int:
        return len(self.basis)

    def is_full(self) -> bool:
        return self.dim == self.degree + 1

    def contains(self, form: BinaryForm) -> bool:
        return span_join(self, span([form], degree=self.degree, rank_tol=self.rank_tol)).dim == self.dim

    def same_span(self, other: "FormSpan") -> bool:
        return self.dim == other.dim and span_join(self, other).dim == self.dim

    def matrix(self) -> np.ndarray:
        if not self.basis:
            return np.zeros((0, self.degree + 1), dtype=complex)
        return np.array([b.vector() for b in self.basis])


def _exact_span(forms: Sequence[BinaryForm], degree: int) -> Tuple[BinaryForm, ...]:
    rows = [[sympy.Rational(c.numerator, c.denominator) for c in f.coeffs] for f in forms]
    reduced, pivots = sympy.Matrix(rows).rref()
    basis = []
    for r in range(len(pivots)):
        coeffs = tuple(to_fraction(reduced[r, c]) for c in range(degree + 1))
        basis.append(BinaryForm(degree, coeffs, Backend.EXACT))
    return tuple(basis)


def _float_span(
    forms: Sequence[BinaryForm], degree: int, rank_tol: float
) -> Tuple[BinaryForm, ...]:
    matrix = np.array([f.vector() for f in forms], dtype=complex)
    _, singular, vh = linalg.svd(matrix, full_matrices=False)
    if singular.size == 0 or singular[0] == 0:
        return ()
    rank = int(np.sum(singular > rank_tol * singular[0]))
    rows = vh[:rank].copy()
    pivot_row = 0
    for col in range(degree + 1):
        if pivot_row == rank:
            break
        best = pivot_row + int(np.argmax(np.abs(rows[pivot_row:, col])))
        if abs(rows[best, col]) <= 1e-10:
            continue
        rows[[pivot_row, best]] = rows[[best, pivot_row]]
        rows[pivot_row] /= rows[pivot_row, col]
        for r in range(rank):
            if r != pivot_row:
                rows[r] -= rows[r, col] * rows[pivot_row]
        pivot_row += 1
    if pivot_row < rank:
        rows = vh[:rank]
    return tuple(BinaryForm(degree, tuple(row), Backend.FLOAT) for row in rows)


def span(
    forms: Sequence[BinaryForm],
    degree: Optional[int] = None,
    rank_tol: float = 1e-9,
) -> FormSpan:
    """Reduced echelon basis of the span of the given forms."""
    if not forms:
        return FormSpan(degree if degree is not None else 0, (), Backend.EXACT, rank_tol)
    backend = _require_same_backend(*(f.backend for f in forms))
    k = forms[0].degree
    for f in forms:
        if f.degree != k:
            raise DegreeMismatchError(f"Degree mismatch in span: {k} vs {f.degree}")
    if degree is not None and degree != k:
        raise DegreeMismatchError(f"Forms have degree {k}, expected {degree}")
    if backend is Backend.EXACT:
        basis = _exact_span(forms, k)
    else:
        basis = _float_span(forms, k, rank_tol)
    return FormSpan(k, basis, backend, rank_tol)


def span_join(u: FormSpan, v: FormSpan) -> FormSpan:
    """Span of the union of two spans."""
    if u.degree != v.degree:
        raise DegreeMismatchError(f"Cannot join spans of degree {u.degree} and {v.degree}")
    forms = list(u.basis) + list(v.basis)
    if not forms:
        return FormSpan(u.degree, (), u.backend, u.rank_tol)
    return span(forms, degree=u.degree, rank_tol=max(u.rank_tol, v.rank_tol))


def _to_sympy(b: BinaryForm) -> sympy.Expr:
    k = b.degree
    return sum(
        (
            sympy.Rational(c.numerator, c.denominator) * _T0 ** (k - i) * _T1**i
            for i, c in enumerate(b.coeffs)
        ),
        sympy.Integer(0),
    )


def _from_sympy(expr: sympy.Expr) -> BinaryForm:
    poly = sympy.Poly(expr, _T0, _T1)
    k = poly.total_degree()
    coeffs = [to_fraction(poly.coeff_monomial(_T0 ** (k - i) * _T1**i)) for i in range(k + 1)]
    return BinaryForm(k, tuple(coeffs), Backend.EXACT)


def binary_gcd(*forms: BinaryForm) -> BinaryForm:
    """Greatest common divisor of exact binary forms, ignoring zero forms."""
    for f in forms:
        _require_same_backend(Backend.EXACT, f.backend)
    nonzero = [_to_sympy(f) for f in forms if not f.is_zero()]
    if not nonzero:
        raise ZeroFormError("gcd of zero forms is undefined")
    return _from_sympy(reduce(sympy.gcd, nonzero))


def is_square_free(b: BinaryForm) -> bool:
    """Exact test that b has no repeated root on P^1."""
    if b.degree <= 1:
        return not b.is_zero()
    return binary_gcd(b, b.derivative(0), b.derivative(1)).degree == 0


class DivisorPoint(NamedTuple):
    """A point of P^1 with multiplicity."""

    point: ProjectivePoint
    multiplicity: int


def _unit(v: np.ndarray) -> np.ndarray:
    return v / np.linalg.norm(v)


def chordal_distance(a: Sequence[complex], b: Sequence[complex]) -> float:
    """Chordal (Fubini-Study sine) distance between two projective points."""
    u = _unit(np.asarray(a, dtype=complex))
    w = _unit(np.asarray(b, dtype=complex))
    overlap = min(abs(np.vdot(u, w)), 1.0)
    return float(np.sqrt(max(0.0, 1.0 - overlap**2)))


def normalize_point(v: Sequence[complex]) -> ProjectivePoint:
    """Affine representative with the larger coordinate set to one."""
    x, y = complex(v[0]), complex(v[1])
    if abs(y) >= abs(x):
        return (x / y, 1 + 0j)
    return (1 + 0j, y / x)


def merge_divisors(
    items: Sequence[Tuple[Sequence[complex], int]], cluster_radius: float = 1e-6
) -> List[DivisorPoint]:
    """Agglomerate weighted points of P^1 that lie within the merge radius."""
    clusters: List[Tuple[np.ndarray, int]] = [
        (_unit(np.asarray(p, dtype=complex)), m) for p, m in items
    ]
    while len(clusters) > 1:
        best: Optional[Tuple[float, int, int]] = None
        for i in range(len(clusters)):
            for j in range(i + 1, len(clusters)):
                m = clusters[i][1] + clusters[j][1]
                radius = max(cluster_radius, 10.0 * _EPS ** (1.0 / m))
                dist = chordal_distance(clusters[i][0], clusters[j][0])
                if dist <= radius and (best is None or dist < best[0]):
                    best = (dist, i, j)
        if best is None:
            break
        _, i, j = best
        (u, mu), (w, mw) = clusters[i], clusters[j]
        overlap = np.vdot(u, w)
        if abs(overlap) > 0:
            w = w * np.conj(overlap) / abs(overlap)
        merged = _unit(mu * u + mw * w)
        clusters[i] = (merged, mu + mw)
        del clusters[j]
    return [DivisorPoint(normalize_point(v), m) for v, m in clusters]


def root_divisor(b: BinaryForm, cluster_radius: float = 1e-6) -> List[DivisorPoint]:
    """Roots of a binary form on P^1 with multiplicities summing to its degree."""
    b = b.to_float()
    if b.is_zero():
        raise ZeroFormError("The zero form has no root divisor")
    coeffs = b.vector()
    at_infinity = 0
    while at_infinity < b.degree and coeffs[at_infinity] == 0:
        at_infinity += 1
    items: List[Tuple[Sequence[complex], int]] = []
    if at_infinity:
        items.append(((1 + 0j, 0j), at_infinity))
    if b.degree - at_infinity > 0:
        for z in np.roots(coeffs[at_infinity:]):
            items.append(((complex(z), 1 + 0j), 1))
    return merge_divisors(items, cluster_radius)


def binary_quotient(a: BinaryForm, b: BinaryForm) -> BinaryForm:
    """Exact quotient a / b; b must divide a."""
    for f in (a, b):
        _require_same_backend(Backend.EXACT, f.backend)
    if b.is_zero():
        raise ZeroFormError("Division by the zero form")
    quotient, remainder = sympy.div(_to_sympy(a), _to_sympy(b), _T0, _T1)
    if sympy.expand(remainder) != 0:
        raise DegreeMismatchError("Binary form division leaves a remainder")
    return _from_sympy(quotient)


def sympy_matrix(rows: Sequence[Sequence[Scalar]]) -> sympy.Matrix:
    return sympy.Matrix(
        [[sympy.Rational(c.numerator, c.denominator) for c in row] for row in rows]  # type: ignore[union-attr]
    )


def float_matrix(rows: Sequence[Sequence[Scalar]]) -> np.ndarray:
    return np.array([[complex(c) for c in row] for row in rows], dtype=complex)


def matrix_rank(rows: Sequence[Sequence[Scalar]], backend: Backend, rank_tol: float = 1e-9) -> int:
    """Exact rank, or the count of singular values above rank_tol times the largest."""
    if not rows or not rows[0]:
        return 0
    if backend is Backend.EXACT:
        return int(sympy_matrix(rows).rank())
    singular = linalg.svdvals(float_matrix(rows))
    if singular.size == 0 or singular[0] == 0:
        return 0
    return int(np.sum(singular > rank_tol * singular[0]))


def kernel(
    rows: Sequence[Sequence[Scalar]], backend: Backend, rank_tol: float = 1e-9
) -> List[Tuple[Scalar, ...]]:
    """Basis of the right kernel {x : A x = 0}."""
    if backend is Backend.EXACT:
        basis = sympy_matrix(rows).nullspace()
        return [tuple(to_fraction(v) for v in vec) for vec in basis]
    matrix = float_matrix(rows)
    if not np.any(matrix):
        return [tuple(row) for row in np.eye(matrix.shape[1], dtype=complex)]
    null = linalg.null_space(matrix, rcond=rank_tol)
    return [tuple(complex(v) for v in null[:, k]) for k in range(null.shape[1])]


def left_kernel(
    rows: Sequence[Sequence[Scalar]], backend: Backend, rank_tol: float = 1e-9
) -> List[Tuple[Scalar, ...]]:
    """Basis of {w : w^T A = 0}."""
    transposed = [list(col) for col in zip(*rows)]
    return kernel(transposed, backend, rank_tol)
