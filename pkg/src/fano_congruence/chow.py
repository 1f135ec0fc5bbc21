# SPDX-License-Identifier: Apache-2.0
# SPDX-FileCopyrightText: 2025 The Linux Foundation

"""Exact intersection theory for the class of S(Y).

Chow ring of Gr(2,4) in the Schubert basis, Chern classes of Sym^k of the
dual tautological bundle by the splitting principle, the Chow ring of
F = P(Sym^2) x_G P(Sym^{d-4}), the class c_d(R) and the congruence bidegree.
"""

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, List, Mapping, Tuple

import sympy
from sympy.polys.polyfuncs import symmetrize

from .error_handling import DegreeMismatchError

SCHUBERT_NAMES: Tuple[str, ...] = ("1", "s1", "s2", "s11", "s21", "s22")
SCHUBERT_DEGREES: Tuple[int, ...] = (0, 1, 2, 2, 3, 4)

ONE, S1, S2, S11, S21, S22 = range(6)

# Products of basis elements; anything of degree above 4 is zero.
_TABLE: Dict[Tuple[int, int], Dict[int, int]] = {
    (S1, S1): {S2: 1, S11: 1},
    (S1, S2): {S21: 1},
    (S1, S11): {S21: 1},
    (S1, S21): {S22: 1},
    (S2, S2): {S22: 1},
    (S11, S11): {S22: 1},
    (S2, S11): {},
}


def _basis_product(a: int, b: int) -> Dict[int, int]:
    if a == ONE:
        return {b: 1}
    if b == ONE:
        return {a: 1}
    if SCHUBERT_DEGREES[a] + SCHUBERT_DEGREES[b] > 4:
        return {}
    return _TABLE.get((a, b), _TABLE.get((b, a), {}))


@dataclass(frozen=True)
class SchubertClass:
    """Integer combination of 1, s1, s2, s11, s21, s22 in the Chow ring of Gr(2,4)."""

    coeffs: Tuple[int, int, int, int, int, int] = (0, 0, 0, 0, 0, 0)

    @classmethod
    def basis(cls, name: str) -> "SchubertClass":
        coeffs = [0] * 6
        coeffs[SCHUBERT_NAMES.index(name)] = 1
        return cls(tuple(coeffs))  # type: ignore[arg-type]

    @classmethod
    def one(cls) -> "SchubertClass":
        return cls.basis("1")

    def __add__(self, other: "SchubertClass") -> "SchubertClass":
        return SchubertClass(tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))  # type: ignore[arg-type]

    def __sub__(self, other: "SchubertClass") -> "SchubertClass":
        return self + other.scale(-1)

    def __mul__(self, other: "SchubertClass") -> "SchubertClass":
        return schubert_mul(self, other)

    def scale(self, factor: int) -> "SchubertClass":
        return SchubertClass(tuple(factor * a for a in self.coeffs))  # type: ignore[arg-type]

    def power(self, exponent: int) -> "SchubertClass":
        result = SchubertClass.one()
        for _ in range(exponent):
            result = result * self
        return result

    def degree_part(self, degree: int) -> "SchubertClass":
        return SchubertClass(
            tuple(c if SCHUBERT_DEGREES[k] == degree else 0 for k, c in enumerate(self.coeffs))  # type: ignore[arg-type]
        )

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def integral(self) -> int:
        """Degree of the top-dimensional part."""
        return self.coeffs[S22]

    def labelled(self) -> Dict[str, int]:
        return {SCHUBERT_NAMES[k]: c for k, c in enumerate(self.coeffs) if c}


def schubert_mul(a: SchubertClass, b: SchubertClass) -> SchubertClass:
    """Product in the Chow ring of Gr(2,4)."""
    result = [0] * 6
    for i, x in enumerate(a.coeffs):
        if not x:
            continue
        for j, y in enumerate(b.coeffs):
            if not y:
                continue
            for k, m in _basis_product(i, j).items():
                result[k] += x * y * m
    return SchubertClass(tuple(result))  # type: ignore[arg-type]


@dataclass(frozen=True)
class ChernVector:
    """Total Chern class of a named bundle on Gr(2,4), by degree."""

    name: str
    rank: int
    classes: Tuple[SchubertClass, ...]

    def c(self, k: int) -> SchubertClass:
        if 0 <= k < len(self.classes):
            return self.classes[k]
        return SchubertClass()

    def total(self) -> SchubertClass:
        result = SchubertClass()
        for part in self.classes:
            result = result + part
        return result


@lru_cache(maxsize=None)
def chern_sym(k: int) -> ChernVector:
    """Chern classes of Sym^k of the dual tautological bundle.

    The Chern roots are i*alpha + (k-i)*beta with alpha + beta = s1 and
    alpha * beta = s11.
    """
    if k < 0:
        raise DegreeMismatchError(f"Symmetric power must be nonnegative, got {k}")
    alpha, beta = sympy.symbols("alpha beta")
    total = sympy.Integer(1)
    for i in range(k + 1):
        total *= 1 + i * alpha + (k - i) * beta
    poly = sympy.Poly(sympy.expand(total), alpha, beta)
    elementary = {alpha + beta: SchubertClass.basis("s1"), alpha * beta: SchubertClass.basis("s11")}

    classes: List[SchubertClass] = [SchubertClass.one()]
    for degree in range(1, min(k + 1, 4) + 1):
        part = sum(
            (c * alpha**a * beta**b for (a, b), c in poly.terms() if a + b == degree),
            sympy.Integer(0),
        )
        if part == 0:
            classes.append(SchubertClass())
            continue
        symmetric, remainder, definitions = symmetrize(part, alpha, beta, formal=True)
        if remainder != 0:
            raise DegreeMismatchError("Chern class is not symmetric in the Chern roots")
        substitutions = [(symbol, elementary[sympy.expand(expr)]) for symbol, expr in definitions]
        symbols = [symbol for symbol, _ in substitutions]
        value = SchubertClass()
        for exps, coeff in sympy.Poly(symmetric, *symbols).terms():
            term = SchubertClass.one().scale(int(coeff))
            for (_, klass), e in zip(substitutions, exps):
                term = term * klass.power(e)
            value = value + term
        classes.append(value)
    return ChernVector(f"Sym^{k}", k + 1, tuple(classes))


Monomial = Tuple[int, int, int]


@dataclass(frozen=True)
class ChowClass:
    """Integer combination of monomials s * zL^i * zM^j on F for surfaces of degree d.

    Classes built by hand may hold monomials outside normal form; ``reduce``
    rewrites them with the projective bundle relations.
    """

    d: int
    terms: Mapping[Monomial, int] = field(hash=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "terms", {m: c for m, c in self.terms.items() if c})

    @classmethod
    def zero(cls, d: int) -> "ChowClass":
        return cls(d, {})

    @classmethod
    def one(cls, d: int) -> "ChowClass":
        return cls(d, {(ONE, 0, 0): 1})

    @classmethod
    def zeta_L(cls, d: int) -> "ChowClass":
        return cls(d, {(ONE, 1, 0): 1})

    @classmethod
    def zeta_M(cls, d: int) -> "ChowClass":
        if d == 4:
            raise DegreeMismatchError("zM does not exist for quartics")
        return cls(d, {(ONE, 0, 1): 1})

    @classmethod
    def pullback(cls, d: int, sigma: SchubertClass) -> "ChowClass":
        return cls(d, {(k, 0, 0): c for k, c in enumerate(sigma.coeffs) if c})

    def _check(self, other: "ChowClass") -> None:
        if self.d != other.d:
            raise DegreeMismatchError(f"Classes live on different F: d={self.d} vs d={other.d}")

    def __add__(self, other: "ChowClass") -> "ChowClass":
        self._check(other)
        merged = dict(self.terms)
        for m, c in other.terms.items():
            merged[m] = merged.get(m, 0) + c
        return ChowClass(self.d, merged)

    def __sub__(self, other: "ChowClass") -> "ChowClass":
        return self + other.scale(-1)

    def scale(self, factor: int) -> "ChowClass":
        return ChowClass(self.d, {m: factor * c for m, c in self.terms.items()})

    def __mul__(self, other: "ChowClass") -> "ChowClass":
        self._check(other)
        product: Dict[Monomial, int] = {}
        for (sa, ia, ja), ca in self.terms.items():
            for (sb, ib, jb), cb in other.terms.items():
                for s, m in _basis_product(sa, sb).items():
                    key = (s, ia + ib, ja + jb)
                    product[key] = product.get(key, 0) + ca * cb * m
        return reduce(ChowClass(self.d, product))

    def power(self, exponent: int) -> "ChowClass":
        result = ChowClass.one(self.d)
        for _ in range(exponent):
            result = result * self
        return result

    def graded_part(self, degree: int) -> "ChowClass":
        return ChowClass(
            self.d,
            {m: c for m, c in self.terms.items() if graded_degree(m) == degree},
        )

    def is_zero(self) -> bool:
        return not self.terms

    def integral(self) -> int:
        """Integral over F: the coefficient of s22 * zL^2 * zM^(d-4) in normal form."""
        return reduce(self).terms.get((S22, 2, self.d - 4), 0)

    def labelled(self) -> Dict[str, int]:
        """Coefficients keyed by a readable monomial name, in a fixed order."""
        labels = {}
        for (s, i, j), c in sorted(reduce(self).terms.items()):
            parts = [SCHUBERT_NAMES[s]] if s != ONE or (i == 0 and j == 0) else []
            if i:
                parts.append(f"zL^{i}")
            if j:
                parts.append(f"zM^{j}")
            labels["*".join(parts)] = c
        return labels


def graded_degree(monomial: Monomial) -> int:
    s, i, j = monomial
    return SCHUBERT_DEGREES[s] + i + j


def fano_bundle_dimension(d: int) -> int:
    """Dimension of F, which is d + 2."""
    _require_degree(d)
    return d + 2


def _require_degree(d: int) -> None:
    if d < 4:
        raise DegreeMismatchError(f"Surface degree must be at least 4, got {d}")


def _relation(rank: int, bundle: ChernVector) -> List[Tuple[int, SchubertClass]]:
    """zeta^rank = sum over k of (-c_k) zeta^(rank - k)."""
    return [(rank - k, bundle.c(k).scale(-1)) for k in range(1, rank + 1)]


def reduce(c: ChowClass) -> ChowClass:
    """Normal form with i <= 2 and j <= d - 4."""
    d = c.d
    _require_degree(d)
    l_relation = _relation(3, chern_sym(2))
    m_rank = d - 3
    m_relation = _relation(m_rank, chern_sym(d - 4)) if d > 4 else []
    result: Dict[Monomial, int] = {}
    pending = list(c.terms.items())
    while pending:
        (s, i, j), coeff = pending.pop()
        if not coeff:
            continue
        if d == 4 and j:
            raise DegreeMismatchError("zM does not exist for quartics")
        if i >= 3:
            for power, klass in l_relation:
                for t, m in _sigma_times(s, klass).items():
                    pending.append(((t, i - 3 + power, j), coeff * m))
            continue
        if d > 4 and j >= m_rank:
            for power, klass in m_relation:
                for t, m in _sigma_times(s, klass).items():
                    pending.append(((t, i, j - m_rank + power), coeff * m))
            continue
        result[(s, i, j)] = result.get((s, i, j), 0) + coeff
    return ChowClass(d, result)


def _sigma_times(s: int, klass: SchubertClass) -> Dict[int, int]:
    product = schubert_mul(SchubertClass.basis(SCHUBERT_NAMES[s]), klass)
    return {k: c for k, c in enumerate(product.coeffs) if c}


def _twist_power(d: int, exponent: int) -> ChowClass:
    """(2 zL + zM)^exponent, with zM dropped for quartics."""
    base = ChowClass.zeta_L(d).scale(2)
    if d > 4:
        base = base + ChowClass.zeta_M(d)
    return base.power(exponent)


def chern_R(d: int, k: int) -> ChowClass:
    """k-th Chern class of R = Sym^d / (L^-2 M^-1)."""
    _require_degree(d)
    sym = chern_sym(d)
    result = ChowClass.zero(d)
    for i in range(min(k, 4) + 1):
        part = sym.c(i)
        if part.is_zero():
            continue
        result = result + ChowClass.pullback(d, part) * _twist_power(d, k - i)
    return result


def total_chern_R(d: int) -> ChowClass:
    result = ChowClass.zero(d)
    for k in range(d + 1):
        result = result + chern_R(d, k)
    return result


@lru_cache(maxsize=None)
def class_of_S(d: int) -> ChowClass:
    """The class c_d(R) of S(Y) in the Chow ring of F."""
    return chern_R(d, d)


def bidegree(d: int) -> Tuple[int, int]:
    """(order, class): intersections of [S(Y)] with s2 and with s11."""
    klass = class_of_S(d)
    order = (klass * ChowClass.pullback(d, SchubertClass.basis("s2"))).integral()
    cls = (klass * ChowClass.pullback(d, SchubertClass.basis("s11"))).integral()
    return order, cls


def classical_bidegree(d: int) -> Tuple[int, int]:
    """Closed forms for the bitangent congruence of a general surface of degree d."""
    _require_degree(d)
    return d * (d - 1) * (d - 2) * (d - 3) // 2, d * (d - 2) * (d - 3) * (d + 3) // 2
