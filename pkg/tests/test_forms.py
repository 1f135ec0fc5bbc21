# SPDX-License-Identifier: Apache-2.0
# SPDX-FileCopyrightText: 2025 The Linux Foundation

"""Tests for binary and quaternary forms, spans and root divisors."""

from fractions import Fraction

import numpy as np
import pytest

from fano_congruence.error_handling import (
    BackendMismatchError,
    DegreeMismatchError,
    SingularContactError,
    ZeroFormError,
)
from fano_congruence.forms import (
    Backend,
    BinaryForm,
    QuaternaryForm,
    Surface,
    binary_gcd,
    binary_mul,
    binary_quotient,
    chordal_distance,
    is_square_free,
    kernel,
    matrix_rank,
    merge_divisors,
    monomial_exponents,
    root_divisor,
    span,
    span_join,
    surface_space_dimension,
)

from .planted import NODE, nodal_quartic


def t0() -> BinaryForm:
    return BinaryForm.monomial(1, 0)


def t1() -> BinaryForm:
    return BinaryForm.monomial(1, 1)


class TestBinaryForm:
    """Arithmetic and evaluation of binary forms."""

    def test_coefficient_count_must_match_degree(self):
        """Test that a form rejects the wrong number of coefficients."""
        with pytest.raises(DegreeMismatchError):
            BinaryForm(2, (1, 2))

    def test_mixed_backends_rejected(self):
        """Test that exact and float scalars cannot share a form."""
        with pytest.raises(BackendMismatchError):
            BinaryForm.from_coeffs([Fraction(1, 2), 1.5])
        with pytest.raises(BackendMismatchError):
            BinaryForm.from_coeffs([1, 2]) + BinaryForm.from_coeffs([1.0, 2.0])

    def test_integers_are_exact(self):
        """Test that integer coefficients select the exact backend."""
        form = BinaryForm.from_coeffs([1, 2, 3])
        assert form.backend is Backend.EXACT
        assert form.coeffs == (Fraction(1), Fraction(2), Fraction(3))

    def test_product(self):
        """Test (t0 + t1)(t0 - t1) = t0^2 - t1^2."""
        product = binary_mul(t0() + t1(), t0() - t1())
        assert product.coeffs == (1, 0, -1)

    def test_from_root_vanishes_at_root(self):
        """Test the linear form through a point of P^1."""
        form = BinaryForm.from_root((1, 2))
        assert form.evaluate(1, 2) == 0
        assert form.evaluate(1, 0) != 0

    def test_substitute_swaps_variables(self):
        """Test substitution t0 -> w1, t1 -> w0."""
        form = BinaryForm.from_coeffs([1, 2, 3])
        swapped = form.substitute([[0, 1], [1, 0]])
        assert swapped.coeffs == (3, 2, 1)

    def test_derivatives(self):
        """Test partial derivatives of t0^2 t1."""
        form = BinaryForm.monomial(3, 1)
        assert form.derivative(0).coeffs == (0, 2, 0)
        assert form.derivative(1).coeffs == (1, 0, 0)

    def test_normalized(self):
        """Test normalization in both backends."""
        exact = BinaryForm.from_coeffs([0, 2, 4]).normalized()
        assert exact.coeffs == (0, 1, 2)
        floating = BinaryForm.from_coeffs([0.5, -2.0, 1.0]).normalized()
        assert floating.coeffs[1] == pytest.approx(1.0)
        with pytest.raises(ZeroFormError):
            BinaryForm.zero(2).normalized()


class TestExactAlgebra:
    """Exact gcd, quotient, square-freeness and rank."""

    def test_gcd(self):
        """Test gcd(t0 t1, t0 (t0 + t1)) = t0."""
        common = binary_gcd(binary_mul(t0(), t1()), binary_mul(t0(), t0() + t1()))
        assert common.degree == 1
        assert common.coeffs[1] == 0

    def test_gcd_ignores_zero_forms(self):
        """Test that zero forms do not affect the gcd."""
        common = binary_gcd(binary_mul(t0(), t1()), BinaryForm.zero(2))
        assert common.degree == 2

    def test_quotient(self):
        """Test exact division and the remainder check."""
        g = binary_mul(t0(), t1())
        assert binary_quotient(g, t0()).coeffs == (0, 1)
        with pytest.raises(DegreeMismatchError):
            binary_quotient(g, t0() + t1())

    def test_square_free(self):
        """Test detection of repeated roots."""
        assert is_square_free(binary_mul(t0(), t1()))
        assert not is_square_free(binary_mul(t0(), t0()))

    def test_matrix_rank_and_kernel(self):
        """Test exact and float ranks of a rank-one matrix."""
        assert matrix_rank([[1, 2], [2, 4]], Backend.EXACT) == 1
        noisy = [[1.0, 2.0], [2.0, 4.0 + 1e-13]]
        assert matrix_rank(noisy, Backend.FLOAT, 1e-9) == 1
        (vector,) = kernel([[Fraction(1), Fraction(1)]], Backend.EXACT)
        assert vector[0] == -vector[1] != 0


class TestSpans:
    """Row-reduced spans of binary forms."""

    def test_dimension_and_membership(self):
        """Test span dimension, membership and joins."""
        a = BinaryForm.monomial(2, 0)
        b = BinaryForm.monomial(2, 1)
        s = span([a, b, a + b])
        assert s.dim == 2
        assert s.contains(a - b.scale(3))
        assert not s.contains(BinaryForm.monomial(2, 2))
        joined = span_join(s, span([BinaryForm.monomial(2, 2)]))
        assert joined.is_full()

    def test_float_span_matches_exact(self):
        """Test the float span of the same forms has the same dimension."""
        forms = [BinaryForm.from_coeffs([1, 1, 0]), BinaryForm.from_coeffs([0, 1, 1])]
        exact = span(forms)
        floating = span([f.to_float() for f in forms])
        assert exact.dim == floating.dim == 2

    def test_degree_mismatch(self):
        """Test that a span refuses forms of different degrees."""
        with pytest.raises(DegreeMismatchError):
            span([BinaryForm.monomial(2, 0), BinaryForm.monomial(3, 0)])


class TestRootDivisor:
    """Roots on P^1 with multiplicities."""

    def test_root_at_infinity_and_double_root(self):
        """Test (t0 - t1)^2 t1: a double root at (1:1) and a simple one at (1:0)."""
        form = binary_mul(binary_mul(t0() - t1(), t0() - t1()), t1()).to_float()
        divisor = root_divisor(form)
        assert sorted(point.multiplicity for point in divisor) == [1, 2]
        double = next(point for point in divisor if point.multiplicity == 2)
        assert chordal_distance(double.point, (1, 1)) < 1e-6

    def test_multiplicities_sum_to_degree(self):
        """Test that root multiplicities add up to the degree."""
        rng = np.random.default_rng(3)
        form = BinaryForm.from_coeffs(list(rng.standard_normal(6) + 0j))
        assert sum(point.multiplicity for point in root_divisor(form)) == 5

    def test_merge_divisors(self):
        """Test merging of nearby points."""
        merged = merge_divisors([((1, 0), 1), ((1, 1e-9), 1), ((0, 1), 2)])
        assert sorted(point.multiplicity for point in merged) == [2, 2]

    def test_chordal_distance(self):
        """Test the chordal distance is projective."""
        assert chordal_distance((1, 0), (0, 1)) == pytest.approx(1.0)
        assert chordal_distance((1, 1), (2, 2)) == pytest.approx(0.0, abs=1e-12)

    def test_zero_form(self):
        """Test the zero form has no divisor."""
        with pytest.raises(ZeroFormError):
            root_divisor(BinaryForm.zero(2, Backend.FLOAT))


class TestQuaternaryForm:
    """Sparse quaternary forms and surfaces."""

    def test_exponents_must_match_degree(self):
        """Test that exponents of the wrong degree are rejected."""
        with pytest.raises(DegreeMismatchError):
            QuaternaryForm.from_terms(3, {(1, 1, 0, 0): 1})

    def test_zero_terms_are_dropped(self):
        """Test that zero coefficients are not stored."""
        form = QuaternaryForm.from_terms(2, {(2, 0, 0, 0): 1, (0, 2, 0, 0): 0})
        assert form.terms() == [((2, 0, 0, 0), Fraction(1))]

    def test_restrict_to_points(self):
        """Test t0 t2 + t1 t3 on the line through (1,0,1,0) and (0,1,0,1)."""
        form = QuaternaryForm.from_terms(2, {(1, 0, 1, 0): 1, (0, 1, 0, 1): 1})
        restricted = form.restrict_to_points((1, 0, 1, 0), (0, 1, 0, 1))
        assert restricted.coeffs == (1, 0, 1)

    def test_substitute_identity(self):
        """Test that the identity substitution leaves a form unchanged."""
        form = QuaternaryForm.from_terms(3, {(1, 1, 1, 0): 2, (0, 0, 0, 3): -1})
        eye = [[1 if i == j else 0 for j in range(4)] for i in range(4)]
        assert form.substitute_linear(eye).coeffs == form.coeffs

    def test_partial_and_gradient(self):
        """Test derivatives of t0^2 t3."""
        form = QuaternaryForm.from_terms(3, {(2, 0, 0, 1): 1})
        assert form.partial(0).coeffs == {(1, 0, 0, 1): 2}
        assert form.gradient((1, 0, 0, 1)) == [2, 0, 0, 1]

    def test_monomial_count(self):
        """Test the number of quaternary monomials and surface space dimension."""
        exponents = monomial_exponents(2)
        assert len(exponents) == 10
        assert exponents[0] == (2, 0, 0, 0)
        assert surface_space_dimension(4) == 34


class TestSurface:
    """Singular points, tangent planes and normalization."""

    def test_node_is_singular(self):
        """Test that the planted node is a singular point."""
        Y, _ = nodal_quartic()
        assert Y.is_singular_at(NODE)
        assert not Y.is_singular_at((1, 0, 0, 0))
        assert Y.to_float().is_singular_at([complex(c) for c in NODE])

    def test_tangent_plane_at_node_fails(self):
        """Test that no tangent plane exists at a singular point."""
        Y, _ = nodal_quartic()
        with pytest.raises(SingularContactError):
            Y.tangent_plane(NODE)

    def test_random_surface(self):
        """Test random surfaces fill every monomial."""
        rng = np.random.default_rng(0)
        Y = Surface.random(4, rng, Backend.EXACT)
        assert Y.backend is Backend.EXACT
        assert all(abs(c) <= 5 for c in Y.form.coeffs.values())
        floating = Surface.random(4, rng).normalized()
        assert floating.form.max_abs() == pytest.approx(1.0)
