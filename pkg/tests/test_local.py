# SPDX-License-Identifier: Apache-2.0
# SPDX-FileCopyrightText: 2025 The Linux Foundation

"""Tests for the local criteria at a Fano point."""

from fractions import Fraction

import numpy as np
import pytest
import sympy

from fano_congruence.error_handling import (
    DegreeMismatchError,
    IncidencePatternError,
    LineInSurfaceError,
    MembershipError,
    NotNodalError,
    SingularContactError,
)
from fano_congruence.forms import BinaryForm, binary_mul, span, span_join, to_fraction
from fano_congruence.lines import FanoPoint
from fano_congruence.local import (
    CaseTag,
    Verdict,
    classify_singularity,
    cusp_certificate,
    detect_contact_pattern,
    frame_decompose,
    line_parameter,
    local_system,
    make_frame,
    normalize_contacts,
    rank_two_form,
    smoothness_certificate,
    subspace_A,
    subspace_B,
)

from .planted import (
    E0,
    NODE,
    cusp_quintic,
    disjoint_quartic,
    line_in_quartic,
    nodal_quartic,
    point,
    random_planted,
    singular_contact_quartic,
    singular_p2_quintic,
    smooth_case_11_quintic,
)


class TestFrame:
    """Adapted frames and the decomposition f = lam g^2 h + t2 gbar + t3 hbar."""

    @pytest.fixture
    def planted(self):
        """Disjoint quartic with its planted point."""
        return disjoint_quartic()

    def test_identity_frame(self, planted):
        """Test the frame of the line t2 = t3 = 0 is the identity."""
        Y, P = planted
        frame = make_frame(Y, P)
        assert frame.matrix == ((1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1))

    def test_decomposition(self, planted):
        """Test lam, g_{d-1} and h_{d-1} of the planted surface."""
        Y, P = planted
        dec = frame_decompose(Y, make_frame(Y, P))
        assert dec.lam == 1
        assert dec.g_line.coeffs == (1, 0, 0, 1)
        assert dec.h_line.coeffs == (1, 0, 0, -1)
        assert dec.x(3, 0, 0) == 1
        assert dec.y(0, 3, 0, 0) == -1

    def test_reconstruct(self, planted):
        """Test the decomposition rebuilds the frame equation."""
        Y, P = planted
        frame = make_frame(Y, P)
        dec = frame_decompose(Y, frame)
        assert (dec.reconstruct(frame) - frame.surface.form).is_zero()

    def test_random_frame_keeps_decomposition_valid(self, planted):
        """Test a random valid frame still decomposes and rebuilds."""
        Y, P = planted
        frame = make_frame(Y, P, rng=np.random.default_rng(4))
        dec = frame_decompose(Y, frame)
        assert (dec.reconstruct(frame) - frame.surface.form).is_zero()

    def test_membership_violation(self, planted):
        """Test decomposition refuses a divisor that does not match."""
        Y, _ = planted
        bad = point((1, 0, 0), (1,))
        with pytest.raises(MembershipError):
            frame_decompose(Y, make_frame(Y, bad))

    def test_line_in_surface(self):
        """Test frames refuse lines contained in Y."""
        Y, P = line_in_quartic()
        with pytest.raises(LineInSurfaceError):
            make_frame(Y, P)

    def test_subspaces(self, planted):
        """Test dim A_P = d - 1 and that B_Y alone spans every quartic."""
        Y, P = planted
        frame = make_frame(Y, P)
        dec = frame_decompose(Y, frame)
        A = subspace_A(frame)
        B = subspace_B(dec, frame)
        assert A.dim == 3
        assert B.dim == 5
        assert A.contains(BinaryForm.monomial(4, 2))
        assert not A.contains(BinaryForm.monomial(4, 0))


class TestContactPattern:
    """Incidence cases read from g and h."""

    @pytest.mark.parametrize(
        "g, h, tag, double",
        [
            ((0, 1, 0), (1,), CaseTag.DISJOINT, False),
            ((1, 0, 0), (1,), CaseTag.DISJOINT, True),
            ((0, 1, 0), (1, 0), CaseTag.CASE_1_1, False),
            ((0, 1, 0), (0, 1, 0), CaseTag.CASE_1_2, False),
            ((1, 0, 0), (1, 0), CaseTag.CASE_2_1, True),
            ((1, 0, 0), (1, 0, 0), CaseTag.CASE_2_2, True),
        ],
    )
    def test_cases(self, g, h, tag, double):
        """Test exact and float detection agree on every case."""
        P = point(g, h)
        exact = detect_contact_pattern(P)
        floating = detect_contact_pattern(P.to_float())
        assert exact.tag is floating.tag is tag
        assert exact.double_contact is floating.double_contact is double

    def test_repeated_q(self):
        """Test that a repeated residual point is flagged."""
        pattern = detect_contact_pattern(point((0, 1, 0), (1, 0, 0)))
        assert pattern.tag is CaseTag.CASE_1_1
        assert not pattern.q_distinct

    def test_irrational_contacts(self):
        """Test exact contacts of t0^2 - 2 t1^2 are left unnormalized."""
        pattern = detect_contact_pattern(point((1, 0, -2), (1,)))
        assert pattern.tag is CaseTag.DISJOINT
        assert pattern.contacts is None
        assert normalize_contacts(point((1, 0, -2), (1,)), pattern) is None

    def test_normalization(self):
        """Test normalized Case 1-1 point has g ~ t0 t1 and h vanishing at (0:1)."""
        _, P = cusp_quintic()
        normalized = normalize_contacts(P, detect_contact_pattern(P))
        assert normalized is not None
        assert normalized.g.coeffs[0] == normalized.g.coeffs[2] == 0
        assert normalized.h.coeffs[1] == 0


class TestSmoothness:
    """First-order smoothness certificate."""

    def test_disjoint_smooth(self):
        """Test the disjoint quartic point is smooth and immersed."""
        Y, P = disjoint_quartic()
        cert = smoothness_certificate(Y, P)
        assert cert.dimA == 3
        assert cert.dimAB == 5
        assert cert.immersed
        assert cert.smooth
        assert cert.case_tag is CaseTag.DISJOINT
        assert cert.rank_MY == cert.required_rank == 2
        assert cert.tabulated_agrees

    def test_float_backend_agrees(self):
        """Test the float certificate matches the exact one."""
        Y, P = disjoint_quartic()
        cert = smoothness_certificate(Y.to_float(), P.to_float())
        assert (cert.dimA, cert.dimAB, cert.smooth) == (3, 5, True)
        assert cert.rank_MY == 2

    def test_case_11_singular(self):
        """Test the cusp quintic point is neither immersed nor smooth."""
        Y, P = cusp_quintic()
        cert = smoothness_certificate(Y, P)
        assert cert.dimA == 3
        assert cert.dimAB == 5
        assert not cert.immersed
        assert not cert.smooth
        assert cert.matrix_MY is None

    def test_degree_mismatch(self):
        """Test the certificate refuses a point of another degree."""
        Y, _ = disjoint_quartic()
        with pytest.raises(DegreeMismatchError):
            smoothness_certificate(Y, point((0, 1, 0), (1, 0)))


class TestClassification:
    """Case matrices and verdicts."""

    def test_disjoint(self):
        """Test the disjoint quartic point is smooth with M_Y of rank 2."""
        Y, P = disjoint_quartic()
        report = classify_singularity(Y, P)
        assert report.case_tag is CaseTag.DISJOINT
        assert report.verdict is Verdict.SMOOTH
        assert report.rank_MY == 2
        assert report.partition == (2, 2)

    def test_singular_contact(self):
        """Test a surface singular at a contact point is excluded."""
        Y, P = singular_contact_quartic()
        report = classify_singularity(Y, P)
        assert report.case_tag is CaseTag.SINGULAR_AT_CONTACT
        assert report.verdict is Verdict.EXCLUDED
        assert report.singular_contact == "p2"

    def test_line_in_surface(self):
        """Test a line in Y is excluded."""
        Y, P = line_in_quartic()
        report = classify_singularity(Y, P)
        assert report.case_tag is CaseTag.LINE_IN_Y
        assert report.verdict is Verdict.EXCLUDED

    def test_case_11_candidate(self):
        """Test M_Y drops rank at the cusp quintic point."""
        Y, P = cusp_quintic()
        report = classify_singularity(Y, P)
        assert report.case_tag is CaseTag.CASE_1_1
        assert report.verdict is Verdict.CANDIDATE
        assert report.rank_MY == 2
        assert report.required_rank == 3
        assert report.partition == (3, 2)

    def test_case_11_smooth(self):
        """Test M_Y of rank 3 gives a smooth Case 1-1 point."""
        Y, P = smooth_case_11_quintic()
        report = classify_singularity(Y, P)
        assert report.case_tag is CaseTag.CASE_1_1
        assert report.verdict is Verdict.SMOOTH
        assert report.rank_MY == 3
        assert report.dimAB == 6

    def test_case_matrix_agrees_with_join(self):
        """Test the tabulated verdict matches dim <A_P, B_Y> on both Case 1-1 points."""
        for build in (cusp_quintic, smooth_case_11_quintic):
            Y, P = build()
            report = classify_singularity(Y, P)
            assert (report.verdict is Verdict.SMOOTH) == (report.dimAB == Y.degree + 1)


class TestCuspCertificate:
    """Tangent planes and the cuspidal plane section."""

    def test_cusp(self):
        """Test coinciding tangent planes and a cuspidal section."""
        Y, P = cusp_quintic()
        cert = cusp_certificate(Y, P, strict=True)
        assert cert.tangent_planes_equal
        assert cert.cuspidal_section
        assert cert.plane == (0, 0, 1, 0)
        assert cert.jet2 == (0, 0, 1)
        assert cert.cubic_at_direction != 0

    def test_smooth_case_11_planes_differ(self):
        """Test tangent planes differ where S(Y) is smooth."""
        Y, P = smooth_case_11_quintic()
        cert = cusp_certificate(Y, P)
        assert not cert.tangent_planes_equal
        assert not cert.cuspidal_section

    def test_singular_contact(self):
        """Test the certificate names the singular contact."""
        Y, P = singular_p2_quintic()
        with pytest.raises(SingularContactError) as excinfo:
            cusp_certificate(Y, P)
        assert excinfo.value.contact == "p2"

    def test_wrong_case(self):
        """Test the certificate needs Case 1-1."""
        Y, P = disjoint_quartic()
        with pytest.raises(IncidencePatternError):
            cusp_certificate(Y, P)

    def test_float_cusp(self):
        """Test the float backend reaches the same verdict."""
        Y, P = cusp_quintic()
        cert = cusp_certificate(Y.to_float(), P.to_float())
        assert cert.tangent_planes_equal
        assert cert.cuspidal_section


class TestLocalSystem:
    """Linear and quadratic parts of the local equations."""

    def test_ranks_at_smooth_point(self):
        """Test the linear part has rank d + 1 and the Jacobian rank d."""
        Y, P = disjoint_quartic()
        frame = make_frame(Y, P)
        system = local_system(frame, frame_decompose(Y, frame))
        assert system.rank() == 5
        assert system.jacobian_rank() == 4
        assert system.names[:4] == ("a0", "a1", "b0", "b1")
        assert system.names[-1] == "mu"

    def test_ranks_at_cusp(self):
        """Test both ranks drop at the Case 1-1 candidate."""
        Y, P = cusp_quintic()
        frame = make_frame(Y, P)
        system = local_system(frame, frame_decompose(Y, frame))
        assert system.rank() == 5
        assert system.jacobian_rank() == 4

    def test_bilinear_is_polarization(self):
        """Test bilinear(z, z) equals the quadratic part."""
        Y, P = nodal_quartic()
        frame = make_frame(Y, P)
        system = local_system(frame, frame_decompose(Y, frame))
        z = [Fraction(k + 1, 3) for k in range(len(system.names))]
        assert system.bilinear(z, z) == system.quadratic(z)


class TestRankTwo:
    """Quadratic form on the Zariski tangent space at a node."""

    def test_line_parameter(self):
        """Test the node sits at (0:1) on the planted line."""
        _, P = nodal_quartic()
        assert line_parameter(P, NODE) == (0, 1)
        with pytest.raises(IncidencePatternError):
            line_parameter(P, (0, 0, 1, 0))

    def test_rank_two(self):
        """Test dim V = 3 and Q* of rank 2 at a contact through the node."""
        Y, P = nodal_quartic()
        report = rank_two_form(Y, NODE, P)
        assert report.dimV == 3
        assert report.rankQstar == 2
        assert report.case_tag is CaseTag.DISJOINT

    def test_rank_two_float(self):
        """Test the float backend agrees."""
        Y, P = nodal_quartic()
        report = rank_two_form(Y.to_float(), [complex(c) for c in NODE], P.to_float())
        assert (report.dimV, report.rankQstar) == (3, 2)

    def test_smooth_point_rejected(self):
        """Test the check needs a singular point of Y."""
        Y, P = disjoint_quartic()
        with pytest.raises(NotNodalError):
            rank_two_form(Y, E0, P)

    def test_node_must_be_a_contact(self):
        """Test the node must be a root of g."""
        Y, _ = nodal_quartic()
        off_contact = point((0, 1, 1), (1,))
        with pytest.raises(IncidencePatternError):
            rank_two_form(Y, NODE, off_contact)

    def test_classify_flags_node_as_singular_contact(self):
        """Test classification excludes a point with a contact at the node."""
        Y, P = nodal_quartic()
        report = classify_singularity(Y, P)
        assert report.case_tag is CaseTag.SINGULAR_AT_CONTACT
        assert report.singular_contact == "p1"


def _unitriangular(rng):
    """Integer upper unitriangular matrix, row-wise."""
    return tuple(
        tuple(1 if j == i else int(rng.integers(-2, 3)) if j > i else 0 for j in range(4))
        for i in range(4)
    )


def _moved(Y, P, M):
    """Y pulled back along s -> M s and the matching Fano point."""
    inverse = sympy.Matrix(M).inv()

    def pull(v):
        column = sympy.Matrix([sympy.Rational(c.numerator, c.denominator) for c in v])
        return tuple(to_fraction(c) for c in inverse * column)

    return Y.transformed(M), FanoPoint(pull(P.p), pull(P.q), P.g, P.h)


SEXTIC_CASES = [
    pytest.param((0, 1, 0), (1, 1, 0), CaseTag.CASE_1_1, id="1-1"),
    pytest.param((0, 1, 0), (0, 1, 0), CaseTag.CASE_1_2, id="1-2"),
    pytest.param((1, 0, 0), (1, 1, 0), CaseTag.CASE_2_1, id="2-1"),
    pytest.param((1, 0, 0), (1, 0, 0), CaseTag.CASE_2_2, id="2-2"),
    pytest.param((0, 1, 0), (1, 3, 2), CaseTag.DISJOINT, id="disjoint"),
    pytest.param((1, 0, 0), (1, 3, 2), CaseTag.DISJOINT, id="disjoint-double"),
]


@pytest.mark.slow
class TestCaseMatricesOnRandomSurfaces:
    """Case matrices against dim <A_P, B_Y> on random planted sextics."""

    @pytest.mark.parametrize("g, h, tag", SEXTIC_CASES)
    def test_rank_criterion_matches_join(self, g, h, tag):
        """Test rank M_Y >= required exactly when <A_P, B_Y> is everything."""
        d = 6
        rng = np.random.default_rng(sum(g) * 10 + sum(h))
        classified = 0
        for _ in range(100):
            Y, P = random_planted(d, g, h, rng)
            report = classify_singularity(Y, P)
            if report.verdict is Verdict.EXCLUDED or report.rank_MY is None:
                continue
            classified += 1
            assert report.case_tag is tag
            assert (report.rank_MY >= report.required_rank) == (report.dimAB == d + 1)
        assert classified > 0

    def test_a_is_g_times_all_forms(self):
        """Test A_P = g C_{d-2} when g and h share no root."""
        d = 6
        rng = np.random.default_rng(1)
        for _ in range(10):
            Y, P = random_planted(d, (0, 1, 0), (1, 3, 2), rng)
            multiples = [binary_mul(P.g, BinaryForm.monomial(d - 2, i)) for i in range(d - 1)]
            expected = span(multiples)
            for frame_rng in (None, rng):
                A = subspace_A(make_frame(Y, P, rng=frame_rng))
                assert A.dim == d - 1
                assert A.same_span(expected)


class TestFrameIndependence:
    """Verdicts do not depend on the frame or the coordinates."""

    BUILDERS = [disjoint_quartic, cusp_quintic, smooth_case_11_quintic]

    @pytest.mark.parametrize("build", BUILDERS)
    def test_random_frames(self, build):
        """Test dim <A_P, B_Y> is the same in random adapted frames."""
        Y, P = build()
        expected = classify_singularity(Y, P).dimAB
        for seed in range(5):
            frame = make_frame(Y, P, rng=np.random.default_rng(seed))
            B = subspace_B(frame_decompose(Y, frame), frame)
            joined = span_join(subspace_A(frame), B)
            assert joined.dim == expected

    @pytest.mark.parametrize("build", BUILDERS)
    def test_change_of_coordinates(self, build):
        """Test case, verdict and smoothness survive a unitriangular change of coordinates."""
        Y, P = build()
        report = classify_singularity(Y, P)
        smooth = smoothness_certificate(Y, P).smooth
        rng = np.random.default_rng(7)
        for _ in range(3):
            Ym, Pm = _moved(Y, P, _unitriangular(rng))
            moved = classify_singularity(Ym, Pm)
            assert moved.case_tag is report.case_tag
            assert moved.verdict is report.verdict
            assert moved.dimAB == report.dimAB
            assert smoothness_certificate(Ym, Pm).smooth == smooth

    def test_cusp_survives_change_of_coordinates(self):
        """Test the cusp certificate flags are coordinate independent."""
        Y, P = cusp_quintic()
        rng = np.random.default_rng(9)
        for _ in range(3):
            cert = cusp_certificate(*_moved(Y, P, _unitriangular(rng)))
            assert cert.tangent_planes_equal
            assert cert.cuspidal_section
