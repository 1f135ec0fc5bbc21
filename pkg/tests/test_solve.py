# SPDX-License-Identifier: Apache-2.0
# SPDX-FileCopyrightText: 2025 The Linux Foundation

"""Tests for the numeric bitangent solver."""

import numpy as np
import pytest

from fano_congruence.chow import bidegree
from fano_congruence.config import RunConfig
from fano_congruence.error_handling import DegreeMismatchError, MembershipError
from fano_congruence.forms import Backend, QuaternaryForm, Surface
from fano_congruence.lines import SchubertSlice, SliceKind
from fano_congruence.local import smoothness_certificate
from fano_congruence.solve import (
    CountKind,
    build_system,
    count_with_certificate,
    enumerate_solutions,
    jacobian_rank,
)

from .planted import cusp_quintic, disjoint_quartic, point


@pytest.fixture
def quartic():
    """A random quartic with small integer coefficients."""
    return Surface.random(4, np.random.default_rng(11), Backend.EXACT)


class TestJacobianRank:
    """Rank of the unsliced Jacobian at known points."""

    def test_smooth_point(self):
        """Test full rank d at a smooth point of S(Y)."""
        Y, P = disjoint_quartic()
        assert jacobian_rank(Y, P) == 4

    def test_rank_drop_at_case_11(self):
        """Test the rank drops below d at the Case 1-1 candidate."""
        Y, P = cusp_quintic()
        assert jacobian_rank(Y, P) == 4

    def test_non_member(self):
        """Test that the rank needs a point of S(Y)."""
        Y, _ = disjoint_quartic()
        with pytest.raises(MembershipError):
            jacobian_rank(Y, point((1, 0, 1), (1,)))


class TestBuildSystem:
    """Shape of the sliced system."""

    def test_cubic_rejected(self):
        """Test that the solver needs degree at least 4."""
        cubic = Surface(QuaternaryForm.from_terms(3, {(3, 0, 0, 0): 1, (0, 0, 0, 3): 1}))
        s = SchubertSlice.random(SliceKind.THROUGH_POINT, np.random.default_rng(0))
        with pytest.raises(DegreeMismatchError):
            build_system(cubic, s)

    def test_square_system(self, quartic):
        """Test the sliced system has as many equations as unknowns."""
        s = SchubertSlice.random(SliceKind.IN_PLANE, np.random.default_rng(1))
        system = build_system(quartic, s, seed=2)
        assert system.degree == 4
        assert system.n_equations == system.n_unknowns

    def test_count_kind_slices(self):
        """Test order counts use point slices and class counts plane slices."""
        assert CountKind.ORDER.slice_kind is SliceKind.THROUGH_POINT
        assert CountKind.CLASS.slice_kind is SliceKind.IN_PLANE


@pytest.mark.slow
class TestEnumeration:
    """Random-start enumeration on a random quartic."""

    @pytest.fixture
    def config(self):
        """Small run configuration."""
        return RunConfig(starts=400, slices=1, seeds=2)

    def test_solutions_are_honest_and_distinct(self, quartic, config):
        """Test accepted points lie on S(Y), in the slice, and are pairwise distinct."""
        s = SchubertSlice.random(SliceKind.THROUGH_POINT, np.random.default_rng(5))
        system = build_system(quartic, s, seed=6)
        result = enumerate_solutions(system, config.starts, seed=7, config=config)
        assert 1 <= result.count <= 12
        assert result.converged + len(
            [r for r in result.rejected if r.reason == "divergent"]
        ) == result.starts
        for sol in result.points:
            assert sol.residual <= config.membership_tol
            assert s.contains_line(sol.point.line)
            assert len(sol.partition) == 2
        for i, a in enumerate(result.points):
            for b in result.points[i + 1 :]:
                assert a.point.distance(b.point) > config.dedup_radius

    def test_count_certificate_structure(self, quartic, config):
        """Test one run per slice and seed with a consistent verdict."""
        cert = count_with_certificate(quartic, CountKind.ORDER, config=config)
        assert cert.kind is CountKind.ORDER
        assert len(cert.runs) == 2
        assert len(cert.solution_sets) == 2
        if cert.agreement:
            assert cert.count == cert.runs[0]["count"]
        else:
            assert cert.count is None
            assert cert.inconclusive


@pytest.fixture
def quintic():
    """A random quintic with small integer coefficients."""
    return Surface.random(5, np.random.default_rng(17), Backend.EXACT)


@pytest.mark.slow
class TestBidegreeCounts:
    """Numeric counts on general surfaces match the Chow ring bidegree."""

    def test_quartic(self, quartic):
        """Test 12 lines through a point and 28 in a plane."""
        config = RunConfig(starts=2000, slices=2, seeds=2)
        order = count_with_certificate(quartic, CountKind.ORDER, config=config)
        cls = count_with_certificate(quartic, CountKind.CLASS, config=config)
        assert not order.inconclusive
        assert not cls.inconclusive
        assert (order.count, cls.count) == bidegree(4)

    def test_quintic(self, quintic):
        """Test 60 lines through a point and 120 in a plane."""
        order = count_with_certificate(
            quintic, CountKind.ORDER, config=RunConfig(starts=8000, slices=1, seeds=2)
        )
        cls = count_with_certificate(
            quintic, CountKind.CLASS, config=RunConfig(starts=16000, slices=1, seeds=2)
        )
        assert (order.count, cls.count) == bidegree(5)

    def test_smoothness_agrees_with_jacobian(self, quintic):
        """Test the local certificate and the Jacobian rank agree at solver points."""
        config = RunConfig(starts=2000, rank_tol=1e-6, membership_tol=1e-6)
        s = SchubertSlice.random(SliceKind.THROUGH_POINT, np.random.default_rng(23))
        system = build_system(quintic, s, seed=29)
        result = enumerate_solutions(system, config.starts, seed=31, config=config)
        assert result.points
        for sol in result.points[:10]:
            cert = smoothness_certificate(
                quintic, sol.point, rank_tol=1e-6, membership_tol=1e-6
            )
            assert cert.smooth == (jacobian_rank(quintic, sol.point, config) == 5)
