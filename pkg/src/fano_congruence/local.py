# SPDX-License-Identifier: Apache-2.0
# SPDX-FileCopyrightText: 2025 The Linux Foundation

"""Local theory of S(Y) at a Fano point.

Everything here works in an adapted frame: projective coordinates in which
the line of the point is t2 = t3 = 0 and the line parameter is (t0 : t1).
In such a frame f = lambda g^2 h + t2 gbar + t3 hbar with gbar free of t3;
the coefficients x_{i0,i1,i2} of gbar and y_{i0,i1,i2,i3} of hbar feed the
smoothness and singularity criteria.
"""

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from math import isqrt
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .error_handling import (
    DegenerateStratumError,
    DegreeMismatchError,
    IncidencePatternError,
    LineInSurfaceError,
    MembershipError,
    NotNodalError,
    SingularContactError,
    handle_numeric_errors,
)
from .forms import (
    Backend,
    BinaryForm,
    FormSpan,
    QuaternaryForm,
    Scalar,
    Surface,
    binary_gcd,
    binary_mul,
    binary_quotient,
    chordal_distance,
    float_matrix,
    is_square_free,
    kernel,
    left_kernel,
    matrix_rank,
    root_divisor,
    scalar_is_zero,
    scalar_one,
    scalar_zero,
    span,
    span_join,
    sympy_matrix,
    to_fraction,
)
from .lines import FanoPoint, Vector, contact_partition

Matrix = Tuple[Tuple[Scalar, ...], ...]


class CaseTag(str, Enum):
    """Incidence pattern of the contact points p1, p2 and the residual points q_j."""

    DISJOINT = "Disjoint"
    CASE_1_1 = "1-1"
    CASE_1_2 = "1-2"
    CASE_2_1 = "2-1"
    CASE_2_2 = "2-2"
    LINE_IN_Y = "LineInY"
    SINGULAR_AT_CONTACT = "SingularAtContact"


class Verdict(str, Enum):
    SMOOTH = "Smooth"
    CANDIDATE = "SingularIsolatedCandidate"
    EXCLUDED = "Excluded"


REQUIRED_RANK: Dict[CaseTag, int] = {
    CaseTag.DISJOINT: 2,
    CaseTag.CASE_1_1: 3,
    CaseTag.CASE_1_2: 4,
    CaseTag.CASE_2_1: 3,
    CaseTag.CASE_2_2: 4,
}


def _common_backend(Y: Surface, P: FanoPoint) -> Tuple[Surface, FanoPoint]:
    if Y.degree != P.degree:
        raise DegreeMismatchError(
            f"Surface has degree {Y.degree} but the Fano point has degree {P.degree}"
        )
    if Y.backend is P.backend:
        return Y, P
    return Y.to_float(), P.to_float()


def _unit(j: int, backend: Backend) -> Vector:
    return tuple(scalar_one(backend) if k == j else scalar_zero(backend) for k in range(4))


def _complement(b: BinaryForm) -> Tuple[BinaryForm, ...]:
    """Monomials completing b to a basis, skipping b's echelon pivot."""
    if b.backend is Backend.EXACT:
        pivot = b.leading_index()
    else:
        pivot = int(np.argmax(np.abs(b.vector())))
    return tuple(
        BinaryForm.monomial(b.degree, i, b.backend) for i in range(b.degree + 1) if i != pivot
    )


def _line_part(F: QuaternaryForm) -> BinaryForm:
    """Restriction of a frame-coordinate form to t2 = t3 = 0."""
    d = F.degree
    return BinaryForm(d, tuple(F.coefficient((d - i, i, 0, 0)) for i in range(d + 1)), F.backend)


@dataclass(frozen=True)
class AdaptedFrame:
    """Coordinates with the line at t2 = t3 = 0, plus complements of g and h.

    ``matrix`` has the columns p, q, c2, c3 so that the surface in frame
    coordinates s is f(matrix * s).
    """

    matrix: Matrix
    surface: Surface
    g: BinaryForm
    h: BinaryForm
    r: Tuple[BinaryForm, BinaryForm]
    s: Tuple[BinaryForm, ...]

    @property
    def degree(self) -> int:
        return self.surface.degree

    @property
    def backend(self) -> Backend:
        return self.surface.backend

    def plane_to_original(self, plane: Sequence[Scalar]) -> Tuple[Scalar, ...]:
        """Pull a plane written in frame coordinates back to the original ones."""
        if self.backend is Backend.EXACT:
            transposed = sympy_matrix(self.matrix).T
            solved = transposed.LUsolve(sympy_matrix([[c] for c in plane]))
            return tuple(to_fraction(v) for v in solved)
        solved = np.linalg.solve(float_matrix(self.matrix).T, np.array(plane, dtype=complex))
        return tuple(complex(v) for v in solved)


@handle_numeric_errors
def make_frame(
    Y: Surface, P: FanoPoint, rng: Optional[np.random.Generator] = None
) -> AdaptedFrame:
    """Adapted frame for P; ``rng`` draws a random valid frame instead of the default."""
    Y, P = _common_backend(Y, P)
    backend = Y.backend
    pair = P.line.best_pair()
    free = [k for k in range(4) if k not in pair]
    c2, c3 = _unit(free[0], backend), _unit(free[1], backend)
    r = _complement(P.g)
    s = _complement(P.h)
    if rng is not None:
        k = [int(v) for v in rng.integers(-3, 4, size=4)]
        c2 = tuple(a + k[0] * b + k[1] * p for a, b, p in zip(c2, c3, P.p))
        c3 = tuple(a + k[2] * p + k[3] * q for a, p, q in zip(c3, P.p, P.q))
        r = _randomized(r, P.g, rng)
        s = _randomized(s, P.h, rng)
    columns = [P.p, P.q, c2, c3]
    matrix = tuple(tuple(columns[j][i] for j in range(4)) for i in range(4))
    surface = Y.transformed(matrix)
    line_part = _line_part(surface.form)
    if line_part.is_zero(tol=1e-13 * surface.form.max_abs()):
        raise LineInSurfaceError("The line of the Fano point lies on the surface")
    return AdaptedFrame(matrix, surface, P.g, P.h, r, s)  # type: ignore[arg-type]


def _randomized(
    basis: Tuple[BinaryForm, ...], anchor: BinaryForm, rng: np.random.Generator
) -> Tuple[BinaryForm, ...]:
    """Unitriangular recombination of a complement plus multiples of the anchor."""
    result: List[BinaryForm] = []
    for form in basis:
        mixed = form + anchor.scale(int(rng.integers(-3, 4)))
        for earlier in list(basis)[: len(result)]:
            mixed = mixed + earlier.scale(int(rng.integers(-3, 4)))
        result.append(mixed)
    return tuple(result)


@dataclass(frozen=True)
class FrameDecomposition:
    """f = lam g^2 h + t2 gbar + t3 hbar in frame coordinates."""

    lam: Scalar
    gbar: QuaternaryForm
    hbar: QuaternaryForm
    g_line: BinaryForm
    h_line: BinaryForm

    @property
    def degree(self) -> int:
        return self.gbar.degree + 1

    @property
    def backend(self) -> Backend:
        return self.gbar.backend

    def x(self, i0: int, i1: int, i2: int) -> Scalar:
        return self.gbar.coefficient((i0, i1, i2, 0))

    def y(self, i0: int, i1: int, i2: int, i3: int) -> Scalar:
        return self.hbar.coefficient((i0, i1, i2, i3))

    def _binary(self, source: QuaternaryForm, i2: int, i3: int) -> BinaryForm:
        k = source.degree - i2 - i3
        coeffs = tuple(source.coefficient((k - i, i, i2, i3)) for i in range(k + 1))
        return BinaryForm(k, coeffs, source.backend)

    def g2(self) -> BinaryForm:
        """Sum of x_{i0,i1,1} t0^i0 t1^i1."""
        return self._binary(self.gbar, 1, 0)

    def h2(self) -> BinaryForm:
        return self._binary(self.hbar, 1, 0)

    def h3(self) -> BinaryForm:
        return self._binary(self.hbar, 0, 1)

    def reconstruct(self, frame: AdaptedFrame) -> QuaternaryForm:
        target = binary_mul(binary_mul(frame.g, frame.g), frame.h)
        t2 = QuaternaryForm.monomial((0, 0, 1, 0), 1, self.backend)
        t3 = QuaternaryForm.monomial((0, 0, 0, 1), 1, self.backend)
        return (
            QuaternaryForm.from_binary(target).scale(self.lam)
            + t2 * self.gbar
            + t3 * self.hbar
        )


@handle_numeric_errors
def frame_decompose(
    Y: Surface, frame: AdaptedFrame, membership_tol: float = 1e-8
) -> FrameDecomposition:
    """Split the frame equation into lam g^2 h and the transverse parts."""
    if Y.degree != frame.degree:
        raise DegreeMismatchError("Frame does not belong to this surface")
    F = frame.surface.form
    d = F.degree
    backend = F.backend
    line_part = _line_part(F)
    target = binary_mul(binary_mul(frame.g, frame.g), frame.h)
    pivot = int(np.argmax(np.abs(line_part.vector())))
    if scalar_is_zero(target.coeffs[pivot], 1e-300):
        raise MembershipError("f on the line is not a multiple of g^2 h", residual=1.0)
    lam = line_part.coeffs[pivot] / target.coeffs[pivot]
    mismatch = line_part - target.scale(lam)
    residual = mismatch.max_abs() / line_part.max_abs()
    if backend is Backend.EXACT and not mismatch.is_zero():
        raise MembershipError(f"Membership violated (residual {residual:.3e})", residual)
    if backend is Backend.FLOAT and residual > membership_tol:
        raise MembershipError(f"Membership violated (residual {residual:.3e})", residual)

    gbar: Dict[Tuple[int, int, int, int], Scalar] = {}
    hbar: Dict[Tuple[int, int, int, int], Scalar] = {}
    for (i0, i1, i2, i3), c in F.coeffs.items():
        if i3 >= 1:
            hbar[(i0, i1, i2, i3 - 1)] = c
        elif i2 >= 1:
            gbar[(i0, i1, i2 - 1, 0)] = c
    gbar_form = QuaternaryForm(d - 1, gbar, backend)
    hbar_form = QuaternaryForm(d - 1, hbar, backend)
    g_line = _line_part(gbar_form)
    h_line = _line_part(hbar_form)
    return FrameDecomposition(lam, gbar_form, hbar_form, g_line, h_line)


def subspace_A(frame: AdaptedFrame, rank_tol: float = 1e-9) -> FormSpan:
    """Span of g^2 h, g r_i h and g^2 s_j."""
    g, h = frame.g, frame.h
    gg = binary_mul(g, g)
    generators = [binary_mul(gg, h)]
    generators += [binary_mul(binary_mul(g, r), h) for r in frame.r]
    generators += [binary_mul(gg, s) for s in frame.s]
    return span(generators, rank_tol=rank_tol)


def subspace_B(
    dec: FrameDecomposition, frame: AdaptedFrame, rank_tol: float = 1e-9
) -> FormSpan:
    """Span of g^2 h and t0, t1 times g_{d-1} and h_{d-1}."""
    backend = dec.backend
    t0 = BinaryForm.monomial(1, 0, backend)
    t1 = BinaryForm.monomial(1, 1, backend)
    generators = [binary_mul(binary_mul(frame.g, frame.g), frame.h)]
    for line in (dec.g_line, dec.h_line):
        generators += [binary_mul(t0, line), binary_mul(t1, line)]
    return span(generators, rank_tol=rank_tol)


Point1 = Tuple[Scalar, Scalar]


@dataclass(frozen=True)
class ContactPattern:
    """How the contact points sit relative to each other and to the q_j.

    ``contacts`` is (p1, p2) with p1 the contact lying among the q_j when
    exactly one does; it is None when exact roots of g are irrational.
    """

    tag: CaseTag
    double_contact: bool
    shared: int
    q_distinct: bool
    contacts: Optional[Tuple[Point1, Point1]]


def _root_of_linear(form: BinaryForm) -> Point1:
    c0, c1 = form.coeffs
    return (-c1, c0)


def _rational_sqrt(value: Fraction) -> Optional[Fraction]:
    if value < 0:
        return None
    num, den = isqrt(value.numerator), isqrt(value.denominator)
    if num * num == value.numerator and den * den == value.denominator:
        return Fraction(num, den)
    return None


def _exact_roots(g: BinaryForm) -> Optional[Tuple[Point1, Point1]]:
    """Rational roots of a square-free quadratic, if any."""
    g0, g1, g2 = g.coeffs
    if g0 == 0:
        return (Fraction(1), Fraction(0)), (-g2, g1)
    root = _rational_sqrt(g1 * g1 - 4 * g0 * g2)
    if root is None:
        return None
    return (-g1 + root, 2 * g0), (-g1 - root, 2 * g0)


def _exact_pattern(g: BinaryForm, h: BinaryForm) -> ContactPattern:
    q_distinct = h.degree <= 1 or is_square_free(h)
    g0, g1, g2 = g.coeffs
    double = g1 * g1 - 4 * g0 * g2 == 0
    shared_form = binary_gcd(g, h) if h.degree else BinaryForm.one(Backend.EXACT)
    shared = shared_form.degree
    if double:
        p = _root_of_linear(binary_gcd(g, g.derivative(0), g.derivative(1)))
        other: Point1 = (Fraction(1), Fraction(0)) if p[1] != 0 else (Fraction(0), Fraction(1))
        tag = {0: CaseTag.DISJOINT, 1: CaseTag.CASE_2_1, 2: CaseTag.CASE_2_2}[shared]
        return ContactPattern(tag, True, 1 if shared else 0, q_distinct, (p, other))
    if shared == 1:
        p1 = _root_of_linear(shared_form)
        p2 = _root_of_linear(binary_quotient(g, shared_form))
        return ContactPattern(CaseTag.CASE_1_1, False, 1, q_distinct, (p1, p2))
    tag = CaseTag.CASE_1_2 if shared == 2 else CaseTag.DISJOINT
    return ContactPattern(tag, False, shared, q_distinct, _exact_roots(g))


def _float_pattern(g: BinaryForm, h: BinaryForm, radius: float) -> ContactPattern:
    g_roots = root_divisor(g, radius)
    h_roots = root_divisor(h, radius) if h.degree else []
    q_distinct = all(root.multiplicity == 1 for root in h_roots)

    def in_h(point: Point1) -> int:
        return sum(
            root.multiplicity
            for root in h_roots
            if chordal_distance(point, root.point) <= max(radius, 1e-5)
        )

    if len(g_roots) == 1:
        p = g_roots[0].point
        other: Point1 = (1 + 0j, 0j) if abs(p[1]) > 0.5 else (0j, 1 + 0j)
        mult = in_h(p)
        tag = CaseTag.DISJOINT if mult == 0 else (CaseTag.CASE_2_1 if mult == 1 else CaseTag.CASE_2_2)
        return ContactPattern(tag, True, 1 if mult else 0, q_distinct, (p, other))
    a, b = g_roots[0].point, g_roots[1].point
    in_a, in_b = in_h(a) > 0, in_h(b) > 0
    if in_a and in_b:
        return ContactPattern(CaseTag.CASE_1_2, False, 2, q_distinct, (a, b))
    if in_a or in_b:
        p1, p2 = (a, b) if in_a else (b, a)
        return ContactPattern(CaseTag.CASE_1_1, False, 1, q_distinct, (p1, p2))
    return ContactPattern(CaseTag.DISJOINT, False, 0, q_distinct, (a, b))


def detect_contact_pattern(P: FanoPoint, cluster_radius: float = 1e-6) -> ContactPattern:
    """Incidence case of P read from the roots of g and h."""
    if P.backend is Backend.EXACT:
        return _exact_pattern(P.g, P.h)
    return _float_pattern(P.g, P.h, cluster_radius)


def normalize_contacts(P: FanoPoint, pattern: ContactPattern) -> Optional[FanoPoint]:
    """Reparametrize the line so that p2 = (1:0) and p1 = (0:1).

    For a double contact p = (0:1), so g becomes a multiple of t0^2.
    """
    if pattern.contacts is None:
        return None
    p1, p2 = pattern.contacts
    A = [[p2[0], p1[0]], [p2[1], p1[1]]]
    p_new = tuple(A[0][0] * a + A[1][0] * b for a, b in zip(P.p, P.q))
    q_new = tuple(A[0][1] * a + A[1][1] * b for a, b in zip(P.p, P.q))
    return FanoPoint(p_new, q_new, P.g.substitute(A), P.h.substitute(A))


def _case_matrix(tag: CaseTag, double: bool, dec: FrameDecomposition) -> Matrix:
    d = dec.degree
    x, y = dec.x, dec.y
    z = scalar_zero(dec.backend)
    xd, yd = x(d - 1, 0, 0), y(d - 1, 0, 0, 0)
    x0, y0 = x(0, d - 1, 0), y(0, d - 1, 0, 0)
    x1, y1 = x(1, d - 2, 0), y(1, d - 2, 0, 0)
    if tag is CaseTag.DISJOINT and not double:
        return ((xd, z), (z, x0), (yd, z), (z, y0))
    if tag is CaseTag.DISJOINT:
        return ((x0, z), (x1, x0), (y0, z), (y1, y0))
    if tag is CaseTag.CASE_1_1:
        return ((xd, x0, z), (z, x1, x0), (yd, y0, z), (z, y1, y0))
    if tag is CaseTag.CASE_1_2:
        xs, ys = x(d - 2, 1, 0), y(d - 2, 1, 0, 0)
        return ((xd, xs, x0, z), (z, xd, x1, x0), (yd, ys, y0, z), (z, yd, y1, y0))
    x2, y2 = x(2, d - 3, 0), y(2, d - 3, 0, 0)
    if tag is CaseTag.CASE_2_1:
        return ((x1, x0, z), (x2, x1, x0), (y1, y0, z), (y2, y1, y0))
    x3, y3 = x(3, d - 4, 0), y(3, d - 4, 0, 0)
    return ((x2, x1, x0, z), (x3, x2, x1, x0), (y2, y1, y0, z), (y3, y2, y1, y0))


def _normalized_decomposition(
    Y: Surface, P: FanoPoint, pattern: ContactPattern, membership_tol: float
) -> Optional[Tuple[AdaptedFrame, FrameDecomposition]]:
    normalized = normalize_contacts(P, pattern)
    if normalized is None:
        return None
    frame = make_frame(Y, normalized)
    return frame, frame_decompose(Y, frame, membership_tol)


def _singular_contact(
    dec: FrameDecomposition, frame: AdaptedFrame, pattern: ContactPattern, tol: float
) -> Optional[str]:
    """Name of a contact point where Y is singular, if any."""
    if dec.backend is Backend.EXACT:
        common = binary_gcd(frame.g, dec.g_line, dec.h_line)
        if common.degree == 0:
            return None
        if pattern.contacts is not None:
            for name, point in zip(("p1", "p2"), pattern.contacts):
                if common.evaluate(*point) == 0:
                    return name
        return "p1"
    scale = frame.surface.form.max_abs()
    roots = [root.point for root in root_divisor(frame.g)]
    names = ("p1", "p2")
    for index, point in enumerate(roots):
        if pattern.contacts is not None:
            nearest = min(
                range(2), key=lambda k: chordal_distance(point, pattern.contacts[k])  # type: ignore[index]
            )
            name = names[nearest]
        else:
            name = names[index]
        unit = np.array(point) / np.linalg.norm(point)
        values = [abs(complex(form.evaluate(*unit))) for form in (dec.g_line, dec.h_line)]
        if max(values) <= tol * scale:
            return name
    return None


@dataclass(frozen=True)
class SmoothnessCertificate:
    """First-order verdict at a Fano point."""

    degree: int
    dimA: int
    dimAB: int
    matrix_MY: Optional[Matrix]
    rank_MY: Optional[int]
    required_rank: Optional[int]
    immersed: bool
    smooth: bool
    case_tag: CaseTag

    @property
    def tabulated_agrees(self) -> Optional[bool]:
        if self.rank_MY is None or self.required_rank is None:
            return None
        return (self.rank_MY >= self.required_rank) == self.smooth


@handle_numeric_errors
def smoothness_certificate(
    Y: Surface,
    P: FanoPoint,
    rank_tol: float = 1e-9,
    cluster_radius: float = 1e-6,
    membership_tol: float = 1e-8,
) -> SmoothnessCertificate:
    """dim A_P, dim <A_P, B_Y>, and for disjoint contacts the matrix M_Y."""
    Y, P = _common_backend(Y, P)
    d = Y.degree
    frame = make_frame(Y, P)
    dec = frame_decompose(Y, frame, membership_tol)
    A = subspace_A(frame, rank_tol)
    joined = span_join(A, subspace_B(dec, frame, rank_tol))
    pattern = detect_contact_pattern(P, cluster_radius)
    matrix: Optional[Matrix] = None
    rank: Optional[int] = None
    required: Optional[int] = None
    if pattern.tag is CaseTag.DISJOINT:
        normalized = _normalized_decomposition(Y, P, pattern, membership_tol)
        if normalized is not None:
            matrix = _case_matrix(pattern.tag, pattern.double_contact, normalized[1])
            rank = matrix_rank(matrix, Y.backend, rank_tol)
            required = REQUIRED_RANK[pattern.tag]
    return SmoothnessCertificate(
        degree=d,
        dimA=A.dim,
        dimAB=joined.dim,
        matrix_MY=matrix,
        rank_MY=rank,
        required_rank=required,
        immersed=A.dim == d - 1,
        smooth=joined.dim == d + 1,
        case_tag=pattern.tag,
    )


@dataclass(frozen=True)
class SingularityReport:
    """Case of a Fano point with its case matrix and verdict."""

    case_tag: CaseTag
    matrix_MY: Optional[Matrix]
    rank_MY: Optional[int]
    required_rank: Optional[int]
    verdict: Verdict
    double_contact: bool = False
    q_distinct: bool = True
    dimA: Optional[int] = None
    dimAB: Optional[int] = None
    partition: Tuple[int, ...] = ()
    singular_contact: Optional[str] = None


@handle_numeric_errors
def classify_singularity(
    Y: Surface,
    P: FanoPoint,
    rank_tol: float = 1e-9,
    cluster_radius: float = 1e-6,
    membership_tol: float = 1e-8,
) -> SingularityReport:
    """Incidence case, case matrix M_Y and verdict at P."""
    Y, P = _common_backend(Y, P)
    d = Y.degree
    try:
        frame = make_frame(Y, P)
    except LineInSurfaceError:
        return SingularityReport(CaseTag.LINE_IN_Y, None, None, None, Verdict.EXCLUDED)
    dec = frame_decompose(Y, frame, membership_tol)
    pattern = detect_contact_pattern(P, cluster_radius)
    partition = tuple(contact_partition(Y, P.to_float(), cluster_radius))
    contact = _singular_contact(dec, frame, pattern, membership_tol)
    if contact is not None:
        return SingularityReport(
            CaseTag.SINGULAR_AT_CONTACT,
            None,
            None,
            None,
            Verdict.EXCLUDED,
            double_contact=pattern.double_contact,
            q_distinct=pattern.q_distinct,
            partition=partition,
            singular_contact=contact,
        )
    A = subspace_A(frame, rank_tol)
    joined = span_join(A, subspace_B(dec, frame, rank_tol))
    required = REQUIRED_RANK[pattern.tag]
    matrix: Optional[Matrix] = None
    rank: Optional[int] = None
    normalized = _normalized_decomposition(Y, P, pattern, membership_tol)
    if normalized is not None:
        matrix = _case_matrix(pattern.tag, pattern.double_contact, normalized[1])
        rank = matrix_rank(matrix, Y.backend, rank_tol)
        smooth = rank >= required
    else:
        smooth = joined.dim == d + 1
    return SingularityReport(
        case_tag=pattern.tag,
        matrix_MY=matrix,
        rank_MY=rank,
        required_rank=required,
        verdict=Verdict.SMOOTH if smooth else Verdict.CANDIDATE,
        double_contact=pattern.double_contact,
        q_distinct=pattern.q_distinct,
        dimA=A.dim,
        dimAB=joined.dim,
        partition=partition,
    )


@dataclass(frozen=True)
class CuspCertificate:
    """Tangent-plane coincidence and cusp test for a Case 1-1 point."""

    tangent_planes_equal: bool
    cuspidal_section: bool
    plane: Tuple[Scalar, ...]
    minors: Tuple[Scalar, Scalar, Scalar]
    jet2: Tuple[Scalar, Scalar, Scalar]
    cubic_at_direction: Scalar


@handle_numeric_errors
def cusp_certificate(
    Y: Surface,
    P: FanoPoint,
    strict: bool = False,
    tol: float = 1e-9,
    cluster_radius: float = 1e-6,
    membership_tol: float = 1e-8,
) -> CuspCertificate:
    """Do the tangent planes at p1 and p2 agree, and is the plane section cuspidal at p1?"""
    Y, P = _common_backend(Y, P)
    d = Y.degree
    pattern = detect_contact_pattern(P, cluster_radius)
    if pattern.tag is not CaseTag.CASE_1_1:
        raise IncidencePatternError(
            f"Cusp certificate needs p1 among the q_j and p2 not, got case {pattern.tag.value}"
        )
    normalized = _normalized_decomposition(Y, P, pattern, membership_tol)
    assert normalized is not None
    frame, dec = normalized
    x, y = dec.x, dec.y
    xd, yd = x(d - 1, 0, 0), y(d - 1, 0, 0, 0)
    x0, y0 = x(0, d - 1, 0), y(0, d - 1, 0, 0)
    x1, y1 = x(1, d - 2, 0), y(1, d - 2, 0, 0)
    scale = frame.surface.form.max_abs()

    def vanishes(value: Scalar, weight: float = 1.0) -> bool:
        return scalar_is_zero(value, tol * weight)

    if vanishes(xd, scale) and vanishes(yd, scale):
        raise SingularContactError(
            "Point violates smoothness of Y at p2 (x_{d-1,0,0} = y_{d-1,0,0,0} = 0)",
            contact="p2",
        )
    if vanishes(x0, scale) and vanishes(y0, scale):
        raise SingularContactError("Point violates smoothness of Y at p1", contact="p1")

    minors = (xd * y0 - x0 * yd, x0 * y1 - x1 * y0, xd * y1 - x1 * yd)
    planes_equal = all(vanishes(m, scale * scale) for m in minors)
    zero = scalar_zero(Y.backend)
    plane = frame.plane_to_original((zero, zero, x0, y0))

    # Tangent plane at p1 = (0:1:0:0) parametrized by w0 = t, w2 = s*y0, w3 = -s*x0.
    one = scalar_one(Y.backend)
    section = frame.surface.form.substitute_linear(
        [
            [one, zero, zero, zero],
            [zero, one, zero, zero],
            [zero, zero, y0, zero],
            [zero, zero, -x0, zero],
        ]
    )

    def jet(a: int, b: int) -> Scalar:
        return section.coefficient((a, d - a - b, b, 0))

    a2, b2, c2 = jet(2, 0), jet(1, 1), jet(0, 2)
    jet_scale = scale * max(abs(complex(x0)), abs(complex(y0)), 1e-300) ** 2
    nonzero = not all(vanishes(c, jet_scale) for c in (a2, b2, c2))
    square = nonzero and vanishes(b2 * b2 - 4 * a2 * c2, jet_scale * jet_scale)
    direction = (-b2, 2 * a2) if not vanishes(a2, jet_scale) else (one, zero)
    cubic = sum(
        (jet(a, 3 - a) * direction[0] ** a * direction[1] ** (3 - a) for a in range(4)),
        zero,
    )
    cuspidal = planes_equal and square
    if strict:
        cuspidal = cuspidal and not vanishes(cubic, jet_scale)
    return CuspCertificate(
        tangent_planes_equal=planes_equal,
        cuspidal_section=cuspidal,
        plane=plane,
        minors=minors,
        jet2=(a2, b2, c2),
        cubic_at_direction=cubic,
    )


LOCAL_COORDINATES_HEAD = ("a0", "a1", "b0", "b1", "u1", "u2")


@dataclass(frozen=True)
class LocalSystem:
    """Quadratic truncation of the local equations of S(Y) at P.

    Unknowns are the line chart (a0, a1, b0, b1), the g chart (u1, u2), the
    h chart (v_j) and the multiplier mu; the equations are the d+1
    coefficients of f(t0, t1, a.t, b.t) - (lam + mu)(g + u.r)^2 (h + v.s).
    """

    names: Tuple[str, ...]
    linear: Matrix
    lam: Scalar
    g: BinaryForm
    h: BinaryForm
    r: Tuple[BinaryForm, BinaryForm]
    s: Tuple[BinaryForm, ...]
    g2: BinaryForm
    h2: BinaryForm
    h3: BinaryForm

    @property
    def backend(self) -> Backend:
        return self.g.backend

    @property
    def degree(self) -> int:
        return self.g2.degree + 2

    def quadratic(self, z: Sequence[Scalar]) -> Tuple[Scalar, ...]:
        """Quadratic part of the equations at the displacement z."""
        backend = self.backend
        k = len(self.s)
        a0, a1, b0, b1, u1, u2 = z[:6]
        v = z[6 : 6 + k]
        mu = z[6 + k]
        at = BinaryForm.from_coeffs([a0, a1], backend)
        bt = BinaryForm.from_coeffs([b0, b1], backend)
        ur = self.r[0].scale(u1) + self.r[1].scale(u2)
        vs = BinaryForm.zero(self.h.degree, backend)
        for coeff, form in zip(v, self.s):
            vs = vs + form.scale(coeff)
        g, h = self.g, self.h
        value = (
            binary_mul(binary_mul(at, at), self.g2)
            + binary_mul(binary_mul(at, bt), self.h2)
            + binary_mul(binary_mul(bt, bt), self.h3)
        )
        two = scalar_one(backend) * 2
        lam_part = binary_mul(binary_mul(ur, ur), h) + binary_mul(binary_mul(g, ur), vs).scale(two)
        mu_part = binary_mul(binary_mul(g, ur), h).scale(two) + binary_mul(binary_mul(g, g), vs)
        value = value - lam_part.scale(self.lam) - mu_part.scale(mu)
        return value.coeffs

    def bilinear(self, z: Sequence[Scalar], w: Sequence[Scalar]) -> Tuple[Scalar, ...]:
        """Symmetric bilinear form of the quadratic part, by polarization."""
        both = [a + b for a, b in zip(z, w)]
        qz, qw, qb = self.quadratic(z), self.quadratic(w), self.quadratic(both)
        half = scalar_one(self.backend) / 2
        return tuple((c - a - b) * half for a, b, c in zip(qz, qw, qb))

    def rank(self, rank_tol: float = 1e-9) -> int:
        """Rank of the linear part, equal to dim <A_P, B_Y>."""
        return matrix_rank(self.linear, self.backend, rank_tol)

    def jacobian_rank(self, rank_tol: float = 1e-9) -> int:
        """Rank after eliminating mu: the d x (d+2) Jacobian with lam normalized away."""
        target = [row[-1] for row in self.linear]
        projector = left_kernel([[c] for c in target], self.backend, rank_tol)
        rest = [row[:-1] for row in self.linear]
        zero = scalar_zero(self.backend)
        projected = [
            [sum((w[i] * row[j] for i, row in enumerate(rest)), zero) for j in range(len(rest[0]))]
            for w in projector
        ]
        return matrix_rank(projected, self.backend, rank_tol)


def local_system(frame: AdaptedFrame, dec: FrameDecomposition) -> LocalSystem:
    """Linear part and quadratic evaluator of the local equations at P."""
    backend = dec.backend
    lam = dec.lam
    g, h = frame.g, frame.h
    t0 = BinaryForm.monomial(1, 0, backend)
    t1 = BinaryForm.monomial(1, 1, backend)
    gg = binary_mul(g, g)
    minus_two_lam = -2 * lam
    columns: List[BinaryForm] = [
        binary_mul(t0, dec.g_line),
        binary_mul(t1, dec.g_line),
        binary_mul(t0, dec.h_line),
        binary_mul(t1, dec.h_line),
    ]
    columns += [binary_mul(binary_mul(g, r), h).scale(minus_two_lam) for r in frame.r]
    columns += [binary_mul(gg, s).scale(-lam) for s in frame.s]
    columns.append(binary_mul(gg, h).scale(-scalar_one(backend)))
    names = LOCAL_COORDINATES_HEAD + tuple(f"v{j + 1}" for j in range(len(frame.s))) + ("mu",)
    linear = tuple(tuple(col.coeffs[i] for col in columns) for i in range(dec.degree + 1))
    return LocalSystem(
        names=names,
        linear=linear,
        lam=lam,
        g=g,
        h=h,
        r=frame.r,
        s=frame.s,
        g2=dec.g2(),
        h2=dec.h2(),
        h3=dec.h3(),
    )


@dataclass(frozen=True)
class RankTwoReport:
    """Rank of the quadratic form on the Zariski tangent space at a node point."""

    dimV: int
    Qstar: Matrix
    rankQstar: int
    double_contact: bool
    case_tag: CaseTag


def line_parameter(P: FanoPoint, point: Sequence[Scalar], tol: float = 1e-8) -> Point1:
    """Parameter (t0 : t1) of a point of P^3 on the line of P."""
    if P.backend is Backend.EXACT:
        pv = [to_fraction(c) for c in point]
        i, j = P.line.best_pair()
        det = P.p[i] * P.q[j] - P.p[j] * P.q[i]
        t0 = (pv[i] * P.q[j] - pv[j] * P.q[i]) / det
        t1 = (P.p[i] * pv[j] - P.p[j] * pv[i]) / det
        if any(t0 * a + t1 * b != c for a, b, c in zip(P.p, P.q, pv)):
            raise IncidencePatternError("Point does not lie on the line")
        return (t0, t1)
    basis = np.array([[complex(c) for c in P.p], [complex(c) for c in P.q]]).T
    target = np.array([complex(c) for c in point])
    coeffs, *_ = np.linalg.lstsq(basis, target, rcond=None)
    if np.linalg.norm(basis @ coeffs - target) > tol * np.linalg.norm(target):
        raise IncidencePatternError("Point does not lie on the line")
    return (complex(coeffs[0]), complex(coeffs[1]))


@handle_numeric_errors
def rank_two_form(
    Y: Surface,
    node: Sequence[Scalar],
    P: FanoPoint,
    rank_tol: float = 1e-9,
    cluster_radius: float = 1e-6,
    membership_tol: float = 1e-8,
) -> RankTwoReport:
    """dim V and rank of Q restricted to V at a point of S(Y) with a contact at the node."""
    Y, P = _common_backend(Y, P)
    if not Y.is_singular_at(node, membership_tol):
        raise NotNodalError("Y is smooth at the given point")
    param = line_parameter(P, node)
    unit = np.array([complex(c) for c in param])
    unit = unit / np.linalg.norm(unit)
    if P.backend is Backend.EXACT:
        at_g, at_h = P.g.evaluate(*param), P.h.evaluate(*param)
        on_g, on_h = at_g == 0, P.h.degree > 0 and at_h == 0
    else:
        on_g = abs(complex(P.g.evaluate(*unit))) <= 1e-6 * P.g.max_abs()
        on_h = P.h.degree > 0 and abs(complex(P.h.evaluate(*unit))) <= 1e-6 * P.h.max_abs()
    if not on_g:
        raise IncidencePatternError("The node is not a contact point of the Fano point")
    if on_h:
        raise IncidencePatternError("The node is among the residual points q_j")
    pattern = detect_contact_pattern(P, cluster_radius)
    frame = make_frame(Y, P)
    dec = frame_decompose(Y, frame, membership_tol)
    system = local_system(frame, dec)
    V = kernel(system.linear, Y.backend, rank_tol)
    if len(V) != 3:
        raise DegenerateStratumError(f"Zariski tangent space has dimension {len(V)}, expected 3")
    W = left_kernel(system.linear, Y.backend, rank_tol)
    if len(W) != 1:
        raise DegenerateStratumError(f"Cokernel has dimension {len(W)}, expected 1")
    w = W[0]
    zero = scalar_zero(Y.backend)
    qstar = tuple(
        tuple(
            sum((wi * bi for wi, bi in zip(w, system.bilinear(V[k], V[m]))), zero)
            for m in range(3)
        )
        for k in range(3)
    )
    if Y.backend is Backend.FLOAT:
        # Q* carries the numeric error of the node and the point.
        rank = matrix_rank(qstar, Y.backend, max(rank_tol, 1e-7))
    else:
        rank = matrix_rank(qstar, Y.backend)
    return RankTwoReport(
        dimV=len(V),
        Qstar=qstar,
        rankQstar=rank,
        double_contact=pattern.double_contact,
        case_tag=pattern.tag,
    )

