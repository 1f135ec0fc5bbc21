# SPDX-License-Identifier: Apache-2.0
# SPDX-FileCopyrightText: 2025 The Linux Foundation

"""Lines in P^3: charts, Plücker coordinates, Fano points and Schubert slices."""

from dataclasses import dataclass
from enum import Enum
from itertools import combinations
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .error_handling import (
    BackendMismatchError,
    DegenerateSliceError,
    DegreeMismatchError,
    FrameError,
    LineInSurfaceError,
    ZeroFormError,
)
from .forms import (
    Backend,
    BinaryForm,
    Scalar,
    Surface,
    binary_mul,
    chordal_distance,
    coerce_scalar,
    infer_backend,
    merge_divisors,
    root_divisor,
    scalar_is_zero,
    scalar_one,
    scalar_zero,
)

Vector = Tuple[Scalar, ...]

PLUCKER_PAIRS: Tuple[Tuple[int, int], ...] = tuple(combinations(range(4), 2))


def _vector(values: Sequence[object], backend: Backend) -> Vector:
    return tuple(coerce_scalar(v, backend) for v in values)


@dataclass(frozen=True)
class LineChart:
    """The line t2 = a0 t0 + a1 t1, t3 = b0 t0 + b1 t1."""

    a0: Scalar
    a1: Scalar
    b0: Scalar
    b1: Scalar

    @classmethod
    def of(cls, a0: object, a1: object, b0: object, b1: object) -> "LineChart":
        backend = infer_backend([a0, a1, b0, b1])
        return cls(*_vector([a0, a1, b0, b1], backend))

    @property
    def backend(self) -> Backend:
        return infer_backend([self.a0, self.a1, self.b0, self.b1])

    def points(self) -> Tuple[Vector, Vector]:
        """The spanning points (1, 0, a0, b0) and (0, 1, a1, b1)."""
        backend = self.backend
        one, zero = scalar_one(backend), scalar_zero(backend)
        return (one, zero, self.a0, self.b0), (zero, one, self.a1, self.b1)

    def to_plucker(self) -> "PluckerLine":
        return chart_to_plucker(self)


@dataclass(frozen=True)
class StandardChart:
    """Chart of lines transverse to (t_i = t_j = 0) for the pair (i, j).

    The line is spanned by the vectors with entries (1, 0) and (0, 1) at
    positions i, j and the given free entries at the two other positions.
    """

    pair: Tuple[int, int]
    first: Tuple[Scalar, Scalar]
    second: Tuple[Scalar, Scalar]

    def points(self) -> Tuple[Vector, Vector]:
        backend = infer_backend(list(self.first) + list(self.second))
        i, j = self.pair
        free = [k for k in range(4) if k not in self.pair]
        p = [scalar_zero(backend)] * 4
        q = [scalar_zero(backend)] * 4
        p[i] = scalar_one(backend)
        q[j] = scalar_one(backend)
        for k, a, b in zip(free, self.first, self.second):
            p[k] = a
            q[k] = b
        return tuple(p), tuple(q)

    def to_plucker(self) -> "PluckerLine":
        p, q = self.points()
        return PluckerLine.from_points(p, q)


@dataclass(frozen=True)
class PluckerLine:
    """Plücker coordinates p_ij = P_i Q_j - P_j Q_i of a line, up to scale."""

    p01: Scalar
    p02: Scalar
    p03: Scalar
    p12: Scalar
    p13: Scalar
    p23: Scalar

    @classmethod
    def from_points(cls, p: Sequence[object], q: Sequence[object]) -> "PluckerLine":
        backend = infer_backend(list(p) + list(q))
        pv = _vector(p, backend)
        qv = _vector(q, backend)
        coords = [pv[i] * qv[j] - pv[j] * qv[i] for i, j in PLUCKER_PAIRS]
        if all(scalar_is_zero(c) for c in coords):
            raise DegenerateSliceError("Points are dependent and span no line")
        return cls(*coords)

    @property
    def backend(self) -> Backend:
        return infer_backend(self.coords())

    def coords(self) -> Vector:
        return (self.p01, self.p02, self.p03, self.p12, self.p13, self.p23)

    def coordinate(self, i: int, j: int) -> Scalar:
        if i == j:
            return scalar_zero(self.backend)
        if i > j:
            return -self.coordinate(j, i)
        return self.coords()[PLUCKER_PAIRS.index((i, j))]

    def relation(self) -> Scalar:
        """Value of p01 p23 - p02 p13 + p03 p12."""
        return self.p01 * self.p23 - self.p02 * self.p13 + self.p03 * self.p12

    def vector(self) -> np.ndarray:
        return np.array([complex(c) for c in self.coords()], dtype=complex)

    def normalized(self) -> np.ndarray:
        """Float coordinates scaled so the largest entry is one."""
        vec = self.vector()
        return vec / vec[int(np.argmax(np.abs(vec)))]

    def primal_matrix(self) -> List[List[Scalar]]:
        return [[self.coordinate(i, j) for j in range(4)] for i in range(4)]

    def dual_matrix(self) -> List[List[Scalar]]:
        """Matrix whose kernel is the set of points on the line."""
        p01, p02, p03, p12, p13, p23 = self.coords()
        z = scalar_zero(self.backend)
        return [
            [z, p23, -p13, p12],
            [-p23, z, p03, -p02],
            [p13, -p03, z, p01],
            [-p12, p02, -p01, z],
        ]

    def chart(self, tol: float = 1e-12) -> LineChart:
        """Recover the (t0, t1) chart parameters; fails off the chart."""
        if scalar_is_zero(self.p01, tol * float(np.max(np.abs(self.vector())))):
            raise FrameError("Line is not transverse to t0 = t1 = 0")
        p01 = self.p01
        return LineChart(-self.p12 / p01, self.p02 / p01, -self.p13 / p01, self.p03 / p01)

    def standard_chart(self, pair: Tuple[int, int]) -> StandardChart:
        """Parameters of the line in the chart transverse to t_i = t_j = 0."""
        i, j = pair
        pij = self.coordinate(i, j)
        if scalar_is_zero(pij):
            raise FrameError(f"Line is not transverse to t{i} = t{j} = 0")
        matrix = self.primal_matrix()
        free = [k for k in range(4) if k not in pair]
        first = tuple(matrix[k][j] / pij for k in free)
        second = tuple(matrix[k][i] / (-pij) for k in free)
        return StandardChart((i, j), first, second)  # type: ignore[arg-type]

    def best_pair(self) -> Tuple[int, int]:
        """Chart pair with the largest Plücker coordinate."""
        return PLUCKER_PAIRS[int(np.argmax(np.abs(self.vector())))]

    def basis(self) -> Tuple[Vector, Vector]:
        """Well-conditioned spanning points taken from the best standard chart."""
        return self.standard_chart(self.best_pair()).points()

    def contains_point(self, x: Sequence[object], tol: float = 1e-10) -> bool:
        backend = self.backend
        xv = _vector(x, backend)
        rows = self.dual_matrix()
        values = [sum((r[k] * xv[k] for k in range(4)), scalar_zero(backend)) for r in rows]
        if backend is Backend.EXACT:
            return all(v == 0 for v in values)
        scale = float(np.max(np.abs(self.vector()))) * max(abs(complex(c)) for c in xv)
        return max(abs(complex(v)) for v in values) <= tol * scale

    def lies_in_plane(self, plane: Sequence[object], tol: float = 1e-10) -> bool:
        backend = self.backend
        hv = _vector(plane, backend)
        rows = self.primal_matrix()
        values = [sum((r[k] * hv[k] for k in range(4)), scalar_zero(backend)) for r in rows]
        if backend is Backend.EXACT:
            return all(v == 0 for v in values)
        scale = float(np.max(np.abs(self.vector()))) * max(abs(complex(c)) for c in hv)
        return max(abs(complex(v)) for v in values) <= tol * scale

    def distance(self, other: "PluckerLine") -> float:
        return chordal_distance(self.vector(), other.vector())


def chart_to_plucker(chart: LineChart) -> PluckerLine:
    """Plücker coordinates of the span of (1,0,a0,b0) and (0,1,a1,b1)."""
    p, q = chart.points()
    return PluckerLine.from_points(p, q)


@dataclass(frozen=True)
class FanoPoint:
    """A line with a degree-2 divisor [g] and a degree-(d-4) divisor [h].

    The line is parametrized as t0*p + t1*q; g and h are forms in (t0 : t1)
    so that membership reads f(t0*p + t1*q) = lambda * g^2 * h.
    """

    p: Vector
    q: Vector
    g: BinaryForm
    h: BinaryForm

    def __post_init__(self) -> None:
        if self.g.degree != 2:
            raise DegreeMismatchError(f"g must be quadratic, got degree {self.g.degree}")
        if self.g.is_zero() or self.h.is_zero():
            raise ZeroFormError("g and h must be nonzero")
        if self.g.backend is not self.h.backend:
            raise BackendMismatchError("g and h must share a backend")
        backend = self.g.backend
        object.__setattr__(self, "p", _vector(self.p, backend))
        object.__setattr__(self, "q", _vector(self.q, backend))
        PluckerLine.from_points(self.p, self.q)

    @classmethod
    def from_chart(cls, chart: LineChart, g: BinaryForm, h: BinaryForm) -> "FanoPoint":
        p, q = chart.points()
        return cls(p, q, g, h)

    @property
    def degree(self) -> int:
        return 4 + self.h.degree

    @property
    def backend(self) -> Backend:
        return self.g.backend

    @property
    def line(self) -> PluckerLine:
        return PluckerLine.from_points(self.p, self.q)

    def target(self) -> BinaryForm:
        """The form g^2 h."""
        return binary_mul(binary_mul(self.g, self.g), self.h)

    def point_at(self, parameter: Sequence[object]) -> Vector:
        """Point t0*p + t1*q of P^3 for the parameter (t0 : t1)."""
        t0 = coerce_scalar(parameter[0], self.backend)
        t1 = coerce_scalar(parameter[1], self.backend)
        return tuple(t0 * a + t1 * b for a, b in zip(self.p, self.q))

    def contact_points(self, cluster_radius: float = 1e-6) -> List[Vector]:
        """Points of P^3 underlying the roots of g (float)."""
        points = []
        for root in root_divisor(self.g, cluster_radius):
            pv = np.array([complex(c) for c in self.p])
            qv = np.array([complex(c) for c in self.q])
            points.append(tuple(root.point[0] * pv + root.point[1] * qv))
        return points

    def to_float(self) -> "FanoPoint":
        if self.backend is Backend.FLOAT:
            return self
        return FanoPoint(
            tuple(complex(float(c)) for c in self.p),
            tuple(complex(float(c)) for c in self.q),
            self.g.to_float(),
            self.h.to_float(),
        )

    def distance(self, other: "FanoPoint") -> float:
        """Max of chordal distances on the line, [g] and [h]."""
        line_dist = self.line.distance(other.line)
        if line_dist > 1e-3:
            return line_dist
        # Parameters of g, h must refer to a common basis before comparing.
        g_other, h_other = other.forms_in_basis(self.p, self.q)
        g_dist = chordal_distance(self.g.vector(), g_other.vector())
        h_dist = chordal_distance(self.h.vector(), h_other.vector()) if self.h.degree else 0.0
        return max(line_dist, g_dist, h_dist)

    def forms_in_basis(
        self, p: Sequence[object], q: Sequence[object]
    ) -> Tuple[BinaryForm, BinaryForm]:
        """Express g, h in the parameter of another basis of the same line."""
        old = np.array([[complex(c) for c in self.p], [complex(c) for c in self.q]]).T
        new = np.array([[complex(c) for c in p], [complex(c) for c in q]]).T
        change, *_ = np.linalg.lstsq(old, new, rcond=None)
        g = self.g.to_float().substitute(change.tolist())
        h = self.h.to_float().substitute(change.tolist())
        return g, h


class SliceKind(str, Enum):
    THROUGH_POINT = "point"
    IN_PLANE = "plane"


@dataclass(frozen=True)
class SchubertSlice:
    """Two-parameter family of lines: all lines through a point, or in a plane.

    ``frame`` holds three vectors. For a point slice they complete the point
    to a basis and chart k gives the line through the point and
    frame[k] + u1*frame[k+1] + u2*frame[k+2] (indices mod 3). For a plane
    slice they span the plane and chart k gives the line through
    frame[k] + u1*frame[k+2] and frame[k+1] + u2*frame[k+2].
    """

    kind: SliceKind
    vector: Vector
    frame: Tuple[Vector, Vector, Vector]

    @classmethod
    def through_point(
        cls, point: Sequence[object], frame: Optional[Sequence[Sequence[object]]] = None
    ) -> "SchubertSlice":
        backend = infer_backend(list(point))
        q = _vector(point, backend)
        if frame is None:
            pivot = int(np.argmax([abs(complex(c)) for c in q]))
            frame = [_unit_vector(j, backend) for j in range(4) if j != pivot]
        vectors = tuple(_vector(v, backend) for v in frame)
        _check_independent([q, *vectors], "point slice")
        return cls(SliceKind.THROUGH_POINT, q, vectors)  # type: ignore[arg-type]

    @classmethod
    def in_plane(cls, plane: Sequence[object]) -> "SchubertSlice":
        backend = infer_backend(list(plane))
        hv = _vector(plane, backend)
        pivot = int(np.argmax([abs(complex(c)) for c in hv]))
        if scalar_is_zero(hv[pivot]):
            raise DegenerateSliceError("Plane coefficients are all zero")
        frame = []
        for j in range(4):
            if j == pivot:
                continue
            v = list(_unit_vector(j, backend))
            v[pivot] = -hv[j] / hv[pivot]
            frame.append(tuple(v))
        return cls(SliceKind.IN_PLANE, hv, tuple(frame))  # type: ignore[arg-type]

    @classmethod
    def random(cls, kind: SliceKind, rng: np.random.Generator) -> "SchubertSlice":
        """Slice through a random complex point or in a random complex plane."""
        vec = (rng.standard_normal(4) + 1j * rng.standard_normal(4)) / np.sqrt(2.0)
        if kind is SliceKind.THROUGH_POINT:
            frame = (rng.standard_normal((3, 4)) + 1j * rng.standard_normal((3, 4))) / np.sqrt(2.0)
            return cls.through_point(list(vec), [list(row) for row in frame])
        return cls.in_plane(list(vec))

    @property
    def backend(self) -> Backend:
        return infer_backend(self.vector)

    def spanning_points(self, u: Sequence[object], chart: int = 0) -> Tuple[Vector, Vector]:
        backend = self.backend
        u1 = coerce_scalar(u[0], backend)
        u2 = coerce_scalar(u[1], backend)
        a, b, c = (self.frame[(chart + k) % 3] for k in range(3))
        if self.kind is SliceKind.THROUGH_POINT:
            direction = tuple(x + u1 * y + u2 * z for x, y, z in zip(a, b, c))
            return self.vector, direction
        first = tuple(x + u1 * z for x, z in zip(a, c))
        second = tuple(y + u2 * z for y, z in zip(b, c))
        return first, second

    def affine_pencil(self, chart: int = 0) -> Tuple[np.ndarray, np.ndarray]:
        """Arrays (3, 4) with P = P0 + u1 P1 + u2 P2 and likewise for Q."""
        a, b, c = (
            np.array([complex(x) for x in self.frame[(chart + k) % 3]]) for k in range(3)
        )
        zero = np.zeros(4, dtype=complex)
        if self.kind is SliceKind.THROUGH_POINT:
            point = np.array([complex(x) for x in self.vector])
            return np.array([point, zero, zero]), np.array([a, b, c])
        return np.array([a, c, zero]), np.array([b, zero, c])

    def contains_line(self, line: PluckerLine, tol: float = 1e-10) -> bool:
        if self.kind is SliceKind.THROUGH_POINT:
            return line.contains_point(self.vector, tol)
        return line.lies_in_plane(self.vector, tol)


def _unit_vector(j: int, backend: Backend) -> Vector:
    return tuple(scalar_one(backend) if k == j else scalar_zero(backend) for k in range(4))


def _check_independent(vectors: Sequence[Vector], what: str) -> None:
    matrix = np.array([[complex(c) for c in v] for v in vectors])
    if np.linalg.matrix_rank(matrix) < len(vectors):
        raise DegenerateSliceError(f"Frame vectors of the {what} are dependent")


def slice_chart(s: SchubertSlice, u: Sequence[object], chart: int = 0) -> PluckerLine:
    """Line of the slice with chart parameters u."""
    p, q = s.spanning_points(u, chart)
    return PluckerLine.from_points(p, q)


def _line_restriction(Y: Surface, P: FanoPoint) -> BinaryForm:
    if Y.degree != P.degree:
        raise DegreeMismatchError(
            f"Surface has degree {Y.degree} but the Fano point has degree {P.degree}"
        )
    if Y.backend is P.backend:
        restricted = Y.restrict(P.p, P.q)
    else:
        restricted = Y.to_float().restrict(P.to_float().p, P.to_float().q)
    scale = Y.form.max_abs() * max(abs(complex(c)) for c in P.p + P.q) ** Y.degree
    if restricted.is_zero(tol=1e-13 * scale):
        raise LineInSurfaceError("The line of the Fano point lies on the surface")
    return restricted


def membership_residual(Y: Surface, P: FanoPoint) -> float:
    """Distance between f restricted to the line and lambda * g^2 h, scale-free."""
    restricted = _line_restriction(Y, P)
    target = P.target()
    if restricted.backend is Backend.EXACT and target.backend is Backend.EXACT:
        pivot = target.leading_index()
        ratio = restricted.coeffs[pivot] / target.coeffs[pivot]  # type: ignore[index]
        if restricted == target.scale(ratio):
            return 0.0
    a = restricted.to_float().vector()
    b = target.to_float().vector()
    a = a / np.max(np.abs(a))
    b = b / np.max(np.abs(b))
    phase = np.vdot(b, a) / np.vdot(b, b)
    return float(np.max(np.abs(a - phase * b)))


def contact_partition(Y: Surface, P: FanoPoint, cluster_radius: float = 1e-6) -> List[int]:
    """Intersection multiplicities of Y with the line, descending."""
    if Y.degree != P.degree:
        raise DegreeMismatchError(
            f"Surface has degree {Y.degree} but the Fano point has degree {P.degree}"
        )
    items = [(root.point, 2 * root.multiplicity) for root in root_divisor(P.g, cluster_radius)]
    if P.h.degree:
        items += [(root.point, root.multiplicity) for root in root_divisor(P.h, cluster_radius)]
    merged = merge_divisors(items, cluster_radius)
    return sorted((m for _, m in merged), reverse=True)


def line_partition(
    Y: Surface, p: Sequence[object], q: Sequence[object], cluster_radius: float = 1e-6
) -> List[int]:
    """Intersection multiplicities of Y with the line through p and q."""
    restricted = Y.restrict(p, q)
    return sorted((m for _, m in root_divisor(restricted, cluster_radius)), reverse=True)

