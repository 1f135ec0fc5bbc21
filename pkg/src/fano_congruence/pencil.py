# SPDX-License-Identifier: Apache-2.0
# SPDX-FileCopyrightText: 2025 The Linux Foundation

"""Lefschetz pencils: nodal members, the bitangent curve through a node, rank-two checks."""

from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
from rich.console import Console
from scipy.linalg import null_space

from .config import RunConfig
from .error_handling import (
    DegenerateStratumError,
    DegreeMismatchError,
    FanoCongruenceError,
    NonLefschetzError,
    NotNodalError,
    handle_numeric_errors,
)
from .forms import (
    Backend,
    BinaryForm,
    Scalar,
    Surface,
    chordal_distance,
    matrix_rank,
)
from .lines import FanoPoint, SchubertSlice, membership_residual
from .local import RankTwoReport, rank_two_form
from .solve import FormEvaluator, damped_newton

console = Console(stderr=True)

NODE_VALUE_TOL = 1e-10
NODE_GRADIENT_TOL = 1e-9
HESSIAN_RANK_TOL = 1e-6


def _random_complex(rng: np.random.Generator, *shape: int) -> np.ndarray:
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


@dataclass(frozen=True)
class Pencil:
    """The pencil of surfaces f_b = f0 + b f1."""

    Y0: Surface
    Y1: Surface

    def __post_init__(self) -> None:
        if self.Y0.degree != self.Y1.degree:
            raise DegreeMismatchError(
                f"Pencil members have degrees {self.Y0.degree} and {self.Y1.degree}"
            )
        exps = sorted(set(self.Y0.form.coeffs) | set(self.Y1.form.coeffs))
        rows = [
            [self.Y0.form.to_float().coefficient(e) for e in exps],
            [self.Y1.form.to_float().coefficient(e) for e in exps],
        ]
        if matrix_rank(rows, Backend.FLOAT, 1e-12) < 2:
            raise DegenerateStratumError("Pencil generators are linearly dependent")

    @property
    def degree(self) -> int:
        return self.Y0.degree

    def member(self, b: Scalar) -> Surface:
        if isinstance(b, complex) or self.Y0.backend is not self.Y1.backend:
            return Surface(self.Y0.to_float().form + self.Y1.to_float().form.scale(complex(b)))
        return Surface(self.Y0.form + self.Y1.form.scale(b))


@dataclass(frozen=True)
class NodalMember:
    b: complex
    node: Tuple[complex, ...]
    hessian_rank: int
    value: float
    gradient: float


@dataclass
class NodalSearch:
    """Nodal members found by the search, plus singular members that are not nodes."""

    members: List[NodalMember]
    excluded: List[NodalMember]
    starts: int
    converged: int

    @property
    def lefschetz(self) -> bool:
        return not self.excluded

    def require_lefschetz(self) -> None:
        if self.excluded:
            ranks = sorted({m.hessian_rank for m in self.excluded})
            raise NonLefschetzError(
                f"{len(self.excluded)} singular member(s) are not ordinary nodes "
                f"(Hessian ranks {ranks})"
            )


@dataclass
class _NodeSystem:
    """grad f_b(x) = 0 with x in the affine chart {l . x = 1} and b free."""

    f0: FormEvaluator
    f1: FormEvaluator
    normal: np.ndarray
    base: np.ndarray
    directions: np.ndarray

    def point(self, z: np.ndarray) -> np.ndarray:
        return self.base[None, :] + z[:, :3] @ self.directions

    def evaluate(self, z: np.ndarray, chart: int) -> Tuple[np.ndarray, np.ndarray]:
        x = self.point(z)
        b = z[:, 3]
        grad1 = self.f1.gradient(x)
        residual = self.f0.gradient(x) + b[:, None] * grad1
        hess = self.f0.hessian(x) + b[:, None, None] * self.f1.hessian(x)
        jac = np.empty((z.shape[0], 4, 4), dtype=complex)
        jac[:, :, :3] = hess @ self.directions.T
        jac[:, :, 3] = grad1
        return residual, jac

    def chart_coordinates(self, node: Sequence[complex], b: complex) -> np.ndarray:
        x = np.asarray(node, dtype=complex)
        x = x / (self.normal @ x)
        v = self.directions.conj() @ (x - self.base)
        return np.concatenate([v, [b]])


def _unit(v: np.ndarray) -> np.ndarray:
    v = v / np.linalg.norm(v)
    pivot = int(np.argmax(np.abs(v)))
    return v * (abs(v[pivot]) / v[pivot])


def _verify_node(surface: Surface, node: np.ndarray) -> Tuple[float, float, int]:
    normalized = surface.to_float().normalized()
    evaluator = FormEvaluator(normalized)
    value = float(abs(evaluator.value(node[None, :])[0]))
    gradient = float(np.linalg.norm(evaluator.gradient(node[None, :])[0]))
    singular = np.linalg.svd(evaluator.hessian(node[None, :])[0], compute_uv=False)
    rank = int(np.sum(singular > HESSIAN_RANK_TOL * max(singular[0], 1e-300)))
    return value, gradient, rank


@handle_numeric_errors
def find_nodal_members(
    pencil: Pencil,
    starts: int,
    seed: int = 0,
    config: Optional[RunConfig] = None,
    guesses: Sequence[Tuple[complex, Sequence[complex]]] = (),
) -> NodalSearch:
    """Solve grad f_b = 0 from random starts (and optional guesses) and keep verified nodes."""
    config = config or RunConfig()
    rng = np.random.default_rng(seed)
    Y0 = pencil.Y0.to_float()
    Y1 = pencil.Y1.to_float()
    scale = max(Y0.form.max_abs(), Y1.form.max_abs())
    f0 = FormEvaluator(Surface(Y0.form.scale(1 / scale)))
    f1 = FormEvaluator(Surface(Y1.form.scale(1 / scale)))
    normal = _random_complex(rng, 4)
    base = normal.conj() / np.vdot(normal, normal).real
    # Orthonormal basis of the hyperplane normal . x = 0.
    directions = null_space(normal[None, :]).T
    system = _NodeSystem(f0, f1, normal, base, directions)

    z0 = _random_complex(rng, starts, 4)
    if guesses:
        seeded = np.array([system.chart_coordinates(node, b) for b, node in guesses])
        z0 = np.vstack([seeded, z0])
    z, ok, _, _ = damped_newton(system, z0, 0, config.newton_tol, config.max_newton_iterations)

    members: List[NodalMember] = []
    excluded: List[NodalMember] = []
    for row in np.nonzero(ok)[0]:
        b = complex(z[row, 3])
        node = _unit(system.point(z[row : row + 1])[0])
        value, gradient, rank = _verify_node(pencil.member(b), node)
        if value > NODE_VALUE_TOL or gradient > NODE_GRADIENT_TOL:
            continue
        found = NodalMember(b, tuple(complex(c) for c in node), rank, value, gradient)
        known = members + excluded
        if any(
            abs(m.b - b) <= config.dedup_radius * (1 + abs(b))
            and chordal_distance(m.node, node) <= config.dedup_radius
            for m in known
        ):
            continue
        if rank == 3:
            members.append(found)
        else:
            excluded.append(found)
            console.print(
                f"[yellow]⚠ Member b={b:.6g} has a non-nodal singularity "
                f"(Hessian rank {rank})[/yellow]"
            )
    return NodalSearch(members, excluded, starts=z0.shape[0], converged=int(ok.sum()))


@dataclass
class _GammaSystem:
    """Lines through the node with g = t1 (a t0 + c t1), cut by one random hyperplane.

    The node sits at the parameter (1 : 0), where f restricted to any line
    through it vanishes to order two; those two coefficients are dropped.
    """

    evaluator: FormEvaluator
    degree: int
    pencils: Tuple[Tuple[np.ndarray, np.ndarray], ...]
    g_base: np.ndarray
    g_dir: np.ndarray
    h_base: np.ndarray
    h_dirs: np.ndarray
    normal: np.ndarray
    offset: complex

    @property
    def samples(self) -> np.ndarray:
        n = self.degree + 1
        return np.exp(2j * np.pi * np.arange(n) / n)

    def unpack(self, z: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        k = self.degree - 4
        u = z[:, 0:2]
        ac = self.g_base[None, :] + z[:, 2:3] * self.g_dir[None, :]
        h = self.h_base[None, :] + (z[:, 3 : 3 + k] @ self.h_dirs if k else 0)
        return u, ac, h, z[:, -1]

    def evaluate(self, z: np.ndarray, chart: int) -> Tuple[np.ndarray, np.ndarray]:
        d = self.degree
        n = d + 1
        k = d - 4
        samples = self.samples
        u, ac, h, lam = self.unpack(z)
        P_arr, Q_arr = self.pencils[chart]
        Q = Q_arr[0][None, :] + u[:, 0:1] * Q_arr[1][None, :] + u[:, 1:2] * Q_arr[2][None, :]
        X = P_arr[0][None, None, :] + samples[None, :, None] * Q[:, None, :]
        f_vals = self.evaluator.value(X)
        grad = self.evaluator.gradient(X)
        lin = ac[:, 0:1] + ac[:, 1:2] * samples[None, :]
        g_vals = samples[None, :] * lin
        h_vals = h @ (samples[:, None] ** np.arange(k + 1)[None, :]).T
        residual = f_vals - lam[:, None] * g_vals**2 * h_vals

        jac = np.empty((z.shape[0], n, d), dtype=complex)
        for a in range(2):
            direction = samples[:, None] * Q_arr[a + 1][None, :]
            jac[:, :, a] = np.einsum("bkj,kj->bk", grad, direction)
        dir_vals = samples * (self.g_dir[0] + self.g_dir[1] * samples)
        jac[:, :, 2] = -2 * lam[:, None] * g_vals * dir_vals[None, :] * h_vals
        for j in range(k):
            h_dir_vals = (samples[:, None] ** np.arange(k + 1)[None, :]) @ self.h_dirs[j]
            jac[:, :, 3 + j] = -lam[:, None] * g_vals**2 * h_dir_vals[None, :]
        jac[:, :, -1] = -(g_vals**2) * h_vals

        coeff_res = (np.fft.fft(residual, axis=1) / n)[:, 2:]
        coeff_jac = (np.fft.fft(jac, axis=1) / n)[:, 2:, :]
        cut = (z @ self.normal - self.offset)[:, None]
        cut_row = np.broadcast_to(self.normal, (z.shape[0], 1, d))
        return (
            np.concatenate([coeff_res, cut], axis=1),
            np.concatenate([coeff_jac, cut_row], axis=1),
        )

    def fano_point(self, z: np.ndarray, chart: int) -> FanoPoint:
        u, ac, h, _ = self.unpack(z[None, :])
        P_arr, Q_arr = self.pencils[chart]
        Q = Q_arr[0] + u[0, 0] * Q_arr[1] + u[0, 1] * Q_arr[2]
        g = np.array([0, ac[0, 0], ac[0, 1]], dtype=complex)
        return FanoPoint(
            tuple(P_arr[0]),
            tuple(Q),
            BinaryForm(2, tuple(g / np.linalg.norm(g)), Backend.FLOAT),
            BinaryForm(self.degree - 4, tuple(h[0] / np.linalg.norm(h[0])), Backend.FLOAT),
        )


@dataclass
class GammaSamples:
    """Points of S(Y_b) whose line passes through the node with a contact there."""

    node: Tuple[complex, ...]
    points: List[FanoPoint]
    requested: int
    residuals: List[float] = field(default_factory=list)

    @property
    def complete(self) -> bool:
        return len(self.points) >= self.requested


def _gamma_system(
    surface: Surface, node: np.ndarray, rng: np.random.Generator
) -> _GammaSystem:
    d = surface.degree
    k = d - 4
    frame = _random_complex(rng, 3, 4)
    through = SchubertSlice.through_point(list(node), [list(row) for row in frame])
    if k:
        h_base = _random_complex(rng, k + 1)
        h_dirs = _random_complex(rng, k, k + 1)
    else:
        h_base = np.ones(1, dtype=complex)
        h_dirs = np.zeros((0, 1), dtype=complex)
    return _GammaSystem(
        evaluator=FormEvaluator(surface),
        degree=d,
        pencils=(through.affine_pencil(0), through.affine_pencil(1)),
        g_base=_random_complex(rng, 2),
        g_dir=_random_complex(rng, 2),
        h_base=h_base,
        h_dirs=h_dirs,
        normal=_random_complex(rng, d),
        offset=complex(_random_complex(rng, 1)[0]),
    )


@handle_numeric_errors
def sample_gamma(
    Yb: Surface,
    node: Sequence[Scalar],
    n: int,
    seed: int = 0,
    config: Optional[RunConfig] = None,
    starts_per_round: int = 64,
    max_rounds: Optional[int] = None,
) -> GammaSamples:
    """Sample points of S(Yb) whose line meets Yb doubly at the node.

    Each round cuts the one-dimensional solution curve with a fresh random
    hyperplane in the unknowns and keeps every distinct verified solution.
    """
    config = config or RunConfig()
    surface = Yb.to_float().normalized()
    point = _unit(np.array([complex(c) for c in node], dtype=complex))
    if not surface.is_singular_at(list(point), config.membership_tol):
        raise NotNodalError("Surface is smooth at the given point; there is no node to pin")
    rng = np.random.default_rng(seed)
    result = GammaSamples(node=tuple(complex(c) for c in point), points=[], requested=n)
    for round_index in range(max_rounds or 4 * n):
        if result.complete:
            break
        system = _gamma_system(surface, point, rng)
        chart = round_index % 2
        z0 = _random_complex(rng, starts_per_round, system.degree)
        z, ok, _, _ = damped_newton(
            system, z0, chart, config.newton_tol, config.max_newton_iterations
        )
        for row in np.nonzero(ok)[0]:
            try:
                candidate = system.fano_point(z[row], chart)
                residual = membership_residual(surface, candidate)
            except FanoCongruenceError:
                continue
            if residual > config.membership_tol:
                continue
            if any(candidate.distance(p) <= config.dedup_radius for p in result.points):
                continue
            result.points.append(candidate)
            result.residuals.append(residual)
            if result.complete:
                break
    if not result.complete:
        console.print(
            f"[yellow]⚠ Found {len(result.points)} of {n} requested points on the node curve[/yellow]"
        )
    return result


def _is_singular(Y: Surface, point: Sequence[Scalar], tol: float) -> bool:
    if Y.backend is Backend.EXACT and not any(isinstance(c, complex) for c in point):
        return Y.is_singular_at(point, tol)
    return Y.to_float().normalized().is_singular_at([complex(c) for c in point], tol)


@dataclass
class RankTwoSummary:
    """Per-sample rank-two reports with the samples that could not be checked."""

    reports: List[Tuple[int, RankTwoReport]]
    skipped: List[Tuple[int, str]]
    total: int

    @property
    def rank_two(self) -> int:
        return sum(1 for _, r in self.reports if r.dimV == 3 and r.rankQstar == 2)

    @property
    def fraction(self) -> float:
        return self.rank_two / self.total if self.total else 0.0


def verify_rank_two(
    Yb: Surface,
    node: Sequence[Scalar],
    samples: Sequence[FanoPoint],
    config: Optional[RunConfig] = None,
) -> RankTwoSummary:
    """Run the rank-two check on each sample; inadmissible samples are skipped with a reason."""
    config = config or RunConfig()
    if not _is_singular(Yb, node, config.membership_tol):
        raise NotNodalError("Surface is smooth at the given point; rank-two check needs a node")
    reports: List[Tuple[int, RankTwoReport]] = []
    skipped: List[Tuple[int, str]] = []
    for index, P in enumerate(samples):
        try:
            report = rank_two_form(
                Yb,
                node,
                P,
                rank_tol=config.rank_tol,
                cluster_radius=config.root_cluster,
                membership_tol=config.membership_tol,
            )
        except FanoCongruenceError as e:
            skipped.append((index, f"{type(e).__name__}: {e}"))
            continue
        reports.append((index, report))
    summary = RankTwoSummary(reports, skipped, total=len(samples))
    console.print(
        f"[green]✓ {summary.rank_two}/{summary.total} samples carry a rank-two double point[/green]"
    )
    return summary
