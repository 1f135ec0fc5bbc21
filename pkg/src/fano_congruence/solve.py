# SPDX-License-Identifier: Apache-2.0
# SPDX-FileCopyrightText: 2025 The Linux Foundation

"""Numerical enumeration of Fano points by multi-start Newton.

On a Schubert slice the condition f|l = lambda g^2 h is a square system of
d+1 equations: the coefficients of the degree-d binary form on the left
minus the right. The unknowns are the two slice parameters, an affine chart
of [g], an affine chart of [h] and lambda.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Protocol, Sequence, Tuple

import numpy as np
from rich.console import Console
from rich.progress import Progress, SpinnerColumn, TextColumn

from .config import RunConfig
from .error_handling import (
    DegreeMismatchError,
    LineInSurfaceError,
    MembershipError,
    handle_numeric_errors,
)
from .forms import Backend, BinaryForm, Surface, chordal_distance, root_divisor
from .lines import (
    FanoPoint,
    SchubertSlice,
    SliceKind,
    contact_partition,
    membership_residual,
)

console = Console(stderr=True)

CHUNK_SIZE = 256
MAX_HALVINGS = 6
DIVERGENCE_BOUND = 1e8


class CountKind(str, Enum):
    ORDER = "order"
    CLASS = "class"

    @property
    def slice_kind(self) -> SliceKind:
        return SliceKind.THROUGH_POINT if self is CountKind.ORDER else SliceKind.IN_PLANE


def _random_complex(rng: np.random.Generator, *shape: int) -> np.ndarray:
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


class FormEvaluator:
    """Vectorized values, gradients and Hessians of a quaternary form."""

    def __init__(self, surface: Surface):
        self.exps, self.coeffs = surface.to_float().form.exponent_arrays()
        self.lowered = []
        for j in range(4):
            e = self.exps.copy()
            e[:, j] = np.maximum(e[:, j] - 1, 0)
            self.lowered.append((e, self.coeffs * self.exps[:, j]))
        self.twice_lowered = {}
        for j in range(4):
            for k in range(j, 4):
                e = self.exps.copy()
                e[:, j] -= 1
                e[:, k] -= 1
                weight = self.exps[:, j] * (self.exps[:, k] - (1 if j == k else 0))
                self.twice_lowered[(j, k)] = (np.maximum(e, 0), self.coeffs * weight)

    def hessian(self, X: np.ndarray) -> np.ndarray:
        H = np.empty(X.shape + (4,), dtype=complex)
        for (j, k), (e, c) in self.twice_lowered.items():
            H[..., j, k] = H[..., k, j] = np.prod(X[..., None, :] ** e, axis=-1) @ c
        return H

    def value(self, X: np.ndarray) -> np.ndarray:
        return np.prod(X[..., None, :] ** self.exps, axis=-1) @ self.coeffs

    def gradient(self, X: np.ndarray) -> np.ndarray:
        grad = np.empty(X.shape, dtype=complex)
        for j, (e, c) in enumerate(self.lowered):
            grad[..., j] = np.prod(X[..., None, :] ** e, axis=-1) @ c
        return grad


@dataclass
class BitangentSystem:
    """Square system f(t0 P(u) + t1 Q(u)) - lam g^2 h = 0 on a Schubert slice.

    Equations are compared at the d+1 roots of unity and mapped to
    coefficients by a discrete Fourier transform.
    """

    surface: Surface
    slice: SchubertSlice
    g_base: np.ndarray
    g_dirs: np.ndarray
    h_base: np.ndarray
    h_dirs: np.ndarray
    evaluator: FormEvaluator = field(repr=False)
    pencils: Tuple[Tuple[np.ndarray, np.ndarray], ...] = field(repr=False)

    @property
    def degree(self) -> int:
        return self.surface.degree

    @property
    def n_unknowns(self) -> int:
        return self.degree + 1

    @property
    def n_equations(self) -> int:
        return self.degree + 1

    @property
    def samples(self) -> np.ndarray:
        n = self.degree + 1
        return np.exp(2j * np.pi * np.arange(n) / n)

    def _vandermonde(self, degree: int) -> np.ndarray:
        return self.samples[:, None] ** np.arange(degree + 1)[None, :]

    def unpack(self, z: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """Slice parameters, g coefficients, h coefficients and lambda for a batch."""
        k = self.degree - 4
        u = z[:, 0:2]
        g = self.g_base[None, :] + z[:, 2:4] @ self.g_dirs
        h = self.h_base[None, :] + (z[:, 4 : 4 + k] @ self.h_dirs if k else 0)
        lam = z[:, -1]
        return u, g, h, lam

    def line_points(self, u: np.ndarray, chart: int) -> Tuple[np.ndarray, np.ndarray]:
        P_arr, Q_arr = self.pencils[chart]
        P = P_arr[0][None, :] + u[:, 0:1] * P_arr[1][None, :] + u[:, 1:2] * P_arr[2][None, :]
        Q = Q_arr[0][None, :] + u[:, 0:1] * Q_arr[1][None, :] + u[:, 1:2] * Q_arr[2][None, :]
        return P, Q

    def evaluate(self, z: np.ndarray, chart: int) -> Tuple[np.ndarray, np.ndarray]:
        """Coefficient residuals (B, d+1) and Jacobians (B, d+1, d+1)."""
        d = self.degree
        n = d + 1
        k = d - 4
        samples = self.samples
        u, g, h, lam = self.unpack(z)
        P, Q = self.line_points(u, chart)
        X = P[:, None, :] + samples[None, :, None] * Q[:, None, :]
        f_vals = self.evaluator.value(X)
        grad = self.evaluator.gradient(X)
        vg = self._vandermonde(2)
        vh = self._vandermonde(k)
        g_vals = g @ vg.T
        h_vals = h @ vh.T
        residual = f_vals - lam[:, None] * g_vals**2 * h_vals

        jac = np.empty((z.shape[0], n, n), dtype=complex)
        P_arr, Q_arr = self.pencils[chart]
        for a in range(2):
            direction = P_arr[a + 1][None, :] + samples[:, None] * Q_arr[a + 1][None, :]
            jac[:, :, a] = np.einsum("bkj,kj->bk", grad, direction)
        for a in range(2):
            dir_vals = vg @ self.g_dirs[a]
            jac[:, :, 2 + a] = -2 * lam[:, None] * g_vals * dir_vals[None, :] * h_vals
        for b in range(k):
            dir_vals = vh @ self.h_dirs[b]
            jac[:, :, 4 + b] = -lam[:, None] * g_vals**2 * dir_vals[None, :]
        jac[:, :, -1] = -(g_vals**2) * h_vals
        return np.fft.fft(residual, axis=1) / n, np.fft.fft(jac, axis=1) / n

    def fano_point(self, z: np.ndarray, chart: int) -> FanoPoint:
        """Fano point of a single solution vector, g and h of unit norm."""
        u, g, h, _ = self.unpack(z[None, :])
        P, Q = self.line_points(u, chart)
        g_vec = g[0] / np.linalg.norm(g[0])
        h_vec = h[0] / np.linalg.norm(h[0])
        return FanoPoint(
            tuple(P[0]),
            tuple(Q[0]),
            BinaryForm(2, tuple(g_vec), Backend.FLOAT),
            BinaryForm(self.degree - 4, tuple(h_vec), Backend.FLOAT),
        )


def build_system(Y: Surface, s: SchubertSlice, seed: int = 0) -> BitangentSystem:
    """Bitangent system on a slice with random affine charts for [g] and [h]."""
    d = Y.degree
    if d < 4:
        raise DegreeMismatchError(f"Bitangent systems need degree at least 4, got {d}")
    rng = np.random.default_rng(seed)
    surface = Y.to_float().normalized()
    k = d - 4
    g_base = _random_complex(rng, 3)
    g_dirs = _random_complex(rng, 2, 3)
    if k:
        h_base = _random_complex(rng, k + 1)
        h_dirs = _random_complex(rng, k, k + 1)
    else:
        h_base = np.ones(1, dtype=complex)
        h_dirs = np.zeros((0, 1), dtype=complex)
    return BitangentSystem(
        surface=surface,
        slice=s,
        g_base=g_base,
        g_dirs=g_dirs,
        h_base=h_base,
        h_dirs=h_dirs,
        evaluator=FormEvaluator(surface),
        pencils=(s.affine_pencil(0), s.affine_pencil(1)),
    )


class NewtonSystem(Protocol):
    def evaluate(self, z: np.ndarray, chart: int) -> Tuple[np.ndarray, np.ndarray]:
        ...


@dataclass(frozen=True)
class NewtonOutcome:
    start: int
    chart: int
    z: np.ndarray
    converged: bool
    iterations: int
    residual: float


def _solve_batch(J: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    try:
        return np.linalg.solve(J, rhs[..., None])[..., 0]
    except np.linalg.LinAlgError:
        return np.einsum("bij,bj->bi", np.linalg.pinv(J), rhs)


def damped_newton(
    system: "NewtonSystem",
    z0: np.ndarray,
    chart: int,
    tol: float,
    max_iterations: int,
) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Damped Newton with step halving on a batch of starts."""
    z = z0.copy()
    R, J = system.evaluate(z, chart)
    norms = np.linalg.norm(R, axis=1)
    active = np.ones(z.shape[0], dtype=bool)
    converged = np.zeros(z.shape[0], dtype=bool)
    iterations = np.zeros(z.shape[0], dtype=int)
    with np.errstate(all="ignore"):
        for _ in range(max_iterations):
            idx = np.nonzero(active)[0]
            if idx.size == 0:
                break
            step = _solve_batch(J[idx], -R[idx])
            alpha = 1.0
            pending = np.ones(idx.size, dtype=bool)
            new_z, new_R, new_J = z[idx].copy(), R[idx].copy(), J[idx].copy()
            new_norms = norms[idx].copy()
            for attempt in range(MAX_HALVINGS):
                trial = z[idx] + alpha * step
                R_t, J_t = system.evaluate(trial, chart)
                n_t = np.linalg.norm(R_t, axis=1)
                take = pending & np.isfinite(n_t)
                if attempt < MAX_HALVINGS - 1:
                    take &= n_t < norms[idx]
                new_z[take], new_R[take], new_J[take] = trial[take], R_t[take], J_t[take]
                new_norms[take] = n_t[take]
                pending &= ~take
                if not pending.any():
                    break
                alpha /= 2
            step_norm = np.linalg.norm(new_z - z[idx], axis=1)
            z[idx], R[idx], J[idx], norms[idx] = new_z, new_R, new_J, new_norms
            iterations[idx] += 1
            size = np.linalg.norm(z[idx], axis=1)
            done = step_norm <= tol * (1.0 + size)
            diverged = ~np.isfinite(size) | (size > DIVERGENCE_BOUND)
            converged[idx[done & ~diverged]] = True
            active[idx[done | diverged]] = False
    converged &= norms <= 1e-8
    return z, converged, iterations, norms


@dataclass(frozen=True)
class Solution:
    """An accepted Fano point with its solver provenance."""

    point: FanoPoint
    residual: float
    newton_residual: float
    iterations: int
    start: int
    chart: int
    partition: Tuple[int, ...]


@dataclass(frozen=True)
class Rejection:
    start: int
    reason: str
    residual: Optional[float] = None
    partition: Tuple[int, ...] = ()


@dataclass
class SolutionSet:
    """Deduplicated solutions of one system, with rejections and convergence data."""

    points: List[Solution]
    rejected: List[Rejection]
    starts: int
    converged: int
    convergence_floor: float
    dedup_radius: float

    @property
    def count(self) -> int:
        return len(self.points)

    @property
    def convergence_ratio(self) -> float:
        return self.converged / self.starts if self.starts else 0.0

    @property
    def inconclusive(self) -> bool:
        return self.convergence_ratio < self.convergence_floor

    def _line_groups(self) -> List[List[Solution]]:
        groups: List[List[Solution]] = []
        for sol in self.points:
            for group in groups:
                if group[0].point.line.distance(sol.point.line) <= self.dedup_radius:
                    group.append(sol)
                    break
            else:
                groups.append([sol])
        return groups

    @property
    def line_count(self) -> int:
        """Number of distinct lines among the accepted points."""
        return len(self._line_groups())

    @property
    def shared_lines(self) -> List[List[Solution]]:
        """Lines carrying two or more accepted Fano points."""
        return [group for group in self._line_groups() if len(group) > 1]


def _run_chunk(
    system: BitangentSystem,
    z0: np.ndarray,
    indices: np.ndarray,
    config: RunConfig,
) -> List[NewtonOutcome]:
    outcomes: List[NewtonOutcome] = []
    for chart in (0, 1):
        mask = indices % 2 == chart
        if not mask.any():
            continue
        z, ok, iters, norms = damped_newton(
            system, z0[mask], chart, config.newton_tol, config.max_newton_iterations
        )
        for row, start in enumerate(indices[mask]):
            outcomes.append(
                NewtonOutcome(
                    int(start), chart, z[row], bool(ok[row]), int(iters[row]), float(norms[row])
                )
            )
    return outcomes


def _pattern_rejection(point: FanoPoint, radius: float) -> Optional[str]:
    g_roots = root_divisor(point.g, radius)
    if len(g_roots) != 2:
        return "g-square"
    if point.h.degree:
        for h_root in root_divisor(point.h, radius):
            for g_root in g_roots:
                if chordal_distance(g_root.point, h_root.point) <= max(radius, 1e-6):
                    return "contact-collision"
    return None


@handle_numeric_errors
def enumerate_solutions(
    system: BitangentSystem,
    starts: int,
    seed: int = 0,
    config: Optional[RunConfig] = None,
    keep_degenerate: bool = False,
    show_progress: bool = False,
) -> SolutionSet:
    """Run damped Newton from random starts and keep honest, distinct solutions."""
    config = config or RunConfig()
    rng = np.random.default_rng(seed)
    z0 = _random_complex(rng, starts, system.n_unknowns)
    chunks = [
        np.arange(lo, min(lo + CHUNK_SIZE, starts)) for lo in range(0, starts, CHUNK_SIZE)
    ]

    results: List[List[NewtonOutcome]] = [[] for _ in chunks]
    with Progress(
        SpinnerColumn(),
        TextColumn("[progress.description]{task.description}"),
        console=console,
        disable=not show_progress,
        transient=True,
    ) as progress:
        task = progress.add_task(f"Newton from {starts} starts", total=len(chunks))
        with ThreadPoolExecutor(max_workers=config.threads) as executor:
            futures = [
                executor.submit(_run_chunk, system, z0[idx], idx, config) for idx in chunks
            ]
            for k, future in enumerate(futures):
                results[k] = future.result()
                progress.advance(task)

    outcomes = sorted((o for chunk in results for o in chunk), key=lambda o: o.start)
    accepted: List[Solution] = []
    rejected: List[Rejection] = []
    converged = 0
    for outcome in outcomes:
        if not outcome.converged:
            rejected.append(Rejection(outcome.start, "divergent", outcome.residual))
            continue
        converged += 1
        try:
            point = system.fano_point(outcome.z, outcome.chart)
            residual = membership_residual(system.surface, point)
        except LineInSurfaceError:
            rejected.append(Rejection(outcome.start, "line-in-surface"))
            continue
        if residual > config.membership_tol:
            rejected.append(Rejection(outcome.start, "residual", residual))
            continue
        partition = tuple(contact_partition(system.surface, point, config.root_cluster))
        pattern = _pattern_rejection(point, config.root_cluster)
        if pattern is not None and not keep_degenerate:
            rejected.append(Rejection(outcome.start, pattern, residual, partition))
            continue
        if any(point.distance(sol.point) <= config.dedup_radius for sol in accepted):
            rejected.append(Rejection(outcome.start, "duplicate", residual, partition))
            continue
        accepted.append(
            Solution(
                point=point,
                residual=residual,
                newton_residual=outcome.residual,
                iterations=outcome.iterations,
                start=outcome.start,
                chart=outcome.chart,
                partition=partition,
            )
        )

    result = SolutionSet(
        points=accepted,
        rejected=rejected,
        starts=starts,
        converged=converged,
        convergence_floor=config.convergence_floor,
        dedup_radius=config.dedup_radius,
    )
    if result.inconclusive:
        console.print(
            f"[yellow]⚠ Only {converged}/{starts} starts converged "
            f"(floor {config.convergence_floor:.2%})[/yellow]"
        )
    return result


def _line_complement(P: FanoPoint) -> Tuple[np.ndarray, np.ndarray]:
    pair = P.line.best_pair()
    free = [k for k in range(4) if k not in pair]
    eye = np.eye(4, dtype=complex)
    return eye[free[0]], eye[free[1]]


@handle_numeric_errors
def jacobian_rank(Y: Surface, P: FanoPoint, config: Optional[RunConfig] = None) -> int:
    """Rank of the d x (d+2) Jacobian of the unsliced local system at P.

    Unknowns are the four line-chart entries, a two-parameter chart of [g]
    and a (d-4)-parameter chart of [h]; lambda is eliminated by projecting
    away the direction g^2 h.
    """
    config = config or RunConfig()
    surface = Y.to_float().normalized()
    point = P.to_float()
    residual = membership_residual(surface, point)
    if residual > config.membership_tol:
        raise MembershipError(f"Point is not on S(Y) (residual {residual:.3e})", residual)

    d = surface.degree
    n = d + 1
    samples = np.exp(2j * np.pi * np.arange(n) / n)
    evaluator = FormEvaluator(surface)
    p = np.array(point.p, dtype=complex)
    q = np.array(point.q, dtype=complex)
    c2, c3 = _line_complement(point)
    X = p[None, :] + samples[:, None] * q[None, :]
    grad = evaluator.gradient(X)
    g = point.g.vector()
    h = point.h.vector()
    g_vals = (samples[:, None] ** np.arange(3)) @ g
    h_vals = (samples[:, None] ** np.arange(d - 3)) @ h
    f_line = evaluator.value(X)
    target = g_vals**2 * h_vals
    lam = np.vdot(target, f_line) / np.vdot(target, target)

    columns = []
    # t2 direction moves with a0 t0 + a1 t1, t3 with b0 t0 + b1 t1.
    for vec in (c2, c3):
        columns.append(grad @ vec)
        columns.append(samples * (grad @ vec))
    g_pivot = int(np.argmax(np.abs(g)))
    for i in range(3):
        if i != g_pivot:
            columns.append(-2 * lam * g_vals * samples**i * h_vals)
    h_pivot = int(np.argmax(np.abs(h)))
    for i in range(d - 3):
        if d > 4 and i != h_pivot:
            columns.append(-lam * g_vals**2 * samples**i)
    jac = np.fft.fft(np.array(columns).T, axis=0) / n
    direction = np.fft.fft(target) / n
    projector = np.linalg.svd(direction[None, :])[2][1:].conj()
    projected = projector @ jac
    singular = np.linalg.svd(projected, compute_uv=False)
    if singular.size == 0 or singular[0] == 0:
        return 0
    return int(np.sum(singular > config.rank_tol * singular[0]))


@dataclass
class CountCertificate:
    """Counts over several slices and seeds, with a stability flag."""

    kind: CountKind
    count: Optional[int]
    runs: List[dict]
    residuals: List[float]
    agreement: bool
    inconclusive: bool
    solution_sets: List[SolutionSet] = field(default_factory=list, repr=False)


def count_with_certificate(
    Y: Surface,
    kind: CountKind,
    config: Optional[RunConfig] = None,
    show_progress: bool = False,
    slices: Optional[Sequence[SchubertSlice]] = None,
) -> CountCertificate:
    """Repeat enumeration over random slices and seeds and check the count is stable."""
    config = config or RunConfig()
    root = np.random.SeedSequence(config.seed)
    slice_seeds, system_seeds = root.spawn(2)
    if slices is None:
        slice_rngs = [np.random.default_rng(s) for s in slice_seeds.spawn(config.slices)]
        slices = [SchubertSlice.random(kind.slice_kind, rng) for rng in slice_rngs]
    runs: List[dict] = []
    residuals: List[float] = []
    counts: List[int] = []
    solution_sets: List[SolutionSet] = []
    inconclusive = False
    seeds = system_seeds.spawn(len(slices) * config.seeds)
    for i, s in enumerate(slices):
        for j in range(config.seeds):
            seed = int(seeds[i * config.seeds + j].generate_state(1)[0])
            system = build_system(Y, s, seed=seed)
            result = enumerate_solutions(
                system, config.starts, seed=seed, config=config, show_progress=show_progress
            )
            counts.append(result.count)
            solution_sets.append(result)
            inconclusive |= result.inconclusive
            residuals.extend(sol.residual for sol in result.points)
            runs.append(
                {
                    "slice": i,
                    "seed": seed,
                    "count": result.count,
                    "line_count": result.line_count,
                    "converged": result.converged,
                    "starts": result.starts,
                }
            )
    agreement = len(set(counts)) == 1
    if not agreement:
        console.print(f"[yellow]⚠ Unstable {kind.value} counts: {sorted(set(counts))}[/yellow]")
    return CountCertificate(
        kind=kind,
        count=counts[0] if agreement and counts else None,
        runs=runs,
        residuals=residuals,
        agreement=agreement,
        inconclusive=inconclusive or not agreement,
        solution_sets=solution_sets,
    )
