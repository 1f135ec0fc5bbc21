# SPDX-License-Identifier: Apache-2.0
# SPDX-FileCopyrightText: 2025 The Linux Foundation

"""Command-line interface for fano-congruence."""

import os
from pathlib import Path
from typing import Any, Dict, List, Optional

import typer
from rich.console import Console
from rich.table import Table

from fano_congruence.chow import bidegree as chow_bidegree
from fano_congruence.chow import class_of_S, classical_bidegree
from fano_congruence.config import THREADS_ENV, ConfigManager, RunConfig
from fano_congruence.error_handling import (
    EXIT_INCONCLUSIVE,
    FanoCongruenceError,
    MembershipError,
    NonLefschetzError,
    SingularContactError,
    exit_code_for,
    report_error,
)
from fano_congruence.lines import SliceKind, contact_partition, membership_residual
from fano_congruence.local import (
    CaseTag,
    classify_singularity,
    cusp_certificate,
    smoothness_certificate,
)
from fano_congruence.pencil import (
    NodalMember,
    Pencil,
    find_nodal_members,
    sample_gamma,
    verify_rank_two,
)
from fano_congruence.performance import StageTimer
from fano_congruence.solve import CountKind, Solution, count_with_certificate, jacobian_rank
from fano_congruence.surface_file import (
    dumps,
    encode_scalar,
    load_point,
    load_surface,
    point_to_dict,
    report,
    to_jsonable,
)

app = typer.Typer(
    name="fano-congruence",
    help="Bitangent congruences of surfaces in P^3: Chow-ring bidegrees, "
    "numerical counts and local certificates",
    rich_markup_mode="rich",
)
console = Console(stderr=True)

QUIET_HELP = "Hide progress spinners"
TIMINGS_HELP = "Print a table of stage timings to stderr"


def _emit(kind: str, body: Dict[str, Any], config: RunConfig) -> None:
    typer.echo(dumps(report(kind, body, config.to_dict())))


def _fail(operation: str, error: FanoCongruenceError) -> typer.Exit:
    report_error(operation, error)
    return typer.Exit(exit_code_for(error))


def _finish(timer: StageTimer, timings: bool) -> None:
    if timings:
        timer.display()


def _solution_dict(sol: Solution) -> Dict[str, Any]:
    point = point_to_dict(sol.point)
    del point["schema"]
    return {
        "point": point,
        "residual": sol.residual,
        "newton_residual": sol.newton_residual,
        "iterations": sol.iterations,
        "start": sol.start,
        "chart": sol.chart,
        "partition": list(sol.partition),
    }


@app.command()
def bidegree(
    degree: int = typer.Option(..., "--degree", "-d", help="Degree d of the surface (d >= 4)"),
    timings: bool = typer.Option(False, "--timings", help=TIMINGS_HELP),
) -> None:
    """Compute the bidegree of the bitangent congruence from the class of S(Y)."""
    timer = StageTimer("bidegree")
    config = ConfigManager().run_config()
    try:
        with timer.stage("chern classes"):
            klass = class_of_S(degree)
        with timer.stage("intersections"):
            order, cls = chow_bidegree(degree)
            classical = classical_bidegree(degree)
    except FanoCongruenceError as e:
        raise _fail("bidegree", e)

    _emit(
        "bidegree",
        {
            "degree": degree,
            "order": order,
            "class": cls,
            "classical": {"order": classical[0], "class": classical[1]},
            "agrees_with_classical": (order, cls) == classical,
            "class_of_S": klass.labelled(),
        },
        config,
    )
    console.print(f"[green]✓ Bidegree for d={degree}: ({order}, {cls})[/green]")
    _finish(timer, timings)


@app.command()
def count(
    surface: Path = typer.Option(..., "--surface", "-s", help="Surface JSON file"),
    slice_kind: SliceKind = typer.Option(
        SliceKind.THROUGH_POINT,
        "--slice",
        help="'point' counts the order, 'plane' the class",
    ),
    seed: Optional[int] = typer.Option(None, help="Random seed"),
    starts: Optional[int] = typer.Option(None, help="Newton starts per system"),
    slices: Optional[int] = typer.Option(None, help="Number of random slices"),
    seeds: Optional[int] = typer.Option(None, help="Seeds per slice"),
    threads: Optional[int] = typer.Option(None, help="Worker threads for Newton batches"),
    quiet: bool = typer.Option(False, "--quiet", "-q", help=QUIET_HELP),
    timings: bool = typer.Option(False, "--timings", help=TIMINGS_HELP),
) -> None:
    """Count Fano points on random Schubert slices and check the count is stable."""
    timer = StageTimer("count")
    kind = CountKind.ORDER if slice_kind is SliceKind.THROUGH_POINT else CountKind.CLASS
    try:
        config = ConfigManager().run_config(
            seed=seed, starts=starts, slices=slices, seeds=seeds, threads=threads
        )
        with timer.stage("load surface"):
            Y = load_surface(surface)
        with timer.stage("enumerate"):
            certificate = count_with_certificate(
                Y, kind, config, show_progress=not quiet
            )
        with timer.stage("chern classes"):
            expected = chow_bidegree(Y.degree)
            classical = classical_bidegree(Y.degree)
    except FanoCongruenceError as e:
        raise _fail("count", e)

    index = 0 if kind is CountKind.ORDER else 1
    first = certificate.solution_sets[0] if certificate.solution_sets else None
    rejected: Dict[str, int] = {}
    if first is not None:
        for rejection in first.rejected:
            rejected[rejection.reason] = rejected.get(rejection.reason, 0) + 1
    _emit(
        "count",
        {
            "surface": str(surface),
            "degree": Y.degree,
            "kind": kind.value,
            "slice": slice_kind.value,
            "count": certificate.count,
            "expected_general": expected[index],
            "classical": classical[index],
            "agreement": certificate.agreement,
            "inconclusive": certificate.inconclusive,
            "runs": certificate.runs,
            "max_residual": max(certificate.residuals, default=0.0),
            "solutions": [_solution_dict(s) for s in first.points] if first else [],
            "line_count": first.line_count if first else 0,
            "shared_lines": len(first.shared_lines) if first else 0,
            "rejected": rejected,
        },
        config,
    )
    _finish(timer, timings)
    if certificate.inconclusive:
        raise typer.Exit(EXIT_INCONCLUSIVE)
    console.print(f"[green]✓ {kind.value} count: {certificate.count}[/green]")


@app.command()
def classify(
    surface: Path = typer.Option(..., "--surface", "-s", help="Surface JSON file"),
    point: Path = typer.Option(..., "--point", "-p", help="Fano point JSON file"),
    strict_cusp: Optional[bool] = typer.Option(
        None,
        "--strict-cusp/--lenient-cusp",
        help="Fail when a contact point is singular, and require a nonzero cubic "
        "term along the cusp direction before reporting a cuspidal section",
    ),
    rank_tol: Optional[float] = typer.Option(None, help="Relative rank tolerance"),
    timings: bool = typer.Option(False, "--timings", help=TIMINGS_HELP),
) -> None:
    """Smoothness certificate, singularity case and cusp test at a Fano point."""
    timer = StageTimer("classify")
    try:
        config = ConfigManager().run_config(strict_cusp=strict_cusp, rank_tol=rank_tol)
        with timer.stage("load"):
            Y = load_surface(surface)
            P = load_point(point)
        with timer.stage("membership"):
            residual = membership_residual(Y, P)
            if residual > config.membership_tol:
                raise MembershipError(
                    f"Point is not on S(Y): membership residual {residual:.3e}", residual
                )
            partition = contact_partition(Y, P, config.root_cluster)
        tolerances = dict(
            rank_tol=config.rank_tol,
            cluster_radius=config.root_cluster,
            membership_tol=config.membership_tol,
        )
        with timer.stage("certificates"):
            certificate = smoothness_certificate(Y, P, **tolerances)
            singularity = classify_singularity(Y, P, **tolerances)
            rank = jacobian_rank(Y, P, config)
        cusp: Optional[Dict[str, Any]] = None
        if singularity.case_tag is CaseTag.CASE_1_1:
            with timer.stage("cusp"):
                try:
                    cusp = to_jsonable(
                        cusp_certificate(
                            Y,
                            P,
                            strict=config.strict_cusp,
                            tol=config.rank_tol,
                            cluster_radius=config.root_cluster,
                            membership_tol=config.membership_tol,
                        )
                    )
                except SingularContactError as e:
                    if config.strict_cusp:
                        raise
                    cusp = {"error": str(e), "contact": e.contact}
    except FanoCongruenceError as e:
        raise _fail("classify", e)

    smoothness = to_jsonable(certificate)
    smoothness["tabulated_agrees"] = certificate.tabulated_agrees
    _emit(
        "classify",
        {
            "degree": Y.degree,
            "membership_residual": residual,
            "partition": partition,
            "jacobian_rank": rank,
            "smoothness": smoothness,
            "singularity": to_jsonable(singularity),
            "cusp": cusp,
        },
        config,
    )
    verdict = "smooth" if certificate.smooth else singularity.verdict.value
    console.print(f"[green]✓ Case {singularity.case_tag.value}: {verdict}[/green]")
    _finish(timer, timings)


def _member_dict(m: NodalMember) -> Dict[str, Any]:
    return {
        "b": encode_scalar(m.b),
        "node": [encode_scalar(c) for c in m.node],
        "hessian_rank": m.hessian_rank,
    }


def _parse_node(raw: str) -> List[complex]:
    try:
        values = [complex(part.strip().replace("i", "j")) for part in raw.split(",")]
    except ValueError as e:
        raise typer.BadParameter(f"Cannot parse node {raw!r}: {e}") from e
    if len(values) != 4:
        raise typer.BadParameter("A node needs four homogeneous coordinates")
    return values


@app.command()
def pencil(
    surface0: Path = typer.Option(..., "--surface0", help="First generator of the pencil"),
    surface1: Path = typer.Option(..., "--surface1", help="Second generator of the pencil"),
    samples: int = typer.Option(20, "--samples", "-n", help="Points to sample on the node curve"),
    member: int = typer.Option(0, "--member", help="Index of the nodal member to examine"),
    seed: Optional[int] = typer.Option(None, help="Random seed"),
    starts: Optional[int] = typer.Option(None, help="Newton starts for the nodal search"),
    guess_b: Optional[str] = typer.Option(
        None, "--guess-b", help="Pencil parameter of a known nodal member"
    ),
    guess_node: Optional[str] = typer.Option(
        None, "--guess-node", help="Comma-separated coordinates of its node"
    ),
    timings: bool = typer.Option(False, "--timings", help=TIMINGS_HELP),
) -> None:
    """Find nodal members of a pencil and check rank-two double points along the node curve."""
    timer = StageTimer("pencil")
    guesses = []
    if guess_b is not None and guess_node is not None:
        guesses.append((complex(guess_b.replace("i", "j")), _parse_node(guess_node)))
    elif guess_b is not None or guess_node is not None:
        raise typer.BadParameter("--guess-b and --guess-node go together")

    try:
        config = ConfigManager().run_config(seed=seed, starts=starts)
        with timer.stage("load"):
            family = Pencil(load_surface(surface0), load_surface(surface1))
        with timer.stage("nodal members"):
            search = find_nodal_members(
                family, config.starts, seed=config.seed, config=config, guesses=guesses
            )
        gamma = None
        summary = None
        if search.members and member < len(search.members):
            chosen = search.members[member]
            Yb = family.member(chosen.b)
            with timer.stage("node curve"):
                gamma = sample_gamma(Yb, chosen.node, samples, seed=config.seed, config=config)
            with timer.stage("rank two"):
                summary = verify_rank_two(Yb, chosen.node, gamma.points, config)
    except FanoCongruenceError as e:
        raise _fail("pencil", e)

    body: Dict[str, Any] = {
        "degree": family.degree,
        "members": [_member_dict(m) for m in search.members],
        "excluded": [_member_dict(m) for m in search.excluded],
        "lefschetz": search.lefschetz,
        "gamma_samples": None,
        "rank2_summary": None,
    }
    if gamma is not None and summary is not None:
        body["gamma_samples"] = {
            "member": member,
            "requested": gamma.requested,
            "found": len(gamma.points),
            "complete": gamma.complete,
            "points": [to_jsonable(p) for p in gamma.points],
            "residuals": gamma.residuals,
        }
        body["rank2_summary"] = {
            "fraction": summary.fraction,
            "rank_two": summary.rank_two,
            "total": summary.total,
            "reports": [
                {
                    "sample": index,
                    "dimV": r.dimV,
                    "rankQstar": r.rankQstar,
                    "case": r.case_tag.value,
                }
                for index, r in summary.reports
            ],
            "skipped": [{"sample": index, "reason": reason} for index, reason in summary.skipped],
        }
    _emit("pencil", body, config)
    _finish(timer, timings)
    try:
        search.require_lefschetz()
    except NonLefschetzError as e:
        raise _fail("pencil", e)
    if not search.members:
        console.print("[yellow]⚠ No nodal member found[/yellow]")
        raise typer.Exit(EXIT_INCONCLUSIVE)


@app.command()
def config(
    show: bool = typer.Option(False, "--show", help="Show current configuration"),
    reset: bool = typer.Option(False, "--reset", help="Reset configuration"),
    set_values: List[str] = typer.Option(
        [], "--set", help="Persist an override as key=value (repeatable)"
    ),
) -> None:
    """Manage persisted run configuration."""
    manager = ConfigManager()
    try:
        if reset:
            manager.reset()
            return
        for item in set_values:
            key, sep, value = item.partition("=")
            if not sep:
                raise typer.BadParameter(f"Expected key=value, got {item!r}")
            manager.set_value(key.strip(), value.strip())
        if show or not set_values:
            resolved = manager.run_config()
            stored = manager.load_config()
            table = Table(title="Run configuration")
            table.add_column("Setting", style="cyan")
            table.add_column("Value", style="green")
            table.add_column("Source", style="magenta")
            for key, value in resolved.to_dict().items():
                if key == "threads" and os.environ.get(THREADS_ENV):
                    source = "environment"
                else:
                    source = "file" if key in stored else "default"
                table.add_row(key, str(value), source)
            console.print(table)
    except FanoCongruenceError as e:
        raise _fail("config", e)


if __name__ == "__main__":
    app()
