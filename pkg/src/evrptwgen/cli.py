"""Command-line interface: generate, bench, verify, solve, serve."""

from __future__ import annotations

import sys
from pathlib import Path

import click

from .attributes import EnergyConfig, ServiceConfig
from .bench import (
    DEFAULT_SIZE_TABLE,
    default_station_count,
    matrix_csv,
    report_csv,
    run_bench,
)
from .instance_io import load_instance, persist_outcome
from .pipeline import GeneratorConfig, generate_batch
from .screening import screen
from .solver import SolverFailure, SolverParams, evaluate_solution, solve as run_solver
from .spatial import SpatialConfig
from .stations import StationConfig
from .verify import STATUS_FEASIBLE, SearchLimits, verify as run_verify

FAMILY_CHOICES = {"R": "random", "C": "clustered", "RC": "mixed"}
REGIME_CHOICES = ("wide", "medium", "tight")


@click.group()
@click.version_option(package_name="evrptwgen")
def main() -> None:
    """Generate, screen, verify, solve, and benchmark routing instances."""


def build_standard_config(
    customers: int,
    stations: int | None,
    family: str,
    regime: str,
    sigma: float,
    rho: float,
    capacity: float,
    rate: float,
    charge_rate: float,
    horizon: float,
    width_fraction: float | None = None,
    randomized_window_starts: bool = False,
) -> GeneratorConfig:
    """Map interface-level knobs onto a generator configuration.

    Shared by the CLI and the HTTP service so that equal knob values
    always produce equal configurations, hence equal instances.
    """
    target = stations if stations is not None else default_station_count(customers)
    return GeneratorConfig(
        n_customers=customers,
        spatial=SpatialConfig(
            family=FAMILY_CHOICES[family],
            cluster_std=sigma,
            clustered_fraction=rho,
        ),
        stations=StationConfig(target_count=target),
        energy=EnergyConfig(),
        service=ServiceConfig(),
        regime=regime,
        width_fraction=width_fraction,
        horizon=horizon,
        capacity=capacity,
        consumption_rate=rate,
        charge_rate=charge_rate,
        randomized_window_starts=randomized_window_starts,
    )


@main.command()
@click.option("--customers", type=click.IntRange(min=1), required=True, help="Customer count N.")
@click.option("--stations", type=click.IntRange(min=0), default=None,
              help="Station target count (default: ladder value nearest N).")
@click.option("--family", type=click.Choice(sorted(FAMILY_CHOICES)), default="R", show_default=True)
@click.option("--regime", type=click.Choice(REGIME_CHOICES), default="medium", show_default=True)
@click.option("--count", type=click.IntRange(min=1), default=1, show_default=True,
              help="Accepted instances to produce.")
@click.option("--seed", type=int, default=0, show_default=True, help="Base seed; attempt k uses seed+k.")
@click.option("--out", type=click.Path(file_okay=False, path_type=Path), default=Path("data"),
              show_default=True, help="Output root (feasible/ and infeasible/ live below it).")
@click.option("--sigma", type=float, default=0.05, show_default=True, help="Cluster spread.")
@click.option("--rho", type=float, default=0.5, show_default=True, help="Clustered fraction for RC.")
@click.option("--capacity", type=float, default=1.5, show_default=True, help="Vehicle load capacity Q.")
@click.option("--rate", type=float, default=0.25, show_default=True, help="Energy consumption rate r.")
@click.option("--charge-rate", type=float, default=1.0, show_default=True, help="Recharging rate g.")
@click.option("--horizon", type=float, default=2.0, show_default=True, help="Planning horizon H.")
@click.option("--persist-rejects/--no-persist-rejects", default=True, show_default=True,
              help="Also write rejected attempts under infeasible/.")
def generate(customers, stations, family, regime, count, seed, out, sigma, rho,
             capacity, rate, charge_rate, horizon, persist_rejects) -> None:
    """Generate a batch and write it under OUT/feasible and OUT/infeasible."""
    try:
        config = build_standard_config(customers, stations, family, regime, sigma, rho,
                                       capacity, rate, charge_rate, horizon)
    except ValueError as exc:
        raise click.UsageError(str(exc)) from exc
    written = {"feasible": 0, "infeasible": 0}

    def persist(outcome) -> None:
        paths = persist_outcome(outcome, out, persist_rejects=persist_rejects)
        if paths is not None:
            written["feasible" if outcome.accepted else "infeasible"] += 1

    accepted, stats = generate_batch(config, count, seed, on_outcome=persist)
    gamma = stats.gamma if stats.attempted else float("nan")
    click.echo(
        f"accepted {stats.accepted}/{stats.attempted} attempts "
        f"(gamma={gamma:.4f}); stage-1 rejects {stats.rejected_stage1}, "
        f"stage-2 rejects {stats.rejected_stage2}, unknown {stats.unknown_stage2}"
    )
    click.echo(f"wrote {written['feasible']} feasible and {written['infeasible']} infeasible "
               f"instance files under {out}")
    if stats.underflow:
        click.echo("warning: attempt cap reached before the target; batch is partial", err=True)
        sys.exit(2)


@main.command()
@click.option("--sizes", type=str, default=None,
              help="Comma-separated customer counts (default: the full ladder).")
@click.option("--families", type=str, default="R,C,RC", show_default=True)
@click.option("--regimes", type=str, default="wide,medium,tight", show_default=True)
@click.option("--per-cell", type=click.IntRange(min=1), default=25, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--with-solver", is_flag=True, help="Also solve accepted instances per cell.")
@click.option("--processes", type=click.IntRange(min=1), default=None,
              help="Run cells on a process pool.")
@click.option("--csv", "csv_path", type=click.Path(dir_okay=False, path_type=Path), default=None,
              help="Write per-cell CSV here.")
@click.option("--matrix-csv", "matrix_path", type=click.Path(dir_okay=False, path_type=Path),
              default=None, help="Write the family-by-regime matrix CSV here.")
def bench(sizes, families, regimes, per_cell, seed, with_solver, processes, csv_path, matrix_path) -> None:
    """Sweep the acceptance-rate grid and print the matrix."""
    if sizes is None:
        size_table = DEFAULT_SIZE_TABLE
    else:
        try:
            ns = [int(tok) for tok in sizes.split(",") if tok.strip()]
        except ValueError as exc:
            raise click.UsageError(f"bad --sizes value: {sizes!r}") from exc
        size_table = tuple((n, default_station_count(n)) for n in ns)
    family_names = []
    for tok in families.split(","):
        tok = tok.strip()
        if tok not in FAMILY_CHOICES:
            raise click.UsageError(f"unknown family {tok!r}; expected R, C, or RC")
        family_names.append(FAMILY_CHOICES[tok])
    regime_names = []
    for tok in regimes.split(","):
        tok = tok.strip()
        if tok not in REGIME_CHOICES:
            raise click.UsageError(f"unknown regime {tok!r}")
        regime_names.append(tok)

    def progress(cell) -> None:
        line = (f"{cell.n_customers}C{cell.n_stations}S {cell.family}/{cell.regime}: "
                f"gamma={cell.gamma:.3f} ({cell.stats.accepted}/{cell.stats.attempted})")
        if with_solver:
            line += f", solved {cell.solved}, failures {cell.solver_failures}"
        click.echo(line)

    report = run_bench(
        families=tuple(family_names),
        regimes=tuple(regime_names),
        sizes=size_table,
        per_cell=per_cell,
        base_seed=seed,
        with_solver=with_solver,
        processes=processes,
        on_cell=progress,
    )
    click.echo("")
    click.echo("acceptance matrix (gamma mean +- std across sizes):")
    for (family, regime), (mean, std) in sorted(report.matrix().items()):
        click.echo(f"  {family:9s} {regime:6s}  {mean:.3f} +- {std:.3f}")
    click.echo("gamma by size: " + ", ".join(f"N={n}: {g:.3f}" for n, g in report.gamma_curve().items()))
    timing = report.timing()
    click.echo("seconds per accepted instance: "
               + ", ".join(f"N={n}: {t:.4f}" for n, t in timing.items()))
    if csv_path is not None:
        csv_path.write_text(report_csv(report))
        click.echo(f"wrote {csv_path}")
    if matrix_path is not None:
        matrix_path.write_text(matrix_csv(report))
        click.echo(f"wrote {matrix_path}")
    if not report.complete:
        click.echo("warning: run interrupted; results are partial", err=True)
        sys.exit(2)


@main.command()
@click.argument("path", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--force", is_flag=True, help="Run the exact search even above the size limit.")
@click.option("--time-budget", type=float, default=10.0, show_default=True)
def verify(path, force, time_budget) -> None:
    """Screen an instance file and, when small enough, decide feasibility."""
    instance = load_instance(path)
    report = screen(instance)
    if report.passed:
        click.echo("stage 1: passed")
    else:
        click.echo(f"stage 1: {len(report.violations)} violation(s)")
        for v in report.violations:
            click.echo(f"  customer {v.customer_id}: {v.condition} "
                       f"(measured {v.measured:.6g}, threshold {v.threshold:.6g})")
    from .pipeline import STAGE2_MAX_CUSTOMERS

    if instance.n_customers > STAGE2_MAX_CUSTOMERS and not force:
        click.echo(f"stage 2: skipped (N={instance.n_customers} exceeds "
                   f"{STAGE2_MAX_CUSTOMERS}; pass --force to run anyway)")
        return
    result = run_verify(instance, SearchLimits(time_budget=time_budget))
    click.echo(f"stage 2: {result.status} "
               f"({result.nodes_explored} nodes, {result.elapsed:.3f}s)")
    if result.status == STATUS_FEASIBLE:
        for route in result.witness:
            click.echo("  route: " + " -> ".join(str(v) for v in route))


@main.command()
@click.argument("path", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--iterations", type=click.IntRange(min=0), default=200, show_default=True)
@click.option("--time-budget", type=float, default=5.0, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
def solve(path, iterations, time_budget, seed) -> None:
    """Run the baseline solver on an instance file and print its metrics."""
    instance = load_instance(path)
    params = SolverParams(iterations=iterations, time_budget=time_budget, seed=seed)
    try:
        solution = run_solver(instance, params)
    except SolverFailure as exc:
        click.echo(f"solver failed: {exc}", err=True)
        sys.exit(1)
    metrics = evaluate_solution(instance, solution)
    click.echo(f"distance {metrics.total_distance:.6f}, vehicles {metrics.ev_count}")
    for idx, route in enumerate(solution.routes):
        click.echo(f"  route {idx}: " + " -> ".join(str(v) for v in route)
                   + f" (slack {metrics.route_slacks[idx]:.4f})")


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
@click.option("--data-root", type=click.Path(file_okay=False, path_type=Path), default=None,
              help="Instance storage root (default: EVRPTWGEN_DATA_ROOT or ./data).")
def serve(host, port, data_root) -> None:
    """Serve the HTTP API and the bundled studio UI."""
    import uvicorn

    from .api import create_app

    app = create_app(data_root=data_root)
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
