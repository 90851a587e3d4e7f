"""Benchmark harness: acceptance-rate grids, timing curves, solver sweeps.

A cell is one (family, regime, size) combination generated to a target
acceptance count. Cells are seeded by their grid position, so a sweep is
reproducible whether it runs sequentially or on a process pool, and a
partial grid (interrupted run) is flagged incomplete rather than silently
shortened.
"""

from __future__ import annotations

import concurrent.futures
import statistics
from dataclasses import dataclass, field
from typing import Callable, Optional

from .pipeline import (
    BatchStats,
    GeneratorConfig,
    generate_batch,
    timing_profile,
)
from .solver import SolverFailure, SolverParams, solve
from .spatial import SpatialConfig
from .stations import StationConfig

# Size ladder: customer count paired with its station count.
DEFAULT_SIZE_TABLE: tuple[tuple[int, int], ...] = (
    (5, 2), (10, 3), (20, 4), (30, 4), (40, 5), (50, 6),
    (60, 7), (70, 8), (80, 9), (90, 10), (100, 12),
)

DEFAULT_FAMILIES = ("random", "clustered", "mixed")
DEFAULT_REGIMES = ("wide", "medium", "tight")

# Seed offset between grid cells; far larger than any cell's attempt cap.
CELL_SEED_STRIDE = 1_000_000


def default_station_count(n_customers: int) -> int:
    """Station count of the nearest ladder size (ties go to the smaller)."""
    best = min(DEFAULT_SIZE_TABLE, key=lambda row: (abs(row[0] - n_customers), row[0]))
    return best[1]


def make_cell_config(
    family: str,
    regime: str,
    n_customers: int,
    n_stations: int,
    **overrides,
) -> GeneratorConfig:
    """Benchmark-default configuration for one grid cell."""
    spatial = SpatialConfig(family=family)
    stations = StationConfig(target_count=n_stations)
    return GeneratorConfig(
        n_customers=n_customers,
        spatial=spatial,
        stations=stations,
        regime=regime,
        **overrides,
    )


@dataclass
class BenchCell:
    """One grid cell's accounting."""

    family: str
    regime: str
    n_customers: int
    n_stations: int
    stats: BatchStats
    base_seed: int
    solved: int = 0
    solver_failures: int = 0
    mean_distance: Optional[float] = None
    mean_ev_count: Optional[float] = None

    @property
    def gamma(self) -> float:
        return self.stats.gamma

    def to_dict(self) -> dict:
        return {
            "family": self.family,
            "regime": self.regime,
            "n_customers": self.n_customers,
            "n_stations": self.n_stations,
            "base_seed": self.base_seed,
            "stats": self.stats.to_dict(),
            "gamma": self.gamma if self.stats.attempted else None,
            "solved": self.solved,
            "solver_failures": self.solver_failures,
            "mean_distance": self.mean_distance,
            "mean_ev_count": self.mean_ev_count,
        }


@dataclass
class BenchReport:
    """All finished cells plus grid-level summaries."""

    cells: list[BenchCell] = field(default_factory=list)
    complete: bool = True
    with_solver: bool = False

    def matrix(self) -> dict[tuple[str, str], tuple[float, float]]:
        """Mean and std of per-size acceptance rates per (family, regime)."""
        grouped: dict[tuple[str, str], list[float]] = {}
        for cell in self.cells:
            grouped.setdefault((cell.family, cell.regime), []).append(cell.gamma)
        out: dict[tuple[str, str], tuple[float, float]] = {}
        for key, values in grouped.items():
            mean = statistics.fmean(values)
            std = statistics.pstdev(values) if len(values) > 1 else 0.0
            out[key] = (mean, std)
        return out

    def gamma_curve(self) -> dict[int, float]:
        """Mean acceptance rate by customer count across all cells."""
        grouped: dict[int, list[float]] = {}
        for cell in self.cells:
            grouped.setdefault(cell.n_customers, []).append(cell.gamma)
        return {n: statistics.fmean(v) for n, v in sorted(grouped.items())}

    def timing(self) -> dict[int, float]:
        merged = BatchStats()
        for cell in self.cells:
            merged.merge(cell.stats)
        return timing_profile(merged)

    def to_dict(self) -> dict:
        return {
            "complete": self.complete,
            "with_solver": self.with_solver,
            "cells": [cell.to_dict() for cell in self.cells],
            "matrix": {
                f"{family}/{regime}": {"mean": mean, "std": std}
                for (family, regime), (mean, std) in sorted(self.matrix().items())
            },
            "gamma_curve": {str(n): g for n, g in self.gamma_curve().items()},
            "timing_profile": {str(n): t for n, t in self.timing().items()} if self.cells else {},
        }


def run_cell(
    family: str,
    regime: str,
    n_customers: int,
    n_stations: int,
    per_cell: int,
    base_seed: int,
    with_solver: bool = False,
    solver_params: Optional[SolverParams] = None,
    config_overrides: Optional[dict] = None,
) -> BenchCell:
    """Generate (and optionally solve) one cell."""
    config = make_cell_config(family, regime, n_customers, n_stations, **(config_overrides or {}))
    accepted, stats = generate_batch(config, per_cell, base_seed)
    cell = BenchCell(
        family=family,
        regime=regime,
        n_customers=n_customers,
        n_stations=n_stations,
        stats=stats,
        base_seed=base_seed,
    )
    if with_solver and accepted:
        params = solver_params or SolverParams()
        distances: list[float] = []
        ev_counts: list[int] = []
        for outcome in accepted:
            try:
                solution = solve(outcome.instance, params)
            except SolverFailure:
                cell.solver_failures += 1
                continue
            cell.solved += 1
            distances.append(solution.total_distance)
            ev_counts.append(solution.ev_count)
        if distances:
            cell.mean_distance = statistics.fmean(distances)
            cell.mean_ev_count = statistics.fmean(ev_counts)
    return cell


def _run_cell_packed(args: tuple) -> tuple[int, BenchCell]:
    index, kwargs = args
    return index, run_cell(**kwargs)


def run_bench(
    families: tuple[str, ...] = DEFAULT_FAMILIES,
    regimes: tuple[str, ...] = DEFAULT_REGIMES,
    sizes: tuple[tuple[int, int], ...] = DEFAULT_SIZE_TABLE,
    per_cell: int = 25,
    base_seed: int = 0,
    with_solver: bool = False,
    solver_params: Optional[SolverParams] = None,
    processes: Optional[int] = None,
    config_overrides: Optional[dict] = None,
    on_cell: Optional[Callable[[BenchCell], None]] = None,
) -> BenchReport:
    """Sweep the grid; cells are independent and seeded by grid position.

    With `processes`, cells run on a process pool (per-cell determinism is
    unaffected since every cell derives its seeds from its own position).
    An interrupt returns the finished cells with the report flagged
    incomplete.
    """
    jobs: list[tuple[int, dict]] = []
    index = 0
    for family in families:
        for regime in regimes:
            for n_customers, n_stations in sizes:
                jobs.append((index, {
                    "family": family,
                    "regime": regime,
                    "n_customers": n_customers,
                    "n_stations": n_stations,
                    "per_cell": per_cell,
                    "base_seed": base_seed + index * CELL_SEED_STRIDE,
                    "with_solver": with_solver,
                    "solver_params": solver_params,
                    "config_overrides": config_overrides,
                }))
                index += 1
    report = BenchReport(with_solver=with_solver)
    results: dict[int, BenchCell] = {}
    try:
        if processes and processes > 1:
            with concurrent.futures.ProcessPoolExecutor(max_workers=processes) as pool:
                futures = {pool.submit(_run_cell_packed, job): job[0] for job in jobs}
                for future in concurrent.futures.as_completed(futures):
                    idx, cell = future.result()
                    results[idx] = cell
                    if on_cell is not None:
                        on_cell(cell)
        else:
            for job in jobs:
                idx, cell = _run_cell_packed(job)
                results[idx] = cell
                if on_cell is not None:
                    on_cell(cell)
    except KeyboardInterrupt:
        report.complete = False
    report.cells = [results[i] for i in sorted(results)]
    if len(report.cells) != len(jobs):
        report.complete = False
    return report


def report_csv(report: BenchReport) -> str:
    """Per-cell rows as comma-delimited text with fixed precision."""
    lines = [
        "n_customers,n_stations,family,regime,attempted,accepted,"
        "rejected_stage1,rejected_stage2,unknown_stage2,gamma,"
        "solved,solver_failures,mean_distance,mean_ev_count"
    ]
    for cell in report.cells:
        s = cell.stats
        gamma = f"{cell.gamma:.6f}" if s.attempted else ""
        mean_distance = f"{cell.mean_distance:.6f}" if cell.mean_distance is not None else ""
        mean_ev = f"{cell.mean_ev_count:.6f}" if cell.mean_ev_count is not None else ""
        lines.append(
            f"{cell.n_customers},{cell.n_stations},{cell.family},{cell.regime},"
            f"{s.attempted},{s.accepted},{s.rejected_stage1},{s.rejected_stage2},"
            f"{s.unknown_stage2},{gamma},{cell.solved},{cell.solver_failures},"
            f"{mean_distance},{mean_ev}"
        )
    return "\n".join(lines) + "\n"


def matrix_csv(report: BenchReport) -> str:
    """Family-by-regime acceptance matrix as comma-delimited text."""
    lines = ["family,regime,gamma_mean,gamma_std"]
    for (family, regime), (mean, std) in sorted(report.matrix().items()):
        lines.append(f"{family},{regime},{mean:.6f},{std:.6f}")
    return "\n".join(lines) + "\n"
