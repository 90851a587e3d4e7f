"""Spatial placement: depot modes and the three customer layout families."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .model import Point

# Families share one minimum customer separation; clustered placement is
# exempt because overlap inside a cluster is intentional.
MIN_SEPARATION = 0.04
MAX_RESAMPLES = 10

FAMILY_RANDOM = "random"
FAMILY_CLUSTERED = "clustered"
FAMILY_MIXED = "mixed"
FAMILIES = (FAMILY_RANDOM, FAMILY_CLUSTERED, FAMILY_MIXED)

DEPOT_CENTER = "center"
DEPOT_CORNER = "corner"
DEPOT_RANDOM = "random"


@dataclass(frozen=True)
class SpatialConfig:
    """Parameters of the layout families."""

    family: str = FAMILY_RANDOM
    depot_mode: str = DEPOT_CENTER
    n_clusters: int = 3
    cluster_std: float = 0.05
    clustered_fraction: float = 0.5
    min_separation: float = MIN_SEPARATION

    def __post_init__(self) -> None:
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        if self.n_clusters < 1:
            raise ValueError("n_clusters must be at least 1")
        if not (0.0 <= self.clustered_fraction <= 1.0):
            raise ValueError("clustered_fraction must lie in [0, 1]")
        if self.cluster_std <= 0:
            raise ValueError("cluster_std must be positive")


@dataclass
class SpatialDiagnostics:
    """Counters from one placement run."""

    forced_acceptances: int = 0
    cluster_assignments: list[int] = field(default_factory=list)


def round_half_up(x: float) -> int:
    """Round with halves going up (so 2.5 -> 3), unlike banker's rounding."""
    return int(math.floor(x + 0.5))


def clip_unit_square(x: float, y: float) -> Point:
    return Point(min(max(x, 0.0), 1.0), min(max(y, 0.0), 1.0))


def place_depot(rng: np.random.Generator, mode: str = DEPOT_CENTER) -> Point:
    if mode == DEPOT_CENTER:
        return Point(0.5, 0.5)
    if mode == DEPOT_CORNER:
        return Point(0.0, 0.0)
    if mode == DEPOT_RANDOM:
        x, y = rng.uniform(0.0, 1.0, size=2)
        return Point(float(x), float(y))
    raise ValueError(f"unknown depot mode {mode!r}")


def _too_close(candidate: Point, placed: list[Point], min_sep: float) -> bool:
    return any(math.hypot(candidate.x - p.x, candidate.y - p.y) < min_sep for p in placed)


def _sample_separated(
    rng: np.random.Generator,
    count: int,
    placed: list[Point],
    min_sep: float,
    diagnostics: SpatialDiagnostics,
) -> list[Point]:
    """Uniform samples with rejection against `placed` and each other.

    Each point gets an initial draw plus at most MAX_RESAMPLES redraws;
    after that the last candidate is accepted regardless and counted.
    """
    out: list[Point] = []
    for _ in range(count):
        candidate = Point(*(float(v) for v in rng.uniform(0.0, 1.0, size=2)))
        attempts = 0
        while _too_close(candidate, placed, min_sep) and attempts < MAX_RESAMPLES:
            candidate = Point(*(float(v) for v in rng.uniform(0.0, 1.0, size=2)))
            attempts += 1
        if _too_close(candidate, placed, min_sep):
            diagnostics.forced_acceptances += 1
        placed.append(candidate)
        out.append(candidate)
    return out


def _sample_clustered(
    rng: np.random.Generator,
    count: int,
    config: SpatialConfig,
    diagnostics: SpatialDiagnostics,
) -> list[Point]:
    """Gaussian scatter around uniform centers, round-robin assignment."""
    k = config.n_clusters
    centers = [Point(*(float(v) for v in rng.uniform(0.0, 1.0, size=2))) for _ in range(k)]
    out: list[Point] = []
    for i in range(1, count + 1):
        center = centers[i % k]
        dx, dy = rng.normal(0.0, config.cluster_std, size=2)
        out.append(clip_unit_square(center.x + float(dx), center.y + float(dy)))
        diagnostics.cluster_assignments.append(i % k)
    return out


def sample_customers(
    rng: np.random.Generator,
    count: int,
    config: SpatialConfig,
    depot: Point,
) -> tuple[list[Point], SpatialDiagnostics]:
    """Place `count` customer locations according to the configured family.

    The random family keeps every point at least `min_separation` from the
    depot and from each other. The mixed family places its clustered block
    first; the random block then respects separation against everything
    already placed, clustered points included.
    """
    diagnostics = SpatialDiagnostics()
    if count == 0:
        return [], diagnostics
    if config.family == FAMILY_RANDOM:
        placed = [depot]
        points = _sample_separated(rng, count, placed, config.min_separation, diagnostics)
        return points, diagnostics
    if config.family == FAMILY_CLUSTERED:
        return _sample_clustered(rng, count, config, diagnostics), diagnostics
    n_clustered = round_half_up(config.clustered_fraction * count)
    n_clustered = min(n_clustered, count)
    clustered = _sample_clustered(rng, n_clustered, config, diagnostics)
    placed = [depot] + list(clustered)
    random_part = _sample_separated(rng, count - n_clustered, placed, config.min_separation, diagnostics)
    return clustered + random_part, diagnostics
