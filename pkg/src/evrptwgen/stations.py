"""Charging-station placement: range-aware rules, redundancy filter, top-up."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import STATION, Node, Point, TOL, euclidean_distance
from .spatial import clip_unit_square


@dataclass(frozen=True)
class StationConfig:
    """Geometric thresholds for station placement.

    Fractions of the vehicle range R: midpoint_threshold, depot_threshold,
    nearest_station_threshold, ray_fraction, station_separation.
    customer_clearance is absolute. perturbation is the half-width of the
    uniform jitter applied to midpoint candidates.
    """

    target_count: int = 0
    perturbation: float = 0.02
    midpoint_threshold: float = 0.8
    depot_threshold: float = 0.7
    nearest_station_threshold: float = 0.5
    ray_fraction: float = 0.6
    station_separation: float = 0.3
    customer_clearance: float = 0.04

    def __post_init__(self) -> None:
        if self.target_count < 0:
            raise ValueError("target_count must be non-negative")
        if self.perturbation < 0:
            raise ValueError("perturbation must be non-negative")


@dataclass
class StationDiagnostics:
    """Counters from one infrastructure build."""

    midpoint_candidates: int = 0
    ray_candidates: int = 0
    kept_from_rules: int = 0
    top_ups: int = 0
    truncated: int = 0
    separation_relaxations: int = 0


# Attempts per required top-up station before the separation rule is dropped.
TOP_UP_MAX_ATTEMPTS = 200


def candidate_midpoint_stations(
    customers: list[Point],
    max_range: float,
    perturbation: float,
    rng: np.random.Generator,
    threshold_fraction: float = 0.8,
) -> list[Point]:
    """One jittered midpoint per customer pair farther apart than 0.8R.

    Pairs are enumerated in ascending (i, j) index order so the candidate
    sequence, and hence the rng consumption, is reproducible.
    """
    out: list[Point] = []
    threshold = threshold_fraction * max_range
    for i in range(len(customers)):
        for j in range(i + 1, len(customers)):
            if euclidean_distance(customers[i], customers[j]) > threshold:
                mx = 0.5 * (customers[i].x + customers[j].x)
                my = 0.5 * (customers[i].y + customers[j].y)
                if perturbation > 0:
                    ex, ey = rng.uniform(-perturbation, perturbation, size=2)
                else:
                    ex, ey = 0.0, 0.0
                out.append(clip_unit_square(mx + float(ex), my + float(ey)))
    return out


def candidate_depot_ray_stations(
    depot: Point,
    customers: list[Point],
    existing_stations: list[Point],
    max_range: float,
    depot_threshold: float = 0.7,
    nearest_station_threshold: float = 0.5,
    ray_fraction: float = 0.6,
) -> list[Point]:
    """Stations on depot-to-customer rays for customers beyond 0.7R.

    A ray station is only inserted when the nearest station (existing plus
    rays inserted earlier in this pass, processed in customer index order)
    is farther than 0.5R or absent. The insertion point 0.6R along the ray
    is clipped to the unit square.
    """
    working = list(existing_stations)
    inserted: list[Point] = []
    for c in customers:
        d0 = euclidean_distance(depot, c)
        if d0 <= depot_threshold * max_range:
            continue
        if working:
            nearest = min(euclidean_distance(c, s) for s in working)
            if nearest <= nearest_station_threshold * max_range:
                continue
        scale = ray_fraction * max_range / d0
        point = clip_unit_square(depot.x + scale * (c.x - depot.x), depot.y + scale * (c.y - depot.y))
        working.append(point)
        inserted.append(point)
    return inserted


def passes_station_constraints(
    candidate: Point,
    kept: list[Point],
    customers: list[Point],
    max_range: float,
    station_separation: float = 0.3,
    customer_clearance: float = 0.04,
    require_separation: bool = True,
) -> bool:
    if require_separation:
        min_sep = station_separation * max_range
        if any(euclidean_distance(candidate, s) < min_sep - TOL for s in kept):
            return False
    return not any(euclidean_distance(candidate, c) < customer_clearance - TOL for c in customers)


def filter_stations(
    candidates: list[Point],
    customers: list[Point],
    max_range: float,
    kept: list[Point] | None = None,
    station_separation: float = 0.3,
    customer_clearance: float = 0.04,
) -> list[Point]:
    """Greedy redundancy filter in candidate order.

    A candidate survives iff it keeps at least 0.3R from every previously
    kept station (including `kept`, which is not returned) and at least
    the clearance distance from every customer. Both bounds are inclusive.
    """
    prior = list(kept) if kept else []
    out: list[Point] = []
    for candidate in candidates:
        if passes_station_constraints(
            candidate, prior, customers, max_range, station_separation, customer_clearance
        ):
            prior.append(candidate)
            out.append(candidate)
    return out


def top_up_stations(
    kept: list[Point],
    target_count: int,
    customers: list[Point],
    max_range: float,
    rng: np.random.Generator,
    station_separation: float = 0.3,
    customer_clearance: float = 0.04,
    diagnostics: StationDiagnostics | None = None,
) -> list[Point]:
    """Uniform rejection sampling until `target_count` stations exist.

    Returns only the added points. Each required station gets
    TOP_UP_MAX_ATTEMPTS draws under the full constraints; after that the
    separation rule is dropped for that station (customer clearance stays)
    and the relaxation is counted. A second exhausted round accepts the
    final draw outright so the call always terminates.
    """
    added: list[Point] = []
    current = list(kept)
    while len(current) + len(added) < target_count:
        point = None
        for _ in range(TOP_UP_MAX_ATTEMPTS):
            candidate = Point(*(float(v) for v in rng.uniform(0.0, 1.0, size=2)))
            if passes_station_constraints(
                candidate, current + added, customers, max_range, station_separation, customer_clearance
            ):
                point = candidate
                break
        if point is None:
            if diagnostics is not None:
                diagnostics.separation_relaxations += 1
            for _ in range(TOP_UP_MAX_ATTEMPTS):
                candidate = Point(*(float(v) for v in rng.uniform(0.0, 1.0, size=2)))
                point = candidate
                if passes_station_constraints(
                    candidate, [], customers, max_range, station_separation, customer_clearance,
                    require_separation=False,
                ):
                    break
        added.append(point)
    return added


def select_station_subset(
    rays: list[Point],
    midpoints: list[Point],
    target: int,
    customers: list[Point],
    max_range: float,
) -> list[Point]:
    """Choose `target` stations when the rules over-produce.

    Ray stations are retained first (they exist because some customer was
    hard to reach from the depot). Remaining slots go to midpoints by a
    greedy max-coverage pass: each pick is the midpoint reaching the most
    customers not yet within range of a chosen station, ties resolved by
    generation order. Once every customer is covered the gains are all
    zero and the pass degenerates to plain generation order.
    """
    if target <= len(rays):
        return rays[:target]
    chosen = list(rays)
    covered = [
        any(euclidean_distance(c, s) <= max_range + TOL for s in chosen)
        for c in customers
    ]
    pool = list(midpoints)
    while pool and len(chosen) < target:
        best_index = 0
        best_gain = -1
        for index, point in enumerate(pool):
            gain = sum(
                1
                for c, seen in zip(customers, covered)
                if not seen and euclidean_distance(c, point) <= max_range + TOL
            )
            if gain > best_gain:
                best_index = index
                best_gain = gain
        pick = pool.pop(best_index)
        chosen.append(pick)
        for i, c in enumerate(covered):
            if not c and euclidean_distance(customers[i], pick) <= max_range + TOL:
                covered[i] = True
    return chosen


def build_infrastructure(
    depot: Point,
    customers: list[Point],
    config: StationConfig,
    max_range: float,
    rng: np.random.Generator,
    first_id: int,
) -> tuple[list[Node], StationDiagnostics]:
    """Run the full placement pipeline and assign serial ids.

    Order: midpoint candidates, filter, ray candidates against the kept
    set, filter of the new insertions, then top-up. When the rules
    over-produce, the list is reduced to the target with ray stations
    first and midpoints selected for customer coverage; top-up points,
    when present, come last.
    """
    diagnostics = StationDiagnostics()
    midpoint_raw = candidate_midpoint_stations(
        customers, max_range, config.perturbation, rng, config.midpoint_threshold
    )
    diagnostics.midpoint_candidates = len(midpoint_raw)
    kept_midpoints = filter_stations(
        midpoint_raw, customers, max_range,
        station_separation=config.station_separation,
        customer_clearance=config.customer_clearance,
    )
    ray_raw = candidate_depot_ray_stations(
        depot, customers, kept_midpoints, max_range,
        config.depot_threshold, config.nearest_station_threshold, config.ray_fraction,
    )
    diagnostics.ray_candidates = len(ray_raw)
    kept_rays = filter_stations(
        ray_raw, customers, max_range,
        kept=kept_midpoints,
        station_separation=config.station_separation,
        customer_clearance=config.customer_clearance,
    )
    ordered = kept_rays + kept_midpoints
    diagnostics.kept_from_rules = len(ordered)
    if len(ordered) > config.target_count:
        diagnostics.truncated = len(ordered) - config.target_count
        ordered = select_station_subset(
            kept_rays, kept_midpoints, config.target_count, customers, max_range
        )
    elif len(ordered) < config.target_count:
        added = top_up_stations(
            ordered, config.target_count, customers, max_range, rng,
            config.station_separation, config.customer_clearance, diagnostics,
        )
        diagnostics.top_ups = len(added)
        ordered = ordered + added
    nodes = [Node(id=first_id + k, kind=STATION, position=p) for k, p in enumerate(ordered)]
    return nodes, diagnostics
