"""Core domain types, geometry, and the unit-speed travel model."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional

import numpy as np

# Absolute tolerance for every feasibility comparison in the package.
# Feasibility checks chain sums of small distances, so exact float
# comparisons would be brittle.
TOL = 1e-9

DEPOT = "depot"
CUSTOMER = "customer"
STATION = "station"


def round_sig(value: float, digits: int = 12) -> float:
    """Round to `digits` significant digits (the canonical text precision)."""
    if value == 0.0 or not math.isfinite(value):
        return float(value)
    return float(f"{value:.{digits}g}")


@dataclass(frozen=True)
class Point:
    """A location in the unit square."""

    x: float
    y: float

    def as_tuple(self) -> tuple[float, float]:
        return (self.x, self.y)


def euclidean_distance(a: Point, b: Point) -> float:
    """Straight-line distance between two points."""
    return math.hypot(a.x - b.x, a.y - b.y)


def travel_time(distance: float) -> float:
    """Travel time for a distance under the unit-speed model."""
    return distance


@dataclass(frozen=True)
class Node:
    """A depot, customer, or charging-station location with its serial id."""

    id: int
    kind: str
    position: Point


@dataclass(frozen=True)
class Customer:
    """A customer node with demand, service duration, and time window."""

    node: Node
    demand: float
    service: float
    ready: float
    due: float

    @property
    def id(self) -> int:
        return self.node.id

    @property
    def position(self) -> Point:
        return self.node.position


@dataclass(frozen=True)
class VehicleConfig:
    """Vehicle load capacity and the linear energy model."""

    capacity: float
    battery: float
    consumption_rate: float
    charge_rate: float

    @property
    def max_range(self) -> float:
        """Maximum distance on a full battery."""
        return self.battery / self.consumption_rate


@dataclass(frozen=True)
class TemporalConfig:
    """Planning horizon and the shared window-width fraction.

    The width fraction is generation provenance: the windows themselves
    live on the customers, so it is excluded from equality (the text
    format does not encode it and reconstructs it from customer windows).
    """

    horizon: float
    width_fraction: float = field(default=1.0, compare=False)

    @property
    def window_width(self) -> float:
        return self.width_fraction * self.horizon


@dataclass(frozen=True)
class Provenance:
    """Seed and configuration snapshot attached to a generated instance."""

    seed: Optional[int] = None
    config: Optional[dict] = None


@dataclass(frozen=True, eq=True)
class Instance:
    """A complete single-depot routing instance.

    Node ids follow the serialized convention: depot 0, customers 1..N,
    stations N+1..N+S. Provenance is excluded from equality so a parsed
    instance compares equal to the one that was written.
    """

    depot: Node
    customers: tuple[Customer, ...]
    stations: tuple[Node, ...]
    vehicle: VehicleConfig
    temporal: TemporalConfig
    provenance: Provenance = field(default=Provenance(), compare=False)

    @property
    def n_customers(self) -> int:
        return len(self.customers)

    @property
    def n_stations(self) -> int:
        return len(self.stations)

    @cached_property
    def customer_xy(self) -> np.ndarray:
        return np.array([[c.position.x, c.position.y] for c in self.customers], dtype=float).reshape(-1, 2)

    @cached_property
    def station_xy(self) -> np.ndarray:
        return np.array([[s.position.x, s.position.y] for s in self.stations], dtype=float).reshape(-1, 2)

    @cached_property
    def depot_xy(self) -> np.ndarray:
        return np.array([self.depot.position.x, self.depot.position.y], dtype=float)

    @cached_property
    def nodes_by_id(self) -> dict[int, Node]:
        table = {self.depot.id: self.depot}
        for c in self.customers:
            table[c.node.id] = c.node
        for s in self.stations:
            table[s.id] = s
        return table

    @cached_property
    def customers_by_id(self) -> dict[int, Customer]:
        return {c.id: c for c in self.customers}

    def position_of(self, node_id: int) -> Point:
        return self.nodes_by_id[node_id].position

    def distance(self, i: int, j: int) -> float:
        return euclidean_distance(self.position_of(i), self.position_of(j))

    def total_demand(self) -> float:
        return sum(c.demand for c in self.customers)


class InstanceError(ValueError):
    """A structural invariant of an instance does not hold."""


def validate_instance(instance: Instance) -> None:
    """Check id ordering, unit-square positions, and window bounds."""
    if instance.depot.id != 0 or instance.depot.kind != DEPOT:
        raise InstanceError("depot must be node 0 of kind 'depot'")
    n = instance.n_customers
    for idx, c in enumerate(instance.customers, start=1):
        if c.node.id != idx or c.node.kind != CUSTOMER:
            raise InstanceError(f"customer ids must be 1..{n} in order; got {c.node.id} at slot {idx}")
    for offset, s in enumerate(instance.stations, start=n + 1):
        if s.id != offset or s.kind != STATION:
            raise InstanceError(f"station ids must be {n + 1}..{n + instance.n_stations} in order; got {s.id}")
    for node in instance.nodes_by_id.values():
        p = node.position
        if not (-TOL <= p.x <= 1.0 + TOL and -TOL <= p.y <= 1.0 + TOL):
            raise InstanceError(f"node {node.id} position {p.as_tuple()} outside the unit square")
    h = instance.temporal.horizon
    for c in instance.customers:
        if not (-TOL <= c.ready <= c.due + TOL and c.due <= h + TOL):
            raise InstanceError(f"customer {c.id} window [{c.ready}, {c.due}] not within [0, {h}]")
        if c.demand <= 0 or c.demand > 0.30 * instance.vehicle.capacity + TOL:
            raise InstanceError(f"customer {c.id} demand {c.demand} outside (0, 0.30*capacity]")
        if c.service < -TOL:
            raise InstanceError(f"customer {c.id} service duration {c.service} negative")
    v = instance.vehicle
    if min(v.capacity, v.battery, v.consumption_rate, v.charge_rate) <= 0:
        raise InstanceError("vehicle parameters must all be positive")
    t = instance.temporal
    if not (0 < t.width_fraction <= 1.0 + TOL) or t.horizon <= 0:
        raise InstanceError("temporal parameters out of range")
