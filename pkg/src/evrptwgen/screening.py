"""Stage-1 screening: linear-time necessary conditions on each customer."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .model import Instance, TOL

ENERGY_REACHABILITY = "energy_reachability"
DEPOT_RETURN = "depot_return"
STATION_ACCESSIBILITY = "station_accessibility"

CONDITIONS = (ENERGY_REACHABILITY, DEPOT_RETURN, STATION_ACCESSIBILITY)


@dataclass(frozen=True)
class Violation:
    """One failed screening condition for one customer."""

    condition: str
    customer_id: int
    measured: float
    threshold: float

    def to_dict(self) -> dict:
        return {
            "condition": self.condition,
            "customer_id": self.customer_id,
            "measured": self.measured,
            "threshold": self.threshold,
        }


@dataclass(frozen=True)
class ScreeningReport:
    """Aggregate of all violations across the three conditions."""

    violations: tuple[Violation, ...]

    @property
    def passed(self) -> bool:
        return not self.violations

    def by_condition(self, condition: str) -> list[Violation]:
        return [v for v in self.violations if v.condition == condition]

    def to_dict(self) -> dict:
        return {"passed": self.passed, "violations": [v.to_dict() for v in self.violations]}


def check_energy_reachability(instance: Instance) -> list[Violation]:
    """Each customer must lie within range of the depot or some station."""
    max_range = instance.vehicle.max_range
    out: list[Violation] = []
    for c in instance.customers:
        nearest = instance.distance(c.id, 0)
        for s in instance.stations:
            nearest = min(nearest, instance.distance(c.id, s.id))
        if nearest > max_range + TOL:
            out.append(Violation(ENERGY_REACHABILITY, c.id, nearest, max_range))
    return out


def check_depot_return(instance: Instance) -> list[Violation]:
    """Service started at the window open must still allow a depot return."""
    horizon = instance.temporal.horizon
    out: list[Violation] = []
    for c in instance.customers:
        completion = c.ready + c.service + instance.distance(c.id, 0)
        if completion > horizon + TOL:
            out.append(Violation(DEPOT_RETURN, c.id, completion, horizon))
    return out


def check_station_accessibility(instance: Instance) -> list[Violation]:
    """Each customer must lie within range of some external station.

    The depot does not count here, so a station-free instance violates
    this condition for every customer.
    """
    max_range = instance.vehicle.max_range
    out: list[Violation] = []
    for c in instance.customers:
        if instance.stations:
            nearest = min(instance.distance(c.id, s.id) for s in instance.stations)
        else:
            nearest = math.inf
        if nearest > max_range + TOL:
            out.append(Violation(STATION_ACCESSIBILITY, c.id, nearest, max_range))
    return out


def screen(instance: Instance) -> ScreeningReport:
    """Run all three checks without short-circuiting.

    A passing report is necessary but not sufficient for routing
    feasibility; Stage 2 settles the small cases exactly.
    """
    violations = (
        check_energy_reachability(instance)
        + check_depot_return(instance)
        + check_station_accessibility(instance)
    )
    return ScreeningReport(violations=tuple(violations))
