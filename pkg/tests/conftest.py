"""Shared fixtures: small hand-built instances with known feasibility."""

from __future__ import annotations

import pytest

from evrptwgen import (
    Customer,
    Instance,
    Node,
    Point,
    TemporalConfig,
    VehicleConfig,
)
from evrptwgen.model import CUSTOMER, DEPOT, STATION


def build_instance(
    depot_xy: tuple[float, float],
    customer_rows: list[tuple[float, float, float, float, float, float]],
    station_xys: list[tuple[float, float]],
    capacity: float,
    battery: float,
    rate: float,
    charge_rate: float,
    horizon: float,
) -> Instance:
    """Assemble an Instance from plain tuples.

    customer_rows are (x, y, demand, service, ready, due); ids follow
    position (customers 1..N, stations N+1..).
    """
    n = len(customer_rows)
    depot = Node(0, DEPOT, Point(*depot_xy))
    customers = tuple(
        Customer(
            node=Node(i + 1, CUSTOMER, Point(row[0], row[1])),
            demand=row[2],
            service=row[3],
            ready=row[4],
            due=row[5],
        )
        for i, row in enumerate(customer_rows)
    )
    stations = tuple(
        Node(n + 1 + j, STATION, Point(x, y)) for j, (x, y) in enumerate(station_xys)
    )
    return Instance(
        depot=depot,
        customers=customers,
        stations=stations,
        vehicle=VehicleConfig(
            capacity=capacity, battery=battery, consumption_rate=rate, charge_rate=charge_rate
        ),
        temporal=TemporalConfig(horizon=horizon),
    )


@pytest.fixture
def relay_instance() -> Instance:
    """One customer reachable only through a relay station.

    Depot (0.1, 0.5), station (0.5, 0.5), customer (0.7, 0.5). Battery
    0.1125 at rate 0.25 gives range 0.45: the direct round trip (1.2) and
    even the direct leg (0.6) are out of reach, but hopping through the
    station costs 0.1 per 0.4 leg and 0.05 per 0.2 leg, which fits.
    """
    return build_instance(
        depot_xy=(0.1, 0.5),
        customer_rows=[(0.7, 0.5, 0.2, 0.02, 0.0, 2.0)],
        station_xys=[(0.5, 0.5)],
        capacity=1.5,
        battery=0.1125,
        rate=0.25,
        charge_rate=1.0,
        horizon=2.0,
    )


@pytest.fixture
def lone_customer_instance() -> Instance:
    """Same geometry as relay_instance but with no stations at all."""
    return build_instance(
        depot_xy=(0.1, 0.5),
        customer_rows=[(0.7, 0.5, 0.2, 0.02, 0.0, 2.0)],
        station_xys=[],
        capacity=1.5,
        battery=0.1125,
        rate=0.25,
        charge_rate=1.0,
        horizon=2.0,
    )


@pytest.fixture
def easy_triangle_instance() -> Instance:
    """Three near-depot customers, battery ample, windows wide open."""
    return build_instance(
        depot_xy=(0.5, 0.5),
        customer_rows=[
            (0.6, 0.5, 0.30, 0.02, 0.0, 2.0),
            (0.5, 0.6, 0.40, 0.02, 0.0, 2.0),
            (0.4, 0.5, 0.45, 0.02, 0.0, 2.0),
        ],
        station_xys=[(0.55, 0.55)],
        capacity=1.5,
        battery=1.0,
        rate=0.25,
        charge_rate=1.0,
        horizon=2.0,
    )
