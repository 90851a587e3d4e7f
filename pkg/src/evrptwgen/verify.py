"""Route simulation and Stage-2 exact feasibility verification.

The verifier runs a complete depth-first branch-and-bound over multi-route
constructions in which every customer is visited exactly once, each station
is visitable a bounded number of times per route, and every vehicle leaves
the depot fully charged at time zero. All pruning rules are exact, so the
search proves infeasibility when it exhausts without a witness; budgets
only introduce the separate `unknown` status.
"""

from __future__ import annotations

import math
import time as _time
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .model import Instance, TOL

STATUS_FEASIBLE = "feasible"
STATUS_INFEASIBLE = "infeasible"
STATUS_UNKNOWN = "unknown"

VIOLATION_STRUCTURE = "structure"
VIOLATION_TIME_WINDOW = "time_window"
VIOLATION_ENERGY = "energy"
VIOLATION_CAPACITY = "capacity"
VIOLATION_HORIZON = "horizon"

# Hard cap on oracle expansions; exceeding it means the instance is far
# outside the size the oracle is meant for.
_ORACLE_NODE_CAP = 100_000_000


@dataclass(frozen=True)
class SearchLimits:
    """Budgets and structural caps for the exact search."""

    time_budget: float = 10.0
    node_budget: int = 5_000_000
    max_station_visits: int = 2
    max_vehicles: Optional[int] = None

    def __post_init__(self) -> None:
        if self.time_budget <= 0 or self.node_budget <= 0 or self.max_station_visits <= 0:
            raise ValueError("budgets and caps must be positive")
        if self.max_vehicles is not None and self.max_vehicles < 1:
            raise ValueError("max_vehicles must be at least 1 when given")


@dataclass(frozen=True)
class NodeEvent:
    """State observed at one stop of a simulated route."""

    node_id: int
    arrival: float
    begin: float
    departure: float
    energy_on_arrival: float
    energy_on_departure: float
    load_after: float


@dataclass(frozen=True)
class RouteViolation:
    """First constraint broken while walking a route."""

    kind: str
    node_id: int
    detail: str


@dataclass(frozen=True)
class RouteTrace:
    """Full walk of a route: per-stop events plus totals."""

    feasible: bool
    events: tuple[NodeEvent, ...]
    violation: Optional[RouteViolation]
    total_distance: float
    end_time: float


@dataclass(frozen=True)
class VerificationResult:
    status: str
    witness: tuple[tuple[int, ...], ...] = ()
    nodes_explored: int = 0
    elapsed: float = 0.0

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "witness": [list(r) for r in self.witness],
            "nodes_explored": self.nodes_explored,
            "elapsed": self.elapsed,
        }


def default_max_vehicles(instance: Instance) -> int:
    """Fleet bound: ceil(total demand / capacity) + 1, capped at N."""
    total = instance.total_demand()
    m = math.ceil(total / instance.vehicle.capacity) + 1
    return max(1, min(m, instance.n_customers))


def distance_matrix(instance: Instance) -> np.ndarray:
    """Dense distances indexed by serial node id (0..N+S)."""
    count = 1 + instance.n_customers + instance.n_stations
    xy = np.zeros((count, 2))
    xy[0] = [instance.depot.position.x, instance.depot.position.y]
    for c in instance.customers:
        xy[c.id] = [c.position.x, c.position.y]
    for s in instance.stations:
        xy[s.id] = [s.position.x, s.position.y]
    diff = xy[:, None, :] - xy[None, :, :]
    return np.sqrt((diff * diff).sum(axis=2))


def _walk(instance: Instance, route: list[int], require_closed: bool) -> RouteTrace:
    """Shared route walker; `require_closed` enforces the final depot stop."""
    n = instance.n_customers
    n_nodes = 1 + n + instance.n_stations
    if not route or route[0] != 0:
        return RouteTrace(False, (), RouteViolation(VIOLATION_STRUCTURE, route[0] if route else -1,
                                                    "route must start at the depot"), 0.0, 0.0)
    if require_closed and (len(route) < 2 or route[-1] != 0):
        return RouteTrace(False, (), RouteViolation(VIOLATION_STRUCTURE, route[-1] if route else -1,
                                                    "route must end at the depot"), 0.0, 0.0)
    interior = route[1:-1] if require_closed else route[1:]
    if any(v == 0 for v in interior):
        return RouteTrace(False, (), RouteViolation(VIOLATION_STRUCTURE, 0,
                                                    "depot may not appear inside a route"), 0.0, 0.0)
    seen: set[int] = set()
    for v in route:
        if not (0 <= v < n_nodes):
            return RouteTrace(False, (), RouteViolation(VIOLATION_STRUCTURE, v, "unknown node id"), 0.0, 0.0)
        if 1 <= v <= n:
            if v in seen:
                return RouteTrace(False, (), RouteViolation(VIOLATION_STRUCTURE, v,
                                                            "customer repeated within route"), 0.0, 0.0)
            seen.add(v)

    vehicle = instance.vehicle
    horizon = instance.temporal.horizon
    battery = vehicle.battery
    rate = vehicle.consumption_rate
    charge = vehicle.charge_rate
    events: list[NodeEvent] = [NodeEvent(0, 0.0, 0.0, 0.0, battery, battery, vehicle.capacity)]
    depart = 0.0
    energy = battery
    load = vehicle.capacity
    total_distance = 0.0
    prev = 0
    for v in route[1:]:
        d = instance.distance(prev, v)
        total_distance += d
        arrival = depart + d
        energy_arrival = energy - rate * d
        if energy_arrival < -TOL:
            violation = RouteViolation(VIOLATION_ENERGY, v,
                                       f"battery at {energy_arrival:.6g} on arrival")
            return RouteTrace(False, tuple(events), violation, total_distance, arrival)
        if 1 <= v <= n:
            customer = instance.customers_by_id[v]
            begin = max(arrival, customer.ready)
            if begin > customer.due + TOL:
                violation = RouteViolation(VIOLATION_TIME_WINDOW, v,
                                           f"service would start at {begin:.6g} after due {customer.due:.6g}")
                return RouteTrace(False, tuple(events), violation, total_distance, arrival)
            load -= customer.demand
            if load < -TOL:
                violation = RouteViolation(VIOLATION_CAPACITY, v,
                                           f"load short by {-load:.6g}")
                return RouteTrace(False, tuple(events), violation, total_distance, arrival)
            depart = begin + customer.service
            energy = energy_arrival
            events.append(NodeEvent(v, arrival, begin, depart, energy_arrival, energy, load))
        elif v == 0:
            if arrival > horizon + TOL:
                violation = RouteViolation(VIOLATION_HORIZON, v,
                                           f"returned at {arrival:.6g} past horizon {horizon:.6g}")
                return RouteTrace(False, tuple(events), violation, total_distance, arrival)
            events.append(NodeEvent(0, arrival, arrival, arrival, energy_arrival, energy_arrival, load))
            depart = arrival
            energy = energy_arrival
        else:
            dwell = (battery - energy_arrival) / charge
            depart = arrival + dwell
            energy = battery
            events.append(NodeEvent(v, arrival, arrival, depart, energy_arrival, battery, load))
        prev = v
    if not require_closed and depart > horizon + TOL:
        violation = RouteViolation(VIOLATION_HORIZON, prev,
                                   f"clock at {depart:.6g} past horizon {horizon:.6g}")
        return RouteTrace(False, tuple(events), violation, total_distance, depart)
    return RouteTrace(True, tuple(events), None, total_distance, depart)


def simulate_route(instance: Instance, route: list[int]) -> RouteTrace:
    """Walk a closed depot-to-depot route and report the first violation.

    Semantics: arrival = departure + distance under unit speed; waiting
    before a window opens is free; service must begin by the due time;
    stations (never windowed) recharge to full with dwell (B - y) / g;
    load decreases at customers; battery never drops below zero; the
    final depot arrival must be within the horizon.
    """
    return _walk(instance, route, require_closed=True)


class _BudgetExhausted(Exception):
    pass


def _exit_capable(instance: Instance, dist: list[list[float]]) -> list[int]:
    """Replenishers from which the depot is reachable by full-range hops.

    Station-to-station and station-to-depot moves are bounded by direct
    distance (intermediate customers only lengthen a path), so plain BFS
    on the direct-distance graph is exact.
    """
    max_range = instance.vehicle.max_range
    capable = {0}
    frontier = [0]
    station_ids = [s.id for s in instance.stations]
    while frontier:
        nxt: list[int] = []
        for p in frontier:
            for s in station_ids:
                if s not in capable and dist[s][p] <= max_range + TOL:
                    capable.add(s)
                    nxt.append(s)
        frontier = nxt
    return sorted(capable)


def verify(instance: Instance, limits: SearchLimits = SearchLimits()) -> VerificationResult:
    """Exact multi-route feasibility decision by branch-and-bound.

    Returns feasible with a witness (whose routes all re-simulate clean),
    infeasible when the capped search space is exhausted, or unknown when
    a budget runs out first. The node budget is the deterministic limit;
    the wall-clock budget is a safety net.
    """
    started = _time.monotonic()
    n = instance.n_customers
    vehicle = instance.vehicle
    horizon = instance.temporal.horizon
    battery = vehicle.battery
    rate = vehicle.consumption_rate
    charge = vehicle.charge_rate
    capacity = vehicle.capacity
    m = limits.max_vehicles if limits.max_vehicles is not None else default_max_vehicles(instance)
    station_ids = [s.id for s in instance.stations]
    dist = distance_matrix(instance).tolist()
    ready = [0.0] * (1 + n)
    due = [0.0] * (1 + n)
    service = [0.0] * (1 + n)
    demand = [0.0] * (1 + n)
    for c in instance.customers:
        ready[c.id] = c.ready
        due[c.id] = c.due
        service[c.id] = c.service
        demand[c.id] = c.demand
    total_demand = sum(demand)

    capable = _exit_capable(instance, dist)
    capable_stations = [s for s in capable if s != 0]
    n_nodes = 1 + n + instance.n_stations
    # Distance from each node to the nearest exit-capable replenisher.
    exit_dist = [min(dist[u][p] for p in capable) for u in range(n_nodes)]

    # Static necessary condition: a customer's entry leg starts full at some
    # replenisher p reachable with a full charge, and its exit leg must end
    # at another one p'; reachable-with-full-charge points are exactly the
    # exit-capable set, and intermediate customers only lengthen both legs,
    # so 2 * min_p d(c, p) <= R must hold. Deciding here skips the search
    # for instances with charge nodes disconnected from the depot.
    for cid in range(1, n + 1):
        if rate * 2.0 * exit_dist[cid] > battery + 2.0 * TOL:
            return VerificationResult(
                status=STATUS_INFEASIBLE,
                witness=(),
                nodes_explored=0,
                elapsed=_time.monotonic() - started,
            )

    all_mask = 0
    for cid in range(1, n + 1):
        all_mask |= 1 << cid

    nodes_explored = 0
    deadline = started + limits.time_budget
    memo: dict[tuple[int, int], list[tuple]] = {}
    witness: list[tuple[int, ...]] = []
    usage_zero = (0,) * len(station_ids)
    station_slot = {sid: k for k, sid in enumerate(station_ids)}

    def bump() -> None:
        nonlocal nodes_explored
        nodes_explored += 1
        if nodes_explored > limits.node_budget:
            raise _BudgetExhausted
        if nodes_explored % 4096 == 0 and _time.monotonic() > deadline:
            raise _BudgetExhausted

    def dominated(key: tuple[int, int], state: tuple) -> bool:
        entries = memo.get(key)
        if entries is None:
            memo[key] = [state]
            return False
        ru, t, y, load, floor, usage = state
        for eru, et, ey, eload, efloor, eusage in entries:
            if (eru <= ru and et <= t and ey >= y and eload >= load and efloor <= floor
                    and all(a <= b for a, b in zip(eusage, usage))):
                return True
        survivors = [e for e in entries
                     if not (ru <= e[0] and t <= e[1] and y >= e[2] and load >= e[3]
                             and floor <= e[4] and all(a <= b for a, b in zip(usage, e[5])))]
        if len(survivors) < 64:
            survivors.append(state)
        memo[key] = survivors
        return False

    def dfs(node: int, clock: float, energy: float, load: float, visited: int,
            rem_demand: float, floor: int, has_customer: bool, routes_used: int,
            usage: tuple[int, ...], route_acc: list[int]) -> bool:
        bump()
        if 1 <= node <= n:
            if dominated((visited, node), (routes_used, clock, energy, load, floor, usage)):
                return False
        # Capacity lower bound across the current and remaining routes.
        if rem_demand > load + (m - routes_used) * capacity + TOL:
            return False
        last_route = routes_used == m
        if visited != all_mask:
            for cid in range(1, n + 1):
                if visited & (1 << cid):
                    continue
                if not has_customer and cid <= floor:
                    continue
                d = dist[node][cid]
                y_arr = energy - rate * d
                if y_arr < -TOL:
                    continue
                begin = clock + d
                if begin < ready[cid]:
                    begin = ready[cid]
                if begin > due[cid] + TOL:
                    if last_route:
                        # No further route can open, any path from here
                        # reaches this customer no sooner than the direct
                        # arc does, so the whole state is dead.
                        return False
                    continue
                if load < demand[cid] - TOL:
                    continue
                depart = begin + service[cid]
                if depart + dist[cid][0] > horizon + TOL:
                    continue
                if exit_dist[cid] * rate > y_arr + TOL:
                    continue
                route_acc.append(cid)
                ok = dfs(cid, depart, y_arr, load - demand[cid], visited | (1 << cid),
                         rem_demand - demand[cid], cid if not has_customer else floor,
                         True, routes_used, usage, route_acc)
                if ok:
                    return True
                route_acc.pop()
        for sid in capable_stations:
            slot = station_slot[sid]
            if usage[slot] >= limits.max_station_visits:
                continue
            if sid == node:
                continue
            d = dist[node][sid]
            y_arr = energy - rate * d
            if y_arr < -TOL:
                continue
            if y_arr >= battery - TOL:
                continue
            depart = clock + d + (battery - y_arr) / charge
            if depart + dist[sid][0] > horizon + TOL:
                continue
            new_usage = usage[:slot] + (usage[slot] + 1,) + usage[slot + 1:]
            route_acc.append(sid)
            ok = dfs(sid, depart, battery, load, visited, rem_demand,
                     floor, has_customer, routes_used, new_usage, route_acc)
            if ok:
                return True
            route_acc.pop()
        if has_customer:
            d = dist[node][0]
            if energy - rate * d >= -TOL and clock + d <= horizon + TOL:
                route = tuple(route_acc) + (0,)
                if visited == all_mask:
                    witness.append(route)
                    return True
                if routes_used < m:
                    witness.append(route)
                    ok = dfs(0, 0.0, battery, capacity, visited, rem_demand,
                             floor, False, routes_used + 1, usage_zero, [0])
                    if ok:
                        return True
                    witness.pop()
        return False

    status = STATUS_INFEASIBLE
    try:
        if n == 0:
            status = STATUS_FEASIBLE
        elif dfs(0, 0.0, battery, capacity, 0, total_demand, 0, False, 1, usage_zero, [0]):
            status = STATUS_FEASIBLE
    except _BudgetExhausted:
        status = STATUS_UNKNOWN
        witness.clear()
    elapsed = _time.monotonic() - started
    if status == STATUS_FEASIBLE and n > 0:
        for route in witness:
            trace = simulate_route(instance, list(route))
            if not trace.feasible:
                raise RuntimeError(f"witness route {route} failed re-simulation: {trace.violation}")
    return VerificationResult(status=status, witness=tuple(witness),
                              nodes_explored=nodes_explored, elapsed=elapsed)


def bruteforce_oracle(instance: Instance, max_station_visits: int = 2) -> str:
    """Exhaustive reference decision for tiny instances.

    Routes operate independently (each starts at the depot at time zero,
    fully charged), so the instance is feasible iff the customers split
    into at most m groups that each admit a closable route. Per group,
    every customer ordering interleaved with every station-insertion
    pattern (capped per station) is enumerated as a prefix tree; a prefix
    is extended only while re-simulating it from the depot raises no
    violation. No bound, dominance, or symmetry pruning is used.
    Intractable beyond N = 6, which is enforced.
    """
    n = instance.n_customers
    if n > 6:
        raise ValueError("oracle is restricted to instances with at most 6 customers")
    if n == 0:
        return STATUS_FEASIBLE
    m = default_max_vehicles(instance)
    station_ids = [s.id for s in instance.stations]
    capacity = instance.vehicle.capacity
    demand = {c.id: c.demand for c in instance.customers}
    expansions = 0

    def open_prefix_ok(seq: list[int]) -> bool:
        return _walk(instance, seq, require_closed=False).feasible

    def closed_route_ok(seq: list[int]) -> bool:
        return _walk(instance, seq + [0], require_closed=True).feasible

    def extend(seq: list[int], remaining: frozenset, usage: dict) -> bool:
        nonlocal expansions
        expansions += 1
        if expansions > _ORACLE_NODE_CAP:
            raise RuntimeError("oracle expansion cap exceeded")
        if not remaining and closed_route_ok(seq):
            return True
        for cid in sorted(remaining):
            candidate = seq + [cid]
            if open_prefix_ok(candidate):
                if extend(candidate, remaining - {cid}, usage):
                    return True
        for sid in station_ids:
            if usage[sid] >= max_station_visits:
                continue
            candidate = seq + [sid]
            if open_prefix_ok(candidate):
                usage[sid] += 1
                if extend(candidate, remaining, usage):
                    usage[sid] -= 1
                    return True
                usage[sid] -= 1
        return False

    routable_cache: dict[int, bool] = {}

    def routable(mask: int) -> bool:
        cached = routable_cache.get(mask)
        if cached is not None:
            return cached
        members = frozenset(cid for cid in range(1, n + 1) if mask & (1 << cid))
        if sum(demand[cid] for cid in members) > capacity + TOL:
            result = False
        else:
            result = extend([0], members, {sid: 0 for sid in station_ids})
        routable_cache[mask] = result
        return result

    full = 0
    for cid in range(1, n + 1):
        full |= 1 << cid
    # Fewest routes covering each customer set, built over submasks.
    best = {0: 0}

    def min_routes(mask: int) -> int:
        cached = best.get(mask)
        if cached is not None:
            return cached
        result = m + 1
        # Anchor on the lowest set bit so each partition is counted once.
        low = mask & (-mask)
        sub = mask
        while sub:
            if sub & low and routable(sub):
                rest = min_routes(mask ^ sub)
                if 1 + rest < result:
                    result = 1 + rest
            sub = (sub - 1) & mask
        best[mask] = result
        return result

    return STATUS_FEASIBLE if min_routes(full) <= m else STATUS_INFEASIBLE
