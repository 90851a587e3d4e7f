"""Baseline improvement solver: greedy construction plus tabu-guided search.

The search accepts a move only when every touched route passes the route
simulator semantics; stations are inserted on demand by an energy-repair
step (per violating arc, the station with the smallest detour, ties to the
lower id). Determinism is fixed by (instance, params): candidate scans run
in ascending index order and the only randomness is the seeded shake.
"""

from __future__ import annotations

import heapq
import math
import time as _time
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .model import Instance, TOL
from .verify import distance_matrix, simulate_route

_OK = "ok"


class SolverFailure(Exception):
    """No feasible solution was found within the budget."""


class InvalidSolutionError(ValueError):
    """A solution failed re-simulation or coverage checks."""


@dataclass(frozen=True)
class SolverParams:
    iterations: int = 200
    time_budget: float = 5.0
    tabu_tenure: int = 8
    stagnation_limit: int = 30
    seed: int = 0
    infeasibility_penalty: float = 10.0
    use_relocate: bool = True
    use_exchange: bool = True
    use_two_opt_star: bool = True
    use_station_insert: bool = True
    use_station_remove: bool = True
    use_route_merge: bool = True

    def __post_init__(self) -> None:
        if self.iterations < 0 or self.time_budget <= 0 or self.tabu_tenure < 0:
            raise ValueError("budgets must be positive and tenure non-negative")
        if self.stagnation_limit < 1:
            raise ValueError("stagnation_limit must be at least 1")


@dataclass(frozen=True)
class Solution:
    """Depot-anchored routes with their aggregate metrics."""

    routes: tuple[tuple[int, ...], ...]
    total_distance: float
    ev_count: int


@dataclass(frozen=True)
class SolutionMetrics:
    total_distance: float
    ev_count: int
    route_slacks: tuple[float, ...]


class _Ctx:
    """Flattened instance arrays for the hot route-checking path."""

    def __init__(self, instance: Instance) -> None:
        self.instance = instance
        self.n = instance.n_customers
        self.dist = distance_matrix(instance).tolist()
        size = 1 + self.n + instance.n_stations
        self.ready = [0.0] * size
        self.due = [0.0] * size
        self.service = [0.0] * size
        self.demand = [0.0] * size
        for c in instance.customers:
            self.ready[c.id] = c.ready
            self.due[c.id] = c.due
            self.service[c.id] = c.service
            self.demand[c.id] = c.demand
        self.station_ids = [s.id for s in instance.stations]
        v = instance.vehicle
        self.battery = v.battery
        self.rate = v.consumption_rate
        self.charge = v.charge_rate
        self.capacity = v.capacity
        self.horizon = instance.temporal.horizon

    def walk(self, route: list[int]) -> tuple[str, int, float, float]:
        """Check one closed route.

        Returns (verdict, violating position, departure energy before the
        violating arc, total distance walked). The verdict uses the route
        simulator's violation names; the energy value is what repair needs
        to pick a reachable station.
        """
        n = self.n
        dist = self.dist
        depart = 0.0
        energy = self.battery
        load = self.capacity
        total = 0.0
        prev = 0
        for pos in range(1, len(route)):
            node = route[pos]
            d = dist[prev][node]
            total += d
            arrival = depart + d
            y_arr = energy - self.rate * d
            if y_arr < -TOL:
                return "energy", pos, energy, total
            if 1 <= node <= n:
                begin = arrival if arrival > self.ready[node] else self.ready[node]
                if begin > self.due[node] + TOL:
                    return "time_window", pos, energy, total
                load -= self.demand[node]
                if load < -TOL:
                    return "capacity", pos, energy, total
                depart = begin + self.service[node]
                energy = y_arr
            elif node == 0:
                if arrival > self.horizon + TOL:
                    return "horizon", pos, energy, total
                depart = arrival
                energy = y_arr
            else:
                depart = arrival + (self.battery - y_arr) / self.charge
                energy = self.battery
            prev = node
        return _OK, -1, energy, total

    def feasible(self, route: list[int]) -> bool:
        return self.walk(route)[0] == _OK

    def repair(self, route: list[int], allow_insert: bool) -> Optional[list[int]]:
        """Fix energy violations by inserting stations, one arc at a time.

        For the first violating arc (a, b), candidate stations must be
        reachable from a on the current charge and within full range of b;
        the one with the smallest detour wins, ties to the lower id.
        Non-energy violations are not repairable here.
        """
        current = list(route)
        max_inserts = 2 * len(self.station_ids) + 2
        for _ in range(max_inserts + 1):
            verdict, pos, prev_energy, _ = self.walk(current)
            if verdict == _OK:
                return current
            if verdict != "energy" or not allow_insert:
                return None
            a, b = current[pos - 1], current[pos]
            best: Optional[tuple[float, int]] = None
            for sid in self.station_ids:
                if sid == a:
                    continue
                to_s = self.dist[a][sid]
                if to_s * self.rate > prev_energy + TOL:
                    continue
                from_s = self.dist[sid][b]
                if from_s * self.rate > self.battery + TOL:
                    continue
                detour = to_s + from_s - self.dist[a][b]
                if best is None or (detour, sid) < best:
                    best = (detour, sid)
            if best is None:
                return None
            current.insert(pos, best[1])
        return None

    def route_distance(self, route: list[int]) -> float:
        dist = self.dist
        return sum(dist[route[k]][route[k + 1]] for k in range(len(route) - 1))

    def relay_route(self, cid: int) -> Optional[list[int]]:
        """Single-customer tour through charge-hop chains, or None.

        Arc repair dead-ends when a customer must recharge immediately
        before and after service; no insertion on the violating arc alone
        can raise the arrival charge. This builds the sandwich directly:
        Dijkstra over depot-plus-stations with hops within full range,
        then the entry/exit pair minimizing total tour length under the
        sandwich energy bound. The walk still arbitrates timing.
        """
        max_range = self.battery / self.rate
        hubs = [0, *self.station_ids]
        spd: dict[int, float] = {h: math.inf for h in hubs}
        back: dict[int, int] = {}
        spd[0] = 0.0
        heap: list[tuple[float, int]] = [(0.0, 0)]
        while heap:
            d0, u = heapq.heappop(heap)
            if d0 > spd[u] + 1e-15:
                continue
            for v in hubs:
                if v == u:
                    continue
                step = self.dist[u][v]
                if step > max_range + TOL:
                    continue
                nd = d0 + step
                if nd < spd[v] - 1e-15:
                    spd[v] = nd
                    back[v] = u
                    heapq.heappush(heap, (nd, v))

        best: Optional[tuple[float, int, int]] = None
        for p in hubs:
            if not math.isfinite(spd[p]):
                continue
            to_c = self.dist[p][cid]
            if to_c * self.rate > self.battery + TOL:
                continue
            for q in hubs:
                if not math.isfinite(spd[q]):
                    continue
                from_c = self.dist[cid][q]
                if (to_c + from_c) * self.rate > self.battery + TOL:
                    continue
                key = (spd[p] + to_c + from_c + spd[q], p, q)
                if best is None or key < best:
                    best = key
        if best is None:
            return None
        _, p, q = best

        def chain_from_depot(h: int) -> list[int]:
            path = [h]
            while path[-1] != 0:
                path.append(back[path[-1]])
            path.reverse()
            return path

        entry = chain_from_depot(p)
        exit_chain = chain_from_depot(q)
        exit_chain.reverse()
        route = entry + [cid] + exit_chain
        return route if self.feasible(route) else None


def _route_customers(ctx: _Ctx, route: list[int]) -> list[int]:
    return [v for v in route if 1 <= v <= ctx.n]


def construct_initial(instance: Instance, params: SolverParams = SolverParams()) -> Solution:
    """Greedy appender ordered by window open time, then id.

    Each customer is appended to the tail of the open route, repairing
    energy by station insertion; on failure the route is closed and a new
    one opened. A customer that cannot be served even alone aborts.
    """
    ctx = _Ctx(instance)
    order = sorted(range(1, ctx.n + 1), key=lambda cid: (ctx.ready[cid], cid))
    routes: list[list[int]] = []
    body: list[int] = []
    for cid in order:
        candidate = ctx.repair([0, *body, cid, 0], params.use_station_insert)
        if candidate is not None:
            body = candidate[1:-1]
            continue
        if body:
            routes.append([0, *body, 0])
        solo = ctx.repair([0, cid, 0], params.use_station_insert)
        if solo is None and params.use_station_insert:
            solo = ctx.relay_route(cid)
        if solo is None:
            raise SolverFailure(f"customer {cid} cannot be served by a dedicated vehicle")
        body = solo[1:-1]
    if body:
        routes.append([0, *body, 0])
    return _as_solution(instance, ctx, routes)


def _as_solution(instance: Instance, ctx: _Ctx, routes: list[list[int]]) -> Solution:
    cleaned = [list(r) for r in routes if _route_customers(ctx, r)]
    solution = Solution(
        routes=tuple(tuple(r) for r in cleaned),
        total_distance=sum(ctx.route_distance(r) for r in cleaned),
        ev_count=len(cleaned),
    )
    evaluate_solution(instance, solution)
    return solution


def evaluate_solution(instance: Instance, solution: Solution) -> SolutionMetrics:
    """Re-simulate every route and enforce exactly-once coverage."""
    seen: set[int] = set()
    slacks: list[float] = []
    total = 0.0
    for idx, route in enumerate(solution.routes):
        trace = simulate_route(instance, list(route))
        if not trace.feasible:
            v = trace.violation
            raise InvalidSolutionError(
                f"route {idx} violates {v.kind} at node {v.node_id}: {v.detail}"
            )
        for node_id in route:
            if 1 <= node_id <= instance.n_customers:
                if node_id in seen:
                    raise InvalidSolutionError(f"route {idx}: customer {node_id} served twice")
                seen.add(node_id)
        total += trace.total_distance
        slacks.append(instance.temporal.horizon - trace.end_time)
    missing = set(range(1, instance.n_customers + 1)) - seen
    if missing:
        raise InvalidSolutionError(f"customers never served: {sorted(missing)}")
    if abs(total - solution.total_distance) > 1e-6:
        raise InvalidSolutionError(
            f"declared distance {solution.total_distance} differs from traced {total}"
        )
    nonempty = sum(1 for r in solution.routes if any(1 <= v <= instance.n_customers for v in r))
    if nonempty != solution.ev_count:
        raise InvalidSolutionError(f"declared ev_count {solution.ev_count}, traced {nonempty}")
    return SolutionMetrics(total_distance=total, ev_count=nonempty, route_slacks=tuple(slacks))


@dataclass
class _Move:
    """A priced, repaired, not-yet-applied change to one or two routes."""

    delta: float
    route_i: int
    new_i: list[int]
    route_j: Optional[int] = None
    new_j: Optional[list[int]] = None
    moved: tuple[int, ...] = ()


def _price(ctx: _Ctx, params: SolverParams, routes: list[list[int]],
           i: int, new_i: list[int], j: Optional[int], new_j: Optional[list[int]],
           moved: tuple[int, ...]) -> Optional[_Move]:
    """Repair the candidate routes and price the change; None if worse."""
    old = ctx.route_distance(routes[i])
    if j is not None:
        old += ctx.route_distance(routes[j])
    fixed_i = ctx.repair(new_i, params.use_station_insert) if len(new_i) > 2 else new_i
    if fixed_i is None:
        return None
    cost = ctx.route_distance(fixed_i)
    fixed_j: Optional[list[int]] = None
    if j is not None:
        fixed_j = ctx.repair(new_j, params.use_station_insert) if len(new_j) > 2 else list(new_j)
        if fixed_j is None:
            return None
        cost += ctx.route_distance(fixed_j)
    delta = cost - old
    if delta >= -TOL:
        return None
    return _Move(delta=delta, route_i=i, new_i=fixed_i, route_j=j, new_j=fixed_j, moved=moved)


def _apply(routes: list[list[int]], move: _Move, ctx: _Ctx) -> None:
    routes[move.route_i] = move.new_i
    if move.route_j is not None and move.new_j is not None:
        routes[move.route_j] = move.new_j
    routes[:] = [r for r in routes if _route_customers(ctx, r)]


def _customer_positions(ctx: _Ctx, route: list[int]) -> list[int]:
    return [p for p in range(1, len(route) - 1) if 1 <= route[p] <= ctx.n]


def _scan_once(ctx: _Ctx, params: SolverParams, routes: list[list[int]],
               tabu: dict[int, int], iteration: int, current_cost: float,
               best_cost: float) -> Optional[_Move]:
    """First-improvement scan across all enabled neighborhoods.

    Tabu applies to the customers a move touches; a tabu move is still
    taken when it would beat the best-known cost (aspiration).
    """

    def allowed(move: _Move) -> bool:
        if all(tabu.get(cid, -1) < iteration for cid in move.moved):
            return True
        return current_cost + move.delta < best_cost - TOL

    if params.use_station_remove:
        for i, route in enumerate(routes):
            for p in range(1, len(route) - 1):
                if route[p] > ctx.n:
                    move = _price(ctx, params, routes, i, route[:p] + route[p + 1:], None, None, ())
                    if move is not None:
                        return move
    if params.use_route_merge:
        for i in range(len(routes)):
            for j in range(len(routes)):
                if i == j:
                    continue
                merged = [0, *routes[i][1:-1], *routes[j][1:-1], 0]
                move = _price(ctx, params, routes, i, merged, j, [0, 0], ())
                if move is not None:
                    return move
    if params.use_relocate:
        for i in range(len(routes)):
            for p in _customer_positions(ctx, routes[i]):
                cid = routes[i][p]
                removed = routes[i][:p] + routes[i][p + 1:]
                for j in range(len(routes)):
                    base = removed if j == i else routes[j]
                    for q in range(1, len(base)):
                        candidate = base[:q] + [cid] + base[q:]
                        if j == i:
                            move = _price(ctx, params, routes, i, candidate, None, None, (cid,))
                        else:
                            move = _price(ctx, params, routes, j, candidate, i, removed, (cid,))
                        if move is not None and allowed(move):
                            for m in move.moved:
                                tabu[m] = iteration + params.tabu_tenure
                            return move
    if params.use_exchange:
        for i in range(len(routes)):
            for j in range(i + 1, len(routes)):
                for p in _customer_positions(ctx, routes[i]):
                    for q in _customer_positions(ctx, routes[j]):
                        a, b = routes[i][p], routes[j][q]
                        cand_i = routes[i][:p] + [b] + routes[i][p + 1:]
                        cand_j = routes[j][:q] + [a] + routes[j][q + 1:]
                        move = _price(ctx, params, routes, i, cand_i, j, cand_j, (a, b))
                        if move is not None and allowed(move):
                            for m in move.moved:
                                tabu[m] = iteration + params.tabu_tenure
                            return move
    if params.use_two_opt_star:
        for i in range(len(routes)):
            for j in range(i + 1, len(routes)):
                for p in range(1, len(routes[i])):
                    for q in range(1, len(routes[j])):
                        cand_i = routes[i][:p] + routes[j][q:]
                        cand_j = routes[j][:q] + routes[i][p:]
                        move = _price(ctx, params, routes, i, cand_i, j, cand_j, ())
                        if move is not None:
                            return move
    return None


def _remove_customer(routes: list[list[int]], cid: int) -> None:
    for route in routes:
        if cid in route:
            route.remove(cid)
            return


def _shake(ctx: _Ctx, params: SolverParams, routes: list[list[int]],
           rng: np.random.Generator) -> bool:
    """Remove a few random customers and reinsert them at random spots.

    Feasible positions are preferred; failing those, the position with the
    lowest distance-plus-penalty score is held infeasible and repaired at
    the end. Returns False (caller reverts) when the result stays broken.
    """
    customers = sorted({cid for route in routes for cid in _route_customers(ctx, route)})
    if not customers:
        return False
    k = min(3, len(customers))
    picks = rng.choice(len(customers), size=k, replace=False).tolist()
    removed = [customers[p] for p in sorted(picks)]
    for cid in removed:
        _remove_customer(routes, cid)
    routes[:] = [r for r in routes if _route_customers(ctx, r)]
    for cid in removed:
        feasible_options: list[tuple[int, int]] = []
        fallback: Optional[tuple[float, int, int]] = None
        for i, route in enumerate(routes):
            for q in range(1, len(route)):
                candidate = route[:q] + [cid] + route[q:]
                fixed = ctx.repair(candidate, params.use_station_insert)
                if fixed is not None:
                    feasible_options.append((i, q))
                else:
                    score = (ctx.route_distance(candidate) - ctx.route_distance(route)
                             + params.infeasibility_penalty)
                    if fallback is None or score < fallback[0]:
                        fallback = (score, i, q)
        if feasible_options:
            i, q = feasible_options[int(rng.integers(len(feasible_options)))]
            routes[i] = ctx.repair(routes[i][:q] + [cid] + routes[i][q:], params.use_station_insert)
        elif ctx.repair([0, cid, 0], params.use_station_insert) is not None:
            routes.append(ctx.repair([0, cid, 0], params.use_station_insert))
        elif fallback is not None:
            _, i, q = fallback
            routes[i] = routes[i][:q] + [cid] + routes[i][q:]
        else:
            return False
    repaired: list[list[int]] = []
    for route in routes:
        fixed = ctx.repair(route, params.use_station_insert)
        if fixed is None:
            return False
        repaired.append(fixed)
    routes[:] = repaired
    return True


def solve(instance: Instance, params: SolverParams = SolverParams()) -> Solution:
    """Improve the greedy construction under the iteration and time budgets.

    Raises SolverFailure when no feasible solution is found at all. The
    returned solution always re-simulates clean and its distance never
    exceeds the construction's.
    """
    deadline = _time.monotonic() + params.time_budget
    initial = construct_initial(instance, params)
    ctx = _Ctx(instance)
    routes = [list(r) for r in initial.routes]
    current_cost = initial.total_distance
    best_routes = [list(r) for r in routes]
    best_cost = current_cost
    tabu: dict[int, int] = {}
    stagnation = 0
    rng = np.random.default_rng(params.seed)
    for iteration in range(params.iterations):
        if _time.monotonic() > deadline:
            break
        move = _scan_once(ctx, params, routes, tabu, iteration, current_cost, best_cost)
        if move is not None:
            _apply(routes, move, ctx)
            current_cost = sum(ctx.route_distance(r) for r in routes)
            if current_cost < best_cost - TOL:
                best_cost = current_cost
                best_routes = [list(r) for r in routes]
                stagnation = 0
            else:
                stagnation += 1
        else:
            stagnation = params.stagnation_limit
        if stagnation >= params.stagnation_limit:
            snapshot = [list(r) for r in routes]
            if _shake(ctx, params, routes, rng):
                current_cost = sum(ctx.route_distance(r) for r in routes)
            else:
                routes[:] = snapshot
            stagnation = 0
    return _as_solution(instance, ctx, best_routes)
