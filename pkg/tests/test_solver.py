"""Heuristic solver: validity of its output, never its optimality."""

from __future__ import annotations

import pytest

from evrptwgen import (
    GeneratorConfig,
    InvalidSolutionError,
    Solution,
    SolverFailure,
    SolverParams,
    SpatialConfig,
    StationConfig,
    construct_initial,
    evaluate_solution,
    generate_one,
    simulate_route,
    solve,
)
from evrptwgen.solver import _Ctx

from conftest import build_instance


def accepted_instance(seed_start: int = 0):
    cfg = GeneratorConfig(
        n_customers=10,
        spatial=SpatialConfig(family="clustered"),
        stations=StationConfig(target_count=3),
    )
    for seed in range(seed_start, seed_start + 200):
        outcome = generate_one(cfg, seed)
        if outcome.accepted:
            return outcome.instance
    pytest.fail("no accepted instance found")


class TestConstructInitial:
    def test_easy_triangle(self, easy_triangle_instance):
        solution = construct_initial(easy_triangle_instance)
        metrics = evaluate_solution(easy_triangle_instance, solution)
        assert metrics.ev_count == solution.ev_count
        assert metrics.total_distance == pytest.approx(solution.total_distance, abs=1e-9)

    def test_relay_requires_station_hops(self, relay_instance):
        solution = construct_initial(relay_instance)
        evaluate_solution(relay_instance, solution)
        # The only way to the customer is through the relay station.
        assert any(v == 2 for route in solution.routes for v in route)

    def test_unservable_customer_raises(self, lone_customer_instance):
        with pytest.raises(SolverFailure):
            construct_initial(lone_customer_instance)


class TestSolve:
    def test_output_is_always_clean(self):
        inst = accepted_instance()
        solution = solve(inst, SolverParams(iterations=60, seed=0))
        metrics = evaluate_solution(inst, solution)
        assert metrics.ev_count >= 1
        assert len(metrics.route_slacks) == len(solution.routes)
        assert all(s >= -1e-9 for s in metrics.route_slacks)

    def test_deterministic_under_seed(self):
        inst = accepted_instance()
        a = solve(inst, SolverParams(iterations=40, seed=7))
        b = solve(inst, SolverParams(iterations=40, seed=7))
        assert a.routes == b.routes
        assert a.total_distance == b.total_distance

    def test_never_worse_than_initial(self):
        inst = accepted_instance()
        start = construct_initial(inst)
        improved = solve(inst, SolverParams(iterations=60, seed=1))
        assert improved.total_distance <= start.total_distance + 1e-9

    def test_infeasible_instance_fails_loudly(self, lone_customer_instance):
        with pytest.raises(SolverFailure):
            solve(lone_customer_instance, SolverParams(iterations=10, seed=0))


class TestEvaluateSolution:
    def test_rejects_missing_customer(self, easy_triangle_instance):
        good = construct_initial(easy_triangle_instance)
        # Drop one customer from the routes.
        pruned = []
        dropped = False
        for route in good.routes:
            r = list(route)
            if not dropped and 1 in r:
                r.remove(1)
                dropped = True
            pruned.append(tuple(r))
        ctxless = Solution(routes=tuple(pruned), total_distance=good.total_distance, ev_count=good.ev_count)
        with pytest.raises(InvalidSolutionError):
            evaluate_solution(easy_triangle_instance, ctxless)

    def test_rejects_duplicate_customer(self, easy_triangle_instance):
        bad = Solution(
            routes=((0, 1, 0), (0, 1, 2, 3, 0)),
            total_distance=1.0,
            ev_count=2,
        )
        with pytest.raises(InvalidSolutionError):
            evaluate_solution(easy_triangle_instance, bad)

    def test_rejects_wrong_declared_distance(self, easy_triangle_instance):
        good = construct_initial(easy_triangle_instance)
        lied = Solution(routes=good.routes, total_distance=good.total_distance + 1.0, ev_count=good.ev_count)
        with pytest.raises(InvalidSolutionError):
            evaluate_solution(easy_triangle_instance, lied)

    def test_rejects_route_violation(self, relay_instance):
        bad = Solution(routes=((0, 1, 0),), total_distance=1.2, ev_count=1)
        with pytest.raises(InvalidSolutionError):
            evaluate_solution(relay_instance, bad)

    def test_slack_values(self, relay_instance):
        # Hand trace (see test_verify): the relay tour ends at 1.42 of a
        # 2.0 horizon, slack 0.58.
        solution = Solution(routes=((0, 2, 1, 2, 0),), total_distance=1.2, ev_count=1)
        metrics = evaluate_solution(relay_instance, solution)
        assert metrics.route_slacks == (pytest.approx(0.58, abs=1e-12),)


class TestEnergyRepair:
    def test_inserts_cheapest_station(self):
        # Depot-customer distance 0.85 exceeds the 0.8 range, so both the
        # outbound and return arcs need a recharge. Station 2 sits on the
        # straight line (zero detour); station 3 is offset. The min-detour
        # rule must pick station 2 for both insertions.
        inst = build_instance(
            depot_xy=(0.1, 0.5),
            customer_rows=[(0.95, 0.5, 0.2, 0.02, 0.0, 3.0)],
            station_xys=[(0.8, 0.5), (0.75, 0.85)],
            capacity=1.5,
            battery=0.2,
            rate=0.25,
            charge_rate=1.0,
            horizon=3.0,
        )
        ctx = _Ctx(inst)
        repaired = ctx.repair([0, 1, 0], allow_insert=True)
        assert repaired == [0, 2, 1, 2, 0]
        assert ctx.feasible(repaired)

    def test_tie_broken_by_lower_id(self):
        # Stations mirror-symmetric about the depot-customer axis, with
        # offsets that are exact binary fractions: both detours come out
        # bitwise equal and the rule must pin the lower id.
        inst = build_instance(
            depot_xy=(0.1, 0.5),
            customer_rows=[(0.95, 0.5, 0.2, 0.02, 0.0, 3.0)],
            station_xys=[(0.8, 0.5625), (0.8, 0.4375)],
            capacity=1.5,
            battery=0.2,
            rate=0.25,
            charge_rate=1.0,
            horizon=3.0,
        )
        ctx = _Ctx(inst)
        repaired = ctx.repair([0, 1, 0], allow_insert=True)
        assert repaired == [0, 2, 1, 2, 0]
        assert ctx.feasible(repaired)

    def test_unrepairable_returns_none(self, lone_customer_instance):
        ctx = _Ctx(lone_customer_instance)
        assert ctx.repair([0, 1, 0], allow_insert=True) is None
        assert ctx.repair([0, 1, 0], allow_insert=False) is None
