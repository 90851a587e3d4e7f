"""Generation pipeline: sample, screen, verify, and account for batches.

Draw order per attempt is fixed and documented: depot (random mode only),
customer positions, station perturbations and top-ups, demands, service
times, then window starts (randomized mode only). The generator is numpy's
default 64-bit PCG64 seeded per attempt, so attempt k of a batch with base
seed s reproduces in isolation with seed s + k.
"""

from __future__ import annotations

import time as _time
from dataclasses import asdict, dataclass, field
from typing import Callable, Optional

import numpy as np

from .attributes import (
    ENERGY_ADAPTIVE,
    EnergyConfig,
    REGIME_WIDTH_FRACTIONS,
    ServiceConfig,
    adaptive_battery,
    assign_time_windows,
    sample_demands,
    sample_service_times,
)
from .model import (
    CUSTOMER,
    Customer,
    DEPOT,
    Instance,
    Node,
    Point,
    Provenance,
    TemporalConfig,
    VehicleConfig,
    round_sig,
    validate_instance,
)
from .screening import ScreeningReport, screen
from .spatial import SpatialConfig, place_depot, sample_customers
from .stations import StationConfig, build_infrastructure
from .verify import (
    STATUS_FEASIBLE,
    STATUS_INFEASIBLE,
    SearchLimits,
    VerificationResult,
    verify,
)

# Stage 2 runs only at or below this size; larger instances are accepted on
# Stage-1 screening alone.
STAGE2_MAX_CUSTOMERS = 10

# Batch attempts are capped at this multiple of the acceptance target.
BATCH_ATTEMPT_FACTOR = 100

ACCEPTED = "accepted"
REJECTED_STAGE1 = "rejected_stage1"
REJECTED_STAGE2 = "rejected_stage2"
UNKNOWN_STAGE2 = "unknown_stage2"

FAMILY_LETTERS = {"random": "R", "clustered": "C", "mixed": "RC"}


@dataclass(frozen=True)
class GeneratorConfig:
    """Everything one attempt needs besides its seed."""

    n_customers: int
    spatial: SpatialConfig = SpatialConfig()
    stations: StationConfig = StationConfig()
    energy: EnergyConfig = EnergyConfig()
    service: ServiceConfig = ServiceConfig()
    regime: str = "medium"
    width_fraction: Optional[float] = None
    horizon: float = 2.0
    capacity: float = 1.5
    consumption_rate: float = 0.25
    charge_rate: float = 1.0
    randomized_window_starts: bool = False
    search: SearchLimits = SearchLimits()

    def __post_init__(self) -> None:
        if self.n_customers < 1:
            raise ValueError("n_customers must be at least 1")
        if self.width_fraction is None and self.regime not in REGIME_WIDTH_FRACTIONS:
            raise ValueError(
                f"unknown regime {self.regime!r}; expected one of {sorted(REGIME_WIDTH_FRACTIONS)}"
            )
        if self.width_fraction is not None and not (0 < self.width_fraction <= 1):
            raise ValueError("width_fraction must lie in (0, 1]")
        if self.horizon <= 0:
            raise ValueError("horizon must be positive")
        if min(self.capacity, self.consumption_rate, self.charge_rate) <= 0:
            raise ValueError("vehicle parameters must all be positive")

    @property
    def effective_width_fraction(self) -> float:
        if self.width_fraction is not None:
            return self.width_fraction
        return REGIME_WIDTH_FRACTIONS[self.regime]

    def to_dict(self) -> dict:
        return {
            "n_customers": self.n_customers,
            "spatial": asdict(self.spatial),
            "stations": asdict(self.stations),
            "energy": asdict(self.energy),
            "service": asdict(self.service),
            "regime": self.regime,
            "width_fraction": self.width_fraction,
            "horizon": self.horizon,
            "capacity": self.capacity,
            "consumption_rate": self.consumption_rate,
            "charge_rate": self.charge_rate,
            "randomized_window_starts": self.randomized_window_starts,
            "search": asdict(self.search),
        }


@dataclass(frozen=True)
class GenerationOutcome:
    """One attempt, its instance, and every report it produced."""

    status: str
    instance: Instance
    screening: ScreeningReport
    verification: Optional[VerificationResult]
    verification_skip_reason: Optional[str]
    seed: int
    elapsed: float
    config: GeneratorConfig
    diagnostics: dict

    @property
    def accepted(self) -> bool:
        return self.status == ACCEPTED

    @property
    def feasibility_status(self) -> str:
        if self.status == ACCEPTED:
            return "feasible"
        if self.status == UNKNOWN_STAGE2:
            return "unverified"
        return "infeasible"


def instance_name(n_customers: int, n_stations: int, family: str, regime: str, seed: int) -> str:
    letter = FAMILY_LETTERS.get(family, family)
    return f"{n_customers}C{n_stations}S_{letter}_{regime}_seed{seed:05d}"


def outcome_name(outcome: GenerationOutcome) -> str:
    return instance_name(
        outcome.instance.n_customers,
        outcome.instance.n_stations,
        outcome.config.spatial.family,
        outcome.config.regime,
        outcome.seed,
    )


def generate_one(config: GeneratorConfig, seed: int) -> GenerationOutcome:
    """Run one full attempt: sample every attribute, then screen and verify.

    All floats are canonicalized to 12 significant digits before assembly,
    which makes the text serialization an exact inverse of parsing.
    """
    started = _time.monotonic()
    rng = np.random.default_rng(seed)
    n = config.n_customers

    depot_point = place_depot(rng, config.spatial.depot_mode)
    points, spatial_diag = sample_customers(rng, n, config.spatial, depot_point)
    battery = adaptive_battery(points, config.consumption_rate, config.energy)
    max_range = battery / config.consumption_rate
    station_nodes_raw, station_diag = build_infrastructure(
        depot_point, points, config.stations, max_range, rng, first_id=n + 1
    )
    demands = sample_demands(n, config.capacity, rng)
    services = sample_service_times(n, config.service, rng)
    windows = assign_time_windows(
        n, config.horizon, config.effective_width_fraction,
        rng, config.randomized_window_starts,
    )

    depot = Node(0, DEPOT, Point(round_sig(depot_point.x), round_sig(depot_point.y)))
    customers = tuple(
        Customer(
            node=Node(i + 1, CUSTOMER, Point(round_sig(points[i].x), round_sig(points[i].y))),
            demand=round_sig(demands[i]),
            service=round_sig(services[i]),
            ready=round_sig(windows[i][0]),
            due=round_sig(windows[i][1]),
        )
        for i in range(n)
    )
    stations = tuple(
        Node(s.id, s.kind, Point(round_sig(s.position.x), round_sig(s.position.y)))
        for s in station_nodes_raw
    )
    vehicle = VehicleConfig(
        capacity=round_sig(config.capacity),
        battery=round_sig(battery),
        consumption_rate=round_sig(config.consumption_rate),
        charge_rate=round_sig(config.charge_rate),
    )
    temporal = TemporalConfig(
        horizon=round_sig(config.horizon),
        width_fraction=config.effective_width_fraction,
    )
    instance = Instance(
        depot=depot,
        customers=customers,
        stations=stations,
        vehicle=vehicle,
        temporal=temporal,
        provenance=Provenance(seed=seed, config=config.to_dict()),
    )
    validate_instance(instance)

    diagnostics = {
        "forced_acceptances": spatial_diag.forced_acceptances,
        "station_separation_relaxations": station_diag.separation_relaxations,
        "station_truncated": station_diag.truncated,
        "station_top_ups": station_diag.top_ups,
    }

    report = screen(instance)
    verification: Optional[VerificationResult] = None
    skip_reason: Optional[str] = None
    if not report.passed:
        status = REJECTED_STAGE1
        skip_reason = "stage1_failed"
    elif n <= STAGE2_MAX_CUSTOMERS:
        verification = verify(instance, config.search)
        if verification.status == STATUS_FEASIBLE:
            status = ACCEPTED
        elif verification.status == STATUS_INFEASIBLE:
            status = REJECTED_STAGE2
        else:
            status = UNKNOWN_STAGE2
    else:
        status = ACCEPTED
        skip_reason = "instance_size_above_stage2_limit"

    elapsed = _time.monotonic() - started
    return GenerationOutcome(
        status=status,
        instance=instance,
        screening=report,
        verification=verification,
        verification_skip_reason=skip_reason,
        seed=seed,
        elapsed=elapsed,
        config=config,
        diagnostics=diagnostics,
    )


@dataclass
class BatchStats:
    """Commutative counters over one batch of attempts."""

    attempted: int = 0
    accepted: int = 0
    rejected_stage1: int = 0
    rejected_stage2: int = 0
    unknown_stage2: int = 0
    underflow: bool = False
    violation_histogram: dict[str, int] = field(default_factory=dict)
    timing_samples: list[tuple[int, float, str]] = field(default_factory=list)

    def record(self, outcome: GenerationOutcome) -> None:
        self.attempted += 1
        if outcome.status == ACCEPTED:
            self.accepted += 1
        elif outcome.status == REJECTED_STAGE1:
            self.rejected_stage1 += 1
        elif outcome.status == REJECTED_STAGE2:
            self.rejected_stage2 += 1
        else:
            self.unknown_stage2 += 1
        for violation in outcome.screening.violations:
            key = violation.condition
            self.violation_histogram[key] = self.violation_histogram.get(key, 0) + 1
        self.timing_samples.append((outcome.instance.n_customers, outcome.elapsed, outcome.status))

    def merge(self, other: "BatchStats") -> None:
        self.attempted += other.attempted
        self.accepted += other.accepted
        self.rejected_stage1 += other.rejected_stage1
        self.rejected_stage2 += other.rejected_stage2
        self.unknown_stage2 += other.unknown_stage2
        self.underflow = self.underflow or other.underflow
        for key, count in other.violation_histogram.items():
            self.violation_histogram[key] = self.violation_histogram.get(key, 0) + count
        self.timing_samples.extend(other.timing_samples)

    @property
    def gamma(self) -> float:
        return acceptance_rate(self)

    def to_dict(self) -> dict:
        return {
            "attempted": self.attempted,
            "accepted": self.accepted,
            "rejected_stage1": self.rejected_stage1,
            "rejected_stage2": self.rejected_stage2,
            "unknown_stage2": self.unknown_stage2,
            "underflow": self.underflow,
            "acceptance_rate": acceptance_rate(self) if self.attempted else None,
            "violation_histogram": dict(sorted(self.violation_histogram.items())),
        }


def acceptance_rate(stats: BatchStats) -> float:
    """Accepted fraction of all attempts."""
    if stats.attempted < 1:
        raise ValueError("acceptance rate is undefined before any attempt")
    return stats.accepted / stats.attempted


def timing_profile(stats: BatchStats) -> dict[int, float]:
    """Mean wall-clock seconds per accepted instance, grouped by size.

    Time spent on rejected attempts is charged to the accepted instances
    of the same size, since producing one accepted instance costs the
    whole rejection overhead around it.
    """
    if not stats.timing_samples:
        raise ValueError("no timing samples recorded")
    totals: dict[int, float] = {}
    accepted: dict[int, int] = {}
    for n, elapsed, status in stats.timing_samples:
        totals[n] = totals.get(n, 0.0) + elapsed
        if status == ACCEPTED:
            accepted[n] = accepted.get(n, 0) + 1
    profile: dict[int, float] = {}
    for n, total in sorted(totals.items()):
        if accepted.get(n):
            profile[n] = total / accepted[n]
    if not profile:
        raise ValueError("no accepted instances to profile")
    return profile


def generate_batch(
    config: GeneratorConfig,
    target_accepted: int,
    base_seed: int = 0,
    on_outcome: Optional[Callable[[GenerationOutcome], None]] = None,
) -> tuple[list[GenerationOutcome], BatchStats]:
    """Attempt seeds base_seed, base_seed+1, ... until the target is met.

    Returns the accepted outcomes in order of acceptance plus the full
    batch statistics. The attempt budget is BATCH_ATTEMPT_FACTOR times the
    target; exhausting it sets the underflow flag on the stats and returns
    the partial batch.
    """
    if target_accepted < 1:
        raise ValueError("target_accepted must be at least 1")
    stats = BatchStats()
    accepted: list[GenerationOutcome] = []
    max_attempts = BATCH_ATTEMPT_FACTOR * target_accepted
    for k in range(max_attempts):
        outcome = generate_one(config, base_seed + k)
        stats.record(outcome)
        if on_outcome is not None:
            on_outcome(outcome)
        if outcome.accepted:
            accepted.append(outcome)
            if len(accepted) >= target_accepted:
                break
    else:
        stats.underflow = True
    return accepted, stats
