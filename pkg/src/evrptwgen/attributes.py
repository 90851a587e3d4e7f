"""Demands, service durations, adaptive battery sizing, and time windows."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .model import Point, TOL, euclidean_distance

ENERGY_FIXED = "fixed"
ENERGY_ADAPTIVE = "adaptive"

# Named window regimes and their width fractions of the horizon.
REGIME_WIDTH_FRACTIONS = {"wide": 0.8, "medium": 0.4, "tight": 0.2}

DEMAND_LOWER_FRACTION = 0.02
DEMAND_UPPER_FRACTION = 0.30
DEMAND_TOTAL_CAP_FRACTION = 3.0

# Window starts are staggered across the first 30% of the horizon.
WINDOW_STAGGER_SPAN = 0.3


@dataclass(frozen=True)
class EnergyConfig:
    """Battery sizing policy: a fixed capacity or range-adaptive scaling."""

    mode: str = ENERGY_ADAPTIVE
    fixed_battery: float = 0.0
    range_coefficient: float = 0.8
    range_min: float = 0.15
    range_max: float = 0.40

    def __post_init__(self) -> None:
        if self.mode not in (ENERGY_FIXED, ENERGY_ADAPTIVE):
            raise ValueError(f"unknown energy mode {self.mode!r}")
        if self.mode == ENERGY_FIXED and self.fixed_battery <= 0:
            raise ValueError("fixed mode requires a positive battery capacity")
        if not (0 < self.range_min <= self.range_max):
            raise ValueError("need 0 < range_min <= range_max")
        if self.range_coefficient <= 0:
            raise ValueError("range_coefficient must be positive")


@dataclass(frozen=True)
class ServiceConfig:
    """Uniform service-duration bounds."""

    minimum: float = 0.01
    maximum: float = 0.03

    def __post_init__(self) -> None:
        if not (0 <= self.minimum <= self.maximum):
            raise ValueError("need 0 <= minimum <= maximum")


def sample_demands(n: int, capacity: float, rng: np.random.Generator) -> list[float]:
    """Uniform demands in [0.02Q, 0.30Q], rescaled if the total exceeds 3Q.

    Rescaling multiplies every demand by the same factor, so ratios are
    preserved and the total lands exactly on 3Q.
    """
    if n < 1:
        raise ValueError("need at least one customer")
    if capacity <= 0:
        raise ValueError("capacity must be positive")
    raw = rng.uniform(DEMAND_LOWER_FRACTION * capacity, DEMAND_UPPER_FRACTION * capacity, size=n)
    total = float(raw.sum())
    cap = DEMAND_TOTAL_CAP_FRACTION * capacity
    if total > cap:
        raw = raw * (cap / total)
    return [float(q) for q in raw]


def sample_service_times(n: int, config: ServiceConfig, rng: np.random.Generator) -> list[float]:
    if n < 1:
        raise ValueError("need at least one customer")
    if config.minimum == config.maximum:
        return [config.minimum] * n
    return [float(s) for s in rng.uniform(config.minimum, config.maximum, size=n)]


def max_pairwise_distance(points: list[Point]) -> float:
    """Largest customer-to-customer distance; 0 for fewer than two points."""
    if len(points) < 2:
        return 0.0
    return max(euclidean_distance(a, b) for a, b in itertools.combinations(points, 2))


def adaptive_battery(customers: list[Point], consumption_rate: float, config: EnergyConfig) -> float:
    """Battery sized so the range tracks the customer spread, clamped to band.

    B = r * clamp(coefficient * d_max, range_min, range_max) where d_max is
    the maximum pairwise customer distance (0 for a single customer, which
    clamps to the lower bound).
    """
    if consumption_rate <= 0:
        raise ValueError("consumption_rate must be positive")
    if config.mode == ENERGY_FIXED:
        return config.fixed_battery
    target = config.range_coefficient * max_pairwise_distance(customers)
    return consumption_rate * max(config.range_min, min(config.range_max, target))


def assign_time_windows(
    n: int,
    horizon: float,
    width_fraction: float,
    rng: np.random.Generator | None = None,
    randomized_starts: bool = False,
) -> list[tuple[float, float]]:
    """Staggered windows of shared width W = width_fraction * horizon.

    Deterministic mode: e_i = (i/N) * 0.3H for i = 1..N; l_i = min(H, e+W);
    windows that would spill past the horizon are shifted back so every
    window has width exactly W. Randomized mode draws e ~ U(0, H-W) instead.
    """
    if n < 1:
        raise ValueError("need at least one customer")
    if horizon <= 0 or not (0 < width_fraction <= 1):
        raise ValueError("invalid horizon or width fraction")
    width = width_fraction * horizon
    windows: list[tuple[float, float]] = []
    if randomized_starts:
        if rng is None:
            raise ValueError("randomized starts require an rng")
        for _ in range(n):
            e = float(rng.uniform(0.0, horizon - width))
            windows.append((e, e + width))
        return windows
    for i in range(1, n + 1):
        e = (i / n) * WINDOW_STAGGER_SPAN * horizon
        late = min(horizon, e + width)
        if late >= horizon - TOL:
            e = horizon - width
            late = horizon
        windows.append((e, late))
    return windows
