"""Parametric generator, screener, exact verifier, and baseline solver for
electric-vehicle routing instances with time windows.

Instances live in the unit square with unit-speed travel: a single depot,
customers with demands, service times, and staggered time windows, and
charging stations placed by range-aware rules. Generation is a pipeline of
seeded sampling, linear-time necessary-condition screening, and (for small
instances) exact branch-and-bound verification.
"""

__version__ = "0.1.0"

from .attributes import (
    ENERGY_ADAPTIVE,
    ENERGY_FIXED,
    EnergyConfig,
    REGIME_WIDTH_FRACTIONS,
    ServiceConfig,
    adaptive_battery,
    assign_time_windows,
    sample_demands,
    sample_service_times,
)
from .bench import (
    BenchCell,
    BenchReport,
    DEFAULT_FAMILIES,
    DEFAULT_REGIMES,
    DEFAULT_SIZE_TABLE,
    default_station_count,
    make_cell_config,
    matrix_csv,
    report_csv,
    run_bench,
    run_cell,
)
from .instance_io import (
    ParseError,
    build_metadata,
    load_instance,
    load_metadata,
    metadata_json,
    parse_instance_text,
    persist_outcome,
    stable_metadata_json,
    validate_metadata,
    write_instance_text,
)
from .model import (
    Customer,
    Instance,
    InstanceError,
    Node,
    Point,
    Provenance,
    TOL,
    TemporalConfig,
    VehicleConfig,
    euclidean_distance,
    round_sig,
    travel_time,
    validate_instance,
)
from .pipeline import (
    BatchStats,
    GenerationOutcome,
    GeneratorConfig,
    STAGE2_MAX_CUSTOMERS,
    acceptance_rate,
    generate_batch,
    generate_one,
    instance_name,
    outcome_name,
    timing_profile,
)
from .screening import (
    DEPOT_RETURN,
    ENERGY_REACHABILITY,
    STATION_ACCESSIBILITY,
    ScreeningReport,
    Violation,
    check_depot_return,
    check_energy_reachability,
    check_station_accessibility,
    screen,
)
from .solver import (
    InvalidSolutionError,
    Solution,
    SolutionMetrics,
    SolverFailure,
    SolverParams,
    construct_initial,
    evaluate_solution,
    solve,
)
from .spatial import (
    FAMILIES,
    FAMILY_CLUSTERED,
    FAMILY_MIXED,
    FAMILY_RANDOM,
    SpatialConfig,
    place_depot,
    sample_customers,
)
from .stations import (
    StationConfig,
    build_infrastructure,
    candidate_depot_ray_stations,
    candidate_midpoint_stations,
    filter_stations,
    select_station_subset,
    top_up_stations,
)
from .verify import (
    RouteTrace,
    RouteViolation,
    STATUS_FEASIBLE,
    STATUS_INFEASIBLE,
    STATUS_UNKNOWN,
    SearchLimits,
    VerificationResult,
    bruteforce_oracle,
    default_max_vehicles,
    simulate_route,
    verify,
)

__all__ = [
    "__version__",
    "BatchStats", "BenchCell", "BenchReport", "Customer",
    "DEFAULT_FAMILIES", "DEFAULT_REGIMES", "DEFAULT_SIZE_TABLE",
    "DEPOT_RETURN", "ENERGY_ADAPTIVE", "ENERGY_FIXED", "ENERGY_REACHABILITY",
    "EnergyConfig", "FAMILIES", "FAMILY_CLUSTERED", "FAMILY_MIXED",
    "FAMILY_RANDOM", "GenerationOutcome", "GeneratorConfig", "Instance",
    "InstanceError", "InvalidSolutionError", "Node", "ParseError", "Point",
    "Provenance", "REGIME_WIDTH_FRACTIONS", "RouteTrace", "RouteViolation",
    "STAGE2_MAX_CUSTOMERS", "STATION_ACCESSIBILITY", "STATUS_FEASIBLE",
    "STATUS_INFEASIBLE", "STATUS_UNKNOWN", "ScreeningReport", "SearchLimits",
    "ServiceConfig", "Solution", "SolutionMetrics", "SolverFailure",
    "SolverParams", "SpatialConfig", "StationConfig", "TOL", "TemporalConfig",
    "VehicleConfig", "VerificationResult", "Violation",
    "acceptance_rate", "adaptive_battery", "assign_time_windows",
    "bruteforce_oracle", "build_infrastructure", "build_metadata",
    "candidate_depot_ray_stations", "candidate_midpoint_stations",
    "check_depot_return", "check_energy_reachability",
    "check_station_accessibility", "construct_initial",
    "default_max_vehicles", "default_station_count", "euclidean_distance",
    "evaluate_solution", "filter_stations", "generate_batch", "generate_one", "select_station_subset",
    "instance_name", "load_instance", "load_metadata", "make_cell_config",
    "matrix_csv", "metadata_json", "outcome_name", "parse_instance_text",
    "persist_outcome", "place_depot", "report_csv", "round_sig", "run_bench",
    "run_cell", "sample_customers", "sample_demands", "sample_service_times",
    "screen", "simulate_route", "solve", "stable_metadata_json",
    "timing_profile", "top_up_stations", "travel_time", "validate_instance",
    "validate_metadata", "verify", "write_instance_text",
]
