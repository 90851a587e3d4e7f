"""End-to-end attempt pipeline: determinism, gating, batch accounting."""

from __future__ import annotations

import pytest

from evrptwgen import (
    GeneratorConfig,
    STAGE2_MAX_CUSTOMERS,
    SpatialConfig,
    StationConfig,
    acceptance_rate,
    generate_batch,
    generate_one,
    instance_name,
    outcome_name,
    stable_metadata_json,
    timing_profile,
    write_instance_text,
)
from evrptwgen.instance_io import build_metadata
from evrptwgen.pipeline import (
    ACCEPTED,
    BATCH_ATTEMPT_FACTOR,
    BatchStats,
    REJECTED_STAGE1,
    REJECTED_STAGE2,
    UNKNOWN_STAGE2,
)

CLUSTERED_10 = GeneratorConfig(
    n_customers=10,
    spatial=SpatialConfig(family="clustered"),
    stations=StationConfig(target_count=3),
)


def test_generate_one_byte_identical_across_runs():
    for seed in (0, 7, 123):
        a = generate_one(CLUSTERED_10, seed)
        b = generate_one(CLUSTERED_10, seed)
        assert write_instance_text(a.instance) == write_instance_text(b.instance)
        assert a.status == b.status
        assert stable_metadata_json(build_metadata(a)) == stable_metadata_json(build_metadata(b))


def test_generate_one_seed_changes_instance():
    a = generate_one(CLUSTERED_10, 1)
    b = generate_one(CLUSTERED_10, 2)
    assert write_instance_text(a.instance) != write_instance_text(b.instance)


def test_stage1_rejection_skips_verification():
    # No stations at all: station accessibility fails for every customer,
    # so stage 2 must never run.
    cfg = GeneratorConfig(
        n_customers=5,
        spatial=SpatialConfig(family="random"),
        stations=StationConfig(target_count=0),
    )
    outcome = generate_one(cfg, 0)
    assert outcome.status == REJECTED_STAGE1
    assert outcome.verification is None
    assert outcome.verification_skip_reason == "stage1_failed"
    assert not outcome.screening.passed
    assert outcome.feasibility_status == "infeasible"


def test_large_instances_skip_stage2():
    cfg = GeneratorConfig(
        n_customers=STAGE2_MAX_CUSTOMERS + 10,
        spatial=SpatialConfig(family="clustered"),
        stations=StationConfig(target_count=4),
    )
    # Find a screening survivor; it must be accepted without verification.
    for seed in range(200):
        outcome = generate_one(cfg, seed)
        if outcome.screening.passed:
            assert outcome.status == ACCEPTED
            assert outcome.verification is None
            assert outcome.verification_skip_reason == "instance_size_above_stage2_limit"
            assert outcome.feasibility_status == "feasible"
            return
    pytest.fail("no screening survivor in 200 seeds")


def test_small_instances_get_verified():
    outcome = None
    for seed in range(200):
        candidate = generate_one(CLUSTERED_10, seed)
        if candidate.status == ACCEPTED:
            outcome = candidate
            break
    assert outcome is not None
    assert outcome.verification is not None
    assert outcome.verification.status == "feasible"
    assert outcome.verification.witness != ()


def test_batch_conservation_and_determinism():
    accepted, stats = generate_batch(CLUSTERED_10, target_accepted=3, base_seed=0)
    assert (
        stats.attempted
        == stats.accepted + stats.rejected_stage1 + stats.rejected_stage2 + stats.unknown_stage2
    )
    assert stats.accepted == len(accepted) == 3
    assert not stats.underflow
    # Replay is exact.
    accepted2, stats2 = generate_batch(CLUSTERED_10, target_accepted=3, base_seed=0)
    assert stats2.to_dict() == stats.to_dict()
    assert [write_instance_text(o.instance) for o in accepted] == [
        write_instance_text(o.instance) for o in accepted2
    ]


def test_batch_seeds_are_sequential():
    accepted, stats = generate_batch(CLUSTERED_10, target_accepted=2, base_seed=50)
    assert all(o.seed >= 50 for o in accepted)
    assert stats.attempted == max(o.seed for o in accepted) - 50 + 1


def test_batch_underflow_flag():
    # Station-free configuration never passes screening; the attempt cap
    # is BATCH_ATTEMPT_FACTOR * target.
    cfg = GeneratorConfig(
        n_customers=5,
        spatial=SpatialConfig(family="random"),
        stations=StationConfig(target_count=0),
    )
    accepted, stats = generate_batch(cfg, target_accepted=1, base_seed=0)
    assert accepted == []
    assert stats.underflow
    assert stats.attempted == BATCH_ATTEMPT_FACTOR
    assert stats.accepted == 0


def test_batch_on_outcome_callback_sees_everything():
    seen: list[str] = []
    generate_batch(CLUSTERED_10, target_accepted=2, base_seed=0, on_outcome=lambda o: seen.append(o.status))
    assert seen.count(ACCEPTED) == 2
    assert len(seen) >= 2


def test_violation_histogram_counts_conditions():
    cfg = GeneratorConfig(
        n_customers=5,
        spatial=SpatialConfig(family="random"),
        stations=StationConfig(target_count=0),
    )
    _, stats = generate_batch(cfg, target_accepted=1, base_seed=0)
    assert stats.violation_histogram.get("station_accessibility", 0) > 0


def test_acceptance_rate_and_guard():
    stats = BatchStats()
    with pytest.raises(ValueError):
        acceptance_rate(stats)
    _, stats = generate_batch(CLUSTERED_10, target_accepted=2, base_seed=0)
    rate = acceptance_rate(stats)
    assert rate == stats.accepted / stats.attempted
    assert 0.0 < rate <= 1.0
    assert stats.gamma == rate


def test_timing_profile_groups_by_size():
    _, stats = generate_batch(CLUSTERED_10, target_accepted=2, base_seed=0)
    profile = timing_profile(stats)
    assert set(profile) == {10}
    assert profile[10] > 0.0
    with pytest.raises(ValueError):
        timing_profile(BatchStats())


def test_instance_name_format():
    assert instance_name(10, 3, "clustered", "tight", 42) == "10C3S_C_tight_seed00042"
    assert instance_name(100, 12, "random", "wide", 0) == "100C12S_R_wide_seed00000"
    assert instance_name(50, 6, "mixed", "medium", 99999) == "50C6S_RC_medium_seed99999"


def test_outcome_name_uses_config_and_seed():
    outcome = generate_one(CLUSTERED_10, 7)
    assert outcome_name(outcome) == "10C3S_C_medium_seed00007"


def test_config_to_dict_records_reproduction_fields():
    d = CLUSTERED_10.to_dict()
    assert d["n_customers"] == 10
    assert d["spatial"]["family"] == "clustered"
    assert d["stations"]["target_count"] == 3
    assert d["regime"] == "medium"
    assert d["capacity"] == 1.5
    assert d["consumption_rate"] == 0.25
    assert d["charge_rate"] == 1.0
    assert d["horizon"] == 2.0


def test_width_fraction_override():
    cfg = GeneratorConfig(n_customers=4, regime="tight", width_fraction=0.55)
    assert cfg.effective_width_fraction == 0.55
    cfg = GeneratorConfig(n_customers=4, regime="tight")
    assert cfg.effective_width_fraction == 0.2


def test_unknown_regime_rejected():
    with pytest.raises(ValueError):
        GeneratorConfig(n_customers=4, regime="narrow")
