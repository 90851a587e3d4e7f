"""Text format, metadata schema, and the on-disk layout."""

from __future__ import annotations

import json

import pytest

from evrptwgen import (
    GeneratorConfig,
    ParseError,
    SpatialConfig,
    StationConfig,
    generate_one,
    load_instance,
    load_metadata,
    parse_instance_text,
    persist_outcome,
    write_instance_text,
)
from evrptwgen.instance_io import (
    build_metadata,
    format_float,
    metadata_json,
    stable_metadata_json,
    validate_metadata,
)

from conftest import build_instance

CFG = GeneratorConfig(
    n_customers=10,
    spatial=SpatialConfig(family="clustered"),
    stations=StationConfig(target_count=3),
)


def small_instance():
    return build_instance(
        depot_xy=(0.5, 0.5),
        customer_rows=[(0.6, 0.5, 0.2, 0.02, 0.1, 1.1)],
        station_xys=[(0.4, 0.5)],
        capacity=1.5,
        battery=0.1,
        rate=0.25,
        charge_rate=1.0,
        horizon=2.0,
    )


class TestFormatFloat:
    def test_basic(self):
        assert format_float(0.0) == "0.0"
        assert format_float(2.0) == "2.0"
        assert format_float(0.5) == "0.5"
        assert format_float(1.5) == "1.5"

    def test_twelve_significant_digits(self):
        assert format_float(0.123456789012345) == "0.123456789012"

    def test_exponent_expanded(self):
        assert format_float(1e-7) == "0.0000001"
        assert "e" not in format_float(1.234e-5)

    def test_non_finite_rejected(self):
        with pytest.raises(ValueError):
            format_float(float("nan"))
        with pytest.raises(ValueError):
            format_float(float("inf"))


class TestWriteText:
    def test_frozen_layout(self):
        text = write_instance_text(small_instance())
        lines = text.splitlines()
        assert lines[0] == "StringID Type x y demand ReadyTime DueDate ServiceTime"
        assert lines[1] == "D0 d 0.5 0.5 0.0 0.0 2.0 0.0"
        assert lines[2] == "C1 c 0.6 0.5 0.2 0.1 1.1 0.02"
        assert lines[3] == "S2 f 0.4 0.5 0.0 0.0 2.0 0.0"
        assert lines[4] == ""
        assert lines[5] == "Q Vehicle load capacity /1.5/"
        assert lines[6] == "B Battery capacity /0.1/"
        assert lines[7] == "r energy consumption rate /0.25/"
        assert lines[8] == "g recharging rate /1.0/"
        assert lines[9] == "H planning horizon /2.0/"
        assert text.endswith("\n")

    def test_station_rows_carry_horizon_due(self):
        text = write_instance_text(small_instance())
        station_row = [l for l in text.splitlines() if l.split()[1:2] == ["f"]][0]
        assert station_row.split()[6] == "2.0"


class TestRoundtrip:
    def test_hand_instance_field_exact(self):
        inst = small_instance()
        back = parse_instance_text(write_instance_text(inst))
        assert back == inst

    @pytest.mark.parametrize("seed", [0, 3, 11, 42])
    def test_generated_instances_field_exact(self, seed):
        inst = generate_one(CFG, seed).instance
        back = parse_instance_text(write_instance_text(inst))
        # Dataclass equality covers every field of every node; provenance
        # is compare-excluded by design (the text format does not carry it).
        assert back == inst
        # And the text itself is a fixed point.
        assert write_instance_text(back) == write_instance_text(inst)


class TestParseErrors:
    def good_text(self) -> str:
        return write_instance_text(small_instance())

    def test_bad_header(self):
        with pytest.raises(ParseError) as err:
            parse_instance_text("nope\n")
        assert err.value.line_number == 1

    def test_wrong_column_count(self):
        lines = self.good_text().splitlines()
        lines[2] = "C1 c 0.6 0.5"
        with pytest.raises(ParseError) as err:
            parse_instance_text("\n".join(lines) + "\n")
        assert err.value.line_number == 3

    def test_non_numeric_field(self):
        lines = self.good_text().splitlines()
        lines[2] = lines[2].replace("0.2", "abc")
        with pytest.raises(ParseError) as err:
            parse_instance_text("\n".join(lines) + "\n")
        assert err.value.line_number == 3
        assert "abc" in str(err.value)

    def test_out_of_square_coordinate(self):
        lines = self.good_text().splitlines()
        lines[2] = "C1 c 1.6 0.5 0.2 0.1 1.1 0.02"
        with pytest.raises(ParseError) as err:
            parse_instance_text("\n".join(lines) + "\n")
        assert err.value.line_number == 3

    def test_customer_id_gap(self):
        lines = self.good_text().splitlines()
        lines[2] = "C2 c 0.6 0.5 0.2 0.1 1.1 0.02"
        with pytest.raises(ParseError) as err:
            parse_instance_text("\n".join(lines) + "\n")
        assert "C1" in str(err.value)

    def test_duplicate_depot(self):
        lines = self.good_text().splitlines()
        lines.insert(2, "D0 d 0.4 0.4 0.0 0.0 2.0 0.0")
        with pytest.raises(ParseError) as err:
            parse_instance_text("\n".join(lines) + "\n")
        assert "second depot" in str(err.value)

    def test_missing_parameter_block(self):
        lines = self.good_text().splitlines()[:4]
        with pytest.raises(ParseError):
            parse_instance_text("\n".join(lines) + "\n")

    def test_unslashed_parameter(self):
        lines = self.good_text().splitlines()
        lines[5] = "Q Vehicle load capacity 1.5"
        with pytest.raises(ParseError) as err:
            parse_instance_text("\n".join(lines) + "\n")
        assert err.value.line_number == 6

    def test_trailing_garbage(self):
        text = self.good_text() + "extra stuff\n"
        with pytest.raises(ParseError) as err:
            parse_instance_text(text)
        assert "trailing" in str(err.value)

    def test_unknown_node_type(self):
        lines = self.good_text().splitlines()
        lines[2] = "C1 z 0.6 0.5 0.2 0.1 1.1 0.02"
        with pytest.raises(ParseError) as err:
            parse_instance_text("\n".join(lines) + "\n")
        assert "unknown node type" in str(err.value)


class TestMetadata:
    def test_schema_valid_for_accept_and_reject(self):
        cfg_reject = GeneratorConfig(
            n_customers=5,
            spatial=SpatialConfig(family="random"),
            stations=StationConfig(target_count=0),
        )
        for outcome in (generate_one(CFG, 0), generate_one(cfg_reject, 0)):
            record = build_metadata(outcome)
            validate_metadata(record)
            parsed = json.loads(metadata_json(record))
            assert parsed == record

    def test_stable_json_drops_wall_clock_only(self):
        outcome = generate_one(CFG, 1)
        a = build_metadata(outcome)
        again = build_metadata(generate_one(CFG, 1))
        assert stable_metadata_json(a) == stable_metadata_json(again)
        # The full record still carries timing for humans.
        assert "timing" in a

    def test_validation_rejects_broken_record(self):
        record = build_metadata(generate_one(CFG, 0))
        record["status"] = "maybe"
        with pytest.raises(Exception):
            validate_metadata(record)


class TestPersist:
    def test_accepted_layout(self, tmp_path):
        outcome = None
        for seed in range(120):
            candidate = generate_one(CFG, seed)
            if candidate.accepted:
                outcome = candidate
                break
        assert outcome is not None
        paths = persist_outcome(outcome, tmp_path)
        assert paths.text_path.parent.name == "feasible"
        assert paths.text_path.name == f"{paths.name}.txt"
        assert paths.metadata_path.name == f"{paths.name}.meta.json"
        assert load_instance(paths.text_path) == outcome.instance
        record = load_metadata(paths.metadata_path)
        assert record["name"] == paths.name
        assert record["status"] == "feasible"

    def test_reject_layout_and_suppression(self, tmp_path):
        cfg = GeneratorConfig(
            n_customers=5,
            spatial=SpatialConfig(family="random"),
            stations=StationConfig(target_count=0),
        )
        outcome = generate_one(cfg, 0)
        assert not outcome.accepted
        paths = persist_outcome(outcome, tmp_path)
        assert paths.text_path.parent.name == "infeasible"
        assert persist_outcome(outcome, tmp_path / "other", persist_rejects=False) is None
        assert not (tmp_path / "other").exists()

    def test_collision_suffix(self, tmp_path):
        outcome = generate_one(CFG, 3)
        first = persist_outcome(outcome, tmp_path)
        second = persist_outcome(outcome, tmp_path)
        third = persist_outcome(outcome, tmp_path)
        assert second.name == f"{first.name}_1"
        assert third.name == f"{first.name}_2"
        assert second.text_path.exists() and third.metadata_path.exists()
        # Metadata inside the file carries the resolved name.
        assert load_metadata(second.metadata_path)["name"] == second.name
