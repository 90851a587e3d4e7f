"""Command-line interface: flags, exit codes, and file side effects."""

import json

import pytest
from click.testing import CliRunner

from evrptwgen.cli import main


@pytest.fixture()
def runner():
    return CliRunner()


def generate_args(out, **kw):
    args = [
        "generate",
        "--customers", str(kw.get("customers", 30)),
        "--family", kw.get("family", "R"),
        "--regime", kw.get("regime", "wide"),
        "--count", str(kw.get("count", 2)),
        "--seed", str(kw.get("seed", 0)),
        "--out", str(out),
    ]
    for flag in kw.get("extra", []):
        args.append(flag)
    return args


class TestGenerate:
    def test_happy_path_writes_files(self, runner, tmp_path):
        result = runner.invoke(main, generate_args(tmp_path / "data"))
        assert result.exit_code == 0, result.output
        assert "accepted 2/" in result.output
        feasible = sorted((tmp_path / "data" / "feasible").glob("*.txt"))
        assert len(feasible) == 2
        metas = sorted((tmp_path / "data" / "feasible").glob("*.meta.json"))
        assert len(metas) == 2
        record = json.loads(metas[0].read_text())
        assert record["outcome"] == "accepted"

    def test_count_zero_is_usage_error(self, runner, tmp_path):
        result = runner.invoke(main, generate_args(tmp_path, count=0))
        assert result.exit_code == 2
        assert "count" in result.output.lower()

    def test_underflow_exits_2(self, runner, tmp_path):
        # Zero stations make condition 3 fail on every attempt, so the
        # batch hits its attempt cap and must report a partial result.
        result = runner.invoke(
            main,
            generate_args(tmp_path / "d", customers=5, count=1,
                          extra=["--stations", "0", "--no-persist-rejects"]),
        )
        assert result.exit_code == 2
        assert "accepted 0/" in result.output
        assert "partial" in result.output

    def test_no_persist_rejects_suppresses_directory(self, runner, tmp_path):
        result = runner.invoke(
            main,
            generate_args(tmp_path / "d", extra=["--no-persist-rejects"]),
        )
        assert result.exit_code == 0, result.output
        assert not (tmp_path / "d" / "infeasible").exists()

    def test_identical_flags_identical_bytes(self, runner, tmp_path):
        first = runner.invoke(main, generate_args(tmp_path / "a", seed=11))
        second = runner.invoke(main, generate_args(tmp_path / "b", seed=11))
        assert first.exit_code == 0 and second.exit_code == 0
        files_a = sorted((tmp_path / "a" / "feasible").glob("*.txt"))
        files_b = sorted((tmp_path / "b" / "feasible").glob("*.txt"))
        assert [p.name for p in files_a] == [p.name for p in files_b]
        for pa, pb in zip(files_a, files_b):
            assert pa.read_bytes() == pb.read_bytes()


class TestBench:
    def test_single_cell_with_csv(self, runner, tmp_path):
        csv_path = tmp_path / "cells.csv"
        matrix_path = tmp_path / "matrix.csv"
        result = runner.invoke(main, [
            "bench", "--sizes", "30", "--families", "R", "--regimes", "wide",
            "--per-cell", "2", "--csv", str(csv_path),
            "--matrix-csv", str(matrix_path),
        ])
        assert result.exit_code == 0, result.output
        assert "acceptance matrix" in result.output
        assert csv_path.read_text().startswith("n_customers,")
        assert matrix_path.read_text().startswith("family,regime,")

    def test_unknown_family_is_usage_error(self, runner):
        result = runner.invoke(main, ["bench", "--families", "Z"])
        assert result.exit_code == 2
        assert "unknown family" in result.output

    def test_bad_sizes_token_is_usage_error(self, runner):
        result = runner.invoke(main, ["bench", "--sizes", "5,abc"])
        assert result.exit_code == 2
        assert "--sizes" in result.output


@pytest.fixture(scope="module")
def generated_tree(tmp_path_factory):
    """One persisted batch reused by the verify/solve command tests."""
    root = tmp_path_factory.mktemp("cli-instances")
    runner = CliRunner()
    result = runner.invoke(main, [
        "generate", "--customers", "5", "--family", "C", "--regime", "wide",
        "--count", "1", "--seed", "0", "--out", str(root),
    ])
    assert result.exit_code == 0, result.output
    return root


def first_with_outcome(root, folder, outcome):
    for meta in sorted((root / folder).glob("*.meta.json")):
        record = json.loads(meta.read_text())
        if record["outcome"] == outcome:
            return meta.with_name(meta.name.replace(".meta.json", ".txt"))
    raise AssertionError(f"no {outcome} instance persisted under {folder}/")


class TestVerify:
    def test_feasible_instance_reports_witness(self, runner, generated_tree):
        path = first_with_outcome(generated_tree, "feasible", "accepted")
        result = runner.invoke(main, ["verify", str(path)])
        assert result.exit_code == 0, result.output
        assert "stage 1: passed" in result.output
        assert "stage 2: feasible" in result.output
        assert "route:" in result.output

    def test_stage1_reject_reports_conditions(self, runner, generated_tree):
        path = first_with_outcome(generated_tree, "infeasible", "rejected_stage1")
        result = runner.invoke(main, ["verify", str(path)])
        assert result.exit_code == 0, result.output
        assert "violation(s)" in result.output
        assert "customer" in result.output

    def test_large_instance_skips_stage2(self, runner, tmp_path):
        gen = runner.invoke(main, generate_args(tmp_path / "d", customers=30, count=1))
        assert gen.exit_code == 0, gen.output
        path = next((tmp_path / "d" / "feasible").glob("*.txt"))
        result = runner.invoke(main, ["verify", str(path)])
        assert result.exit_code == 0, result.output
        assert "stage 2: skipped" in result.output

    def test_missing_file_is_usage_error(self, runner):
        result = runner.invoke(main, ["verify", "no-such-file.txt"])
        assert result.exit_code == 2


class TestSolve:
    def test_feasible_instance_prints_metrics(self, runner, generated_tree):
        path = first_with_outcome(generated_tree, "feasible", "accepted")
        result = runner.invoke(main, ["solve", str(path)])
        assert result.exit_code == 0, result.output
        assert "distance" in result.output and "vehicles" in result.output
        assert "route 0:" in result.output

    def test_infeasible_instance_fails_loudly(self, runner, generated_tree):
        path = first_with_outcome(generated_tree, "infeasible", "rejected_stage2")
        result = runner.invoke(main, ["solve", str(path)])
        assert result.exit_code == 1
        assert "solver failed" in result.output
