"""Tests for run directories, CSV tables and run records."""

from fractions import Fraction

import pytest

from src.app.core.exceptions import RunError
from src.app.experiments.records import (
    load_record,
    read_table,
    read_tables,
    run_directory,
    to_frame,
    write_record,
    write_table,
)
from src.app.schemas.experiment import RunRecord, VerdictRecord


@pytest.fixture
def record(run_label):
    return RunRecord(
        experiment="smb",
        name=run_label,
        config_hash="ab" * 32,
        seed=3,
        arithmetic="exact",
        verdicts=[VerdictRecord(name="smb:coin", passed=True)],
    )


class TestTables:
    def test_cells_are_strings(self):
        frame = to_frame(
            [{"mass": Fraction(1, 3), "fits": True, "bound": 0.25, "entropy": None, "n": 4}],
            ("mass", "fits", "bound", "entropy", "n"),
        )
        assert frame.iloc[0].tolist() == ["1/3", "true", "0.25", "", "4"]

    def test_missing_columns_are_blank(self):
        frame = to_frame([{"n": 1}], ("n", "extra"))
        assert frame.iloc[0]["extra"] == ""

    def test_round_trip_keeps_exact_values(self, results_dir):
        rows = [{"n": 8, "mass": Fraction(5, 16)}, {"n": 12, "mass": Fraction(1, 4096)}]
        path = write_table(results_dir / "run", "ball", rows, ("n", "mass"))
        frame = read_table(path)
        assert frame["mass"].tolist() == ["5/16", "1/4096"]
        assert frame["n"].tolist() == ["8", "12"]

    def test_empty_strings_survive(self, results_dir):
        path = write_table(results_dir, "blank", [{"n": 1, "entropy": None}], ("n", "entropy"))
        assert read_table(path)["entropy"].tolist() == [""]


class TestRecords:
    def test_run_directory_uses_hash_prefix(self, results_dir):
        directory = run_directory(str(results_dir), "smb", "0123456789abcdef")
        assert directory == results_dir / "smb-0123456789ab"

    def test_round_trip(self, results_dir, record):
        write_record(results_dir, record)
        loaded = load_record(results_dir)
        assert loaded.run_id == record.run_id
        assert loaded.name == record.name
        assert loaded.passed

    def test_missing_record(self, results_dir):
        with pytest.raises(RunError):
            load_record(results_dir / "nowhere")

    def test_missing_artifact(self, results_dir, record):
        record.artifacts["smb"] = "smb.csv"
        with pytest.raises(RunError):
            read_tables(results_dir, record)

    def test_ungated_failures_do_not_fail_the_run(self, record):
        record.verdicts.append(VerdictRecord(name="window-fit", passed=False, gated=False))
        assert record.passed
        record.verdicts.append(VerdictRecord(name="size-rule", passed=False))
        assert not record.passed
