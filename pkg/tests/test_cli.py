"""Command-line surface: records, round-trips, sweeps, exit codes."""

import csv
import io
import json

import pytest

from conic_walks.cli import (
    CSV_HEADER,
    EXIT_OK,
    EXIT_USAGE,
    EXIT_VERIFY,
    OutputRecord,
    main,
)


def run_cli(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


class TestExact:
    def test_wendel(self):
        code, text = run_cli("exact", "--functional", "wendel", "--n", "4", "--d", "3")
        assert code == EXIT_OK
        rec = json.loads(text.strip())
        assert rec["exact"] == {"num": "7", "den": "8", "approx": 0.875}
        assert rec["status"] == "ok"

    def test_face_count_example(self):
        code, text = run_cli("exact", "--model", "A", "--functional", "fk",
                             "--n", "4", "--d", "2", "--k", "1")
        assert code == EXIT_OK
        rec = json.loads(text.strip())
        assert rec["exact"]["num"] == "11" and rec["exact"]["den"] == "6"

    def test_intrinsic_volume_sweep(self):
        code, text = run_cli("exact", "--model", "B", "--functional", "vk",
                             "--n", "2", "--d", "2", "--k", "0..2")
        assert code == EXIT_OK
        rows = [json.loads(line) for line in text.strip().splitlines()]
        got = [(r["exact"]["num"], r["exact"]["den"]) for r in rows]
        assert got == [("3", "8"), ("1", "2"), ("1", "8")]

    def test_sweep_with_symbolic_bound(self):
        code, text = run_cli("exact", "--model", "B", "--functional", "vk",
                             "--n", "3", "--d", "2", "--k", "0..d")
        assert code == EXIT_OK
        assert len(text.strip().splitlines()) == 3

    def test_shorthand_functional(self):
        code, text = run_cli("exact", "--model", "A", "--functional", "f1",
                             "--n", "4", "--d", "2")
        assert code == EXIT_OK
        assert json.loads(text.strip())["exact"]["num"] == "11"

    def test_csv_format_and_round_trip(self):
        code, text = run_cli("exact", "--model", "B", "--functional", "vk",
                             "--n", "2", "--d", "2", "--k", "0..2", "--format", "csv")
        assert code == EXIT_OK
        rows = list(csv.reader(io.StringIO(text)))
        assert tuple(rows[0]) == CSV_HEADER
        rec = OutputRecord.from_csv_row(rows[1])
        assert rec.exact["num"] == "3" and rec.exact["den"] == "8"
        assert rec.query["functional"] == "vk" and rec.query["k"] == 0

    def test_json_round_trip(self):
        code, text = run_cli("exact", "--model", "B", "--functional", "face_prob",
                             "--n", "3", "--d", "2", "--indices", "1")
        rec = OutputRecord.from_json_line(text.strip())
        assert rec.to_json_line() == text.strip()
        assert rec.query["indices"] == [1]

    def test_joint_absorption(self):
        code, text = run_cli("exact", "--functional", "joint_absorption",
                             "--walks", "1", "--bridges", "2", "--d", "1")
        assert code == EXIT_OK
        rec = json.loads(text.strip())
        assert rec["exact"]["num"] == "1" and rec["exact"]["den"] == "2"

    def test_dual_flag(self):
        code, text = run_cli("exact", "--model", "A", "--functional", "Y",
                             "--n", "3", "--d", "2", "--m", "2", "--l", "0", "--dual")
        assert code == EXIT_OK
        rec = json.loads(text.strip())
        assert rec["query"]["functional"] == "Y_dual"
        assert rec["exact"]["num"] == "1" and rec["exact"]["den"] == "2"

    def test_violated_hypothesis_exits_usage(self):
        code, _ = run_cli("exact", "--model", "A", "--functional", "Y",
                          "--n", "4", "--d", "2", "--m", "2", "--l", "0")
        assert code == EXIT_USAGE

    def test_missing_model_exits_usage(self):
        code, _ = run_cli("exact", "--functional", "fk", "--k", "1")
        assert code == EXIT_USAGE

    def test_unknown_flag_exits_usage(self):
        code, _ = run_cli("exact", "--functional", "wendel", "--n", "4", "--d", "3",
                          "--frobnicate")
        assert code == EXIT_USAGE


class TestSimulate:
    def test_seeded_runs_are_byte_identical(self):
        args = ("simulate", "--model", "B", "--functional", "f1", "--n", "3",
                "--d", "2", "--samples", "4000", "--seed", "7")
        code_a, text_a = run_cli(*args)
        code_b, text_b = run_cli(*args)
        assert code_a == code_b == EXIT_OK
        assert text_a == text_b
        rec = json.loads(text_a.strip())
        assert abs(rec["estimate"]["z"]) <= 4

    def test_estimate_includes_exact_reference(self):
        code, text = run_cli("simulate", "--model", "A", "--functional", "absorption",
                             "--n", "4", "--d", "2", "--samples", "4000", "--seed", "1")
        assert code == EXIT_OK
        rec = json.loads(text.strip())
        assert rec["exact"]["num"] == "1" and rec["exact"]["den"] == "12"
        assert rec["estimate"]["samples"] == 4000

    def test_env_var_seed(self, monkeypatch):
        monkeypatch.setenv("CONIC_WALKS_SEED", "123")
        args = ("simulate", "--model", "B", "--functional", "nonabsorption",
                "--n", "2", "--d", "1", "--samples", "2000")
        _, text_env = run_cli(*args)
        _, text_explicit = run_cli(*args, "--seed", "123")
        assert text_env == text_explicit

    def test_worker_flag_does_not_change_bytes(self):
        args = ("simulate", "--model", "B", "--functional", "nonabsorption",
                "--n", "2", "--d", "1", "--samples", "6000", "--seed", "5")
        _, serial = run_cli(*args, "--workers", "1")
        _, parallel = run_cli(*args, "--workers", "2")
        assert serial == parallel


class TestVerify:
    def test_small_budget_skips_gates_but_passes(self, tmp_path):
        out = tmp_path / "report.json"
        code, text = run_cli("verify", "--budget", "100", "--seed", "3",
                             "--out", str(out))
        assert code == EXIT_OK
        assert "mc gates: skipped" in text
        report = json.loads(out.read_text())
        assert report["schema"] == 1
        assert report["summary"]["overall"] == "pass"

    def test_corruption_flag_fails(self, tmp_path):
        out = tmp_path / "report.json"
        code, _ = run_cli("verify", "--budget", "100", "--seed", "3",
                          "--out", str(out), "--inject-table-corruption")
        assert code == EXIT_VERIFY
        report = json.loads(out.read_text())
        assert report["summary"]["identities_failed"] >= 1

    def test_report_bytes_reproducible(self, tmp_path):
        out_a, out_b = tmp_path / "a.json", tmp_path / "b.json"
        run_cli("verify", "--budget", "100", "--seed", "11", "--out", str(out_a))
        run_cli("verify", "--budget", "100", "--seed", "11", "--out", str(out_b))
        assert out_a.read_bytes() == out_b.read_bytes()
