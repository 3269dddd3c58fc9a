import csv
import json
import subprocess
import sys

import pytest

from caproof.analysis import classify
from caproof.cli import parse_grid, parse_int_list, parse_scalar, run
from caproof.config import ConfigError, resolve_config
from caproof.metrics import OperatingPoint, decode_metrics
from caproof.model import Phase


class TestGridParsing:
    def test_scalar_suffixes(self):
        assert parse_scalar("17") == 17
        assert parse_scalar("1k") == 1000
        assert parse_scalar("2M") == 2_000_000
        assert parse_int_list("1,2k,3") == [1, 2000, 3]

    def test_plain_range(self):
        assert parse_grid("B=1..4")["B"] == [1, 2, 3, 4]

    def test_log_range_doubles_and_includes_endpoint(self):
        grid = parse_grid("L=1k..1m:log")
        assert grid["L"][0] == 1000
        assert grid["L"][-1] == 1_000_000
        assert grid["L"][:4] == [1000, 2000, 4000, 8000]

    def test_counted_ranges(self):
        assert parse_grid("L=1..100:log3")["L"] == [1, 10, 100]
        assert parse_grid("B=10..30:3")["B"] == [10, 20, 30]

    def test_comma_lists_extend_dimension(self):
        grid = parse_grid("B=1,2,8,L=512")
        assert grid == {"B": [1, 2, 8], "L": [512]}

    def test_errors(self):
        with pytest.raises(ConfigError):
            parse_grid("X=1..4")
        with pytest.raises(ConfigError):
            parse_grid("B=4..1")
        with pytest.raises(ConfigError):
            parse_grid("")
        with pytest.raises(ConfigError):
            parse_scalar("abc")
        with pytest.raises(ConfigError):
            parse_grid("L=1..1m")  # too many points without :log


class TestCommands:
    def test_analyze_text_matches_metrics(self, tmp_path):
        assert run(["analyze", "--model", "mha-48x2048", "--hardware", "unit-device",
                    "--batch", "2", "--context", "1024", "--phase", "decode",
                    "--out", str(tmp_path)]) == 0
        text = (tmp_path / "analyze.txt").read_text()
        spec = resolve_config("mha-48x2048", "model")
        metrics = decode_metrics(spec, OperatingPoint(1024, 2, Phase.DECODE))
        assert f"{metrics.oi:.6g}" in text
        assert f"{metrics.cf:.6g}" in text

    def test_csv_rows_reproducible_from_analysis_module(self, tmp_path):
        assert run(["sweep", "--model", "gqa8-48x2048", "--hardware", "b200-sxm",
                    "--grid", "B=1,4,L=2k..8k:log", "--out", str(tmp_path)]) == 0
        spec = resolve_config("gqa8-48x2048", "model")
        hw = resolve_config("b200-sxm", "hardware")
        with open(tmp_path / "sweep.csv") as handle:
            rows = list(csv.DictReader(handle))
        assert rows
        for row in rows:
            point = OperatingPoint(int(row["context_len"]), int(row["batch_size"]),
                                   Phase(row["phase"]))
            again = classify(spec, hw, point)
            assert float(row["oi"]) == again.metrics.oi
            assert float(row["cf_bytes"]) == again.metrics.cf
            assert row["bound_class"] == again.bound_class.value
            assert int(row["min_devices"]) == again.min_devices

    def test_identical_invocations_byte_identical(self, tmp_path):
        args = ["sweep", "--model", "dense-70b", "--hardware", "b200-node8",
                "--workload", "coding-agent"]
        outputs = []
        for sub in ("a", "b"):
            out = tmp_path / sub
            assert run(args + ["--out", str(out)]) == 0
            outputs.append((out / "sweep.csv").read_bytes())
            outputs.append((out / "sweep.svg").read_bytes())
        assert outputs[0] == outputs[2]
        assert outputs[1] == outputs[3]

    def test_format_subset(self, tmp_path):
        assert run(["analyze", "--model", "mha-48x2048", "--hardware", "unit-device",
                    "--out", str(tmp_path), "--format", "csv"]) == 0
        assert (tmp_path / "analyze.csv").exists()
        assert not (tmp_path / "analyze.svg").exists()
        assert not (tmp_path / "analyze.txt").exists()

    def test_compare_attention_ratio_columns(self, tmp_path):
        assert run(["compare-attention", "--model", "mha-48x2048", "--model",
                    "gqa8-48x2048", "--model", "mla-48x2048", "--out", str(tmp_path)]) == 0
        with open(tmp_path / "compare-attention.csv") as handle:
            rows = list(csv.DictReader(handle))
        for row in rows:
            mha = float(row["mha-48x2048_kv_bytes"])
            gqa = float(row["gqa8-48x2048_kv_bytes"])
            mla = float(row["mla-48x2048_cf_bytes"])
            assert mha == 4.0 * gqa
            assert mla < float(row["gqa8-48x2048_cf_bytes"]) < float(row["mha-48x2048_cf_bytes"])
        svg = (tmp_path / "compare-attention.svg").read_text()
        assert svg.startswith("<svg") and "polyline" in svg

    def test_compare_moe_decomposition(self, tmp_path):
        assert run(["compare-moe", "--model", "dense-70b", "--model", "moe-256e",
                    "--out", str(tmp_path)]) == 0
        with open(tmp_path / "compare-moe.csv") as handle:
            rows = list(csv.DictReader(handle))
        assert {(r["model"], r["batch_size"]) for r in rows} == {
            ("dense-70b", "1"), ("dense-70b", "16"), ("moe-256e", "1"), ("moe-256e", "16"),
        }
        for row in rows:
            assert float(row["weight_floor_bytes"]) + float(row["kv_bytes"]) == float(row["cf_bytes"])

    def test_agent_profile_defaults_to_all_presets(self, tmp_path):
        assert run(["agent-profile", "--model", "dense-70b", "--hardware", "b200-node8",
                    "--out", str(tmp_path)]) == 0
        with open(tmp_path / "agent-profile.csv") as handle:
            rows = list(csv.DictReader(handle))
        assert {r["workload"] for r in rows} == {"chatbot", "coding-agent", "web-use",
                                                 "computer-use"}
        coding = [r for r in rows if r["workload"] == "coding-agent"][0]
        assert int(coding["final_context"]) == 310000
        svg = (tmp_path / "agent-profile.svg").read_text()
        assert "one-device capacity" in svg

    def test_roofline_plot_contains_arms_and_points(self, tmp_path):
        assert run(["roofline-plot", "--model", "dense-70b", "--hardware", "b200-sxm",
                    "--workload", "chatbot", "--out", str(tmp_path)]) == 0
        svg = (tmp_path / "roofline-plot.svg").read_text()
        assert "ridge 281.25" in svg
        assert svg.count("<circle") > 2  # ridge marker plus workload points

    def test_strict_capacity_exceeded_exit(self, tmp_path):
        args = ["analyze", "--model", "dense-70b", "--hardware", "b200-sxm",
                "--context", "300k", "--phase", "decode", "--out", str(tmp_path)]
        assert run(args) == 0
        assert run(args + ["--strict"]) == 3


class TestProcessLevel:
    def run_cli(self, *args):
        return subprocess.run([sys.executable, "-m", "caproof.cli", *args],
                              capture_output=True, text=True)

    def test_missing_config_exits_2_and_names_path(self, tmp_path):
        result = self.run_cli("analyze", "--model", str(tmp_path / "nope.json"),
                              "--hardware", "unit-device", "--out", str(tmp_path))
        assert result.returncode == 2
        assert "nope.json" in result.stderr

    def test_invalid_schema_exits_2_and_names_key(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({"type": "model", "name": "x", "num_layers": 1,
                                   "d_model": 8, "num_heads": 2, "d_ff": 8,
                                   "mystery": 1}))
        result = self.run_cli("analyze", "--model", str(bad), "--hardware",
                              "unit-device", "--out", str(tmp_path))
        assert result.returncode == 2
        assert "mystery" in result.stderr

    def test_success_exit_0(self, tmp_path):
        result = self.run_cli("analyze", "--model", "mha-48x2048", "--hardware",
                              "unit-device", "--out", str(tmp_path))
        assert result.returncode == 0

    def test_invalid_point_exits_2(self, tmp_path):
        result = self.run_cli("analyze", "--model", "mha-48x2048", "--hardware",
                              "unit-device", "--batch", "0", "--out", str(tmp_path))
        assert result.returncode == 2
        assert "batch_size" in result.stderr

    def test_missing_precision_exits_2_and_names_available(self, tmp_path):
        hw = tmp_path / "hw.json"
        hw.write_text(json.dumps({"type": "hardware", "name": "only8",
                                  "peak_flops": {"8": 1e12}, "mem_bandwidth": 1e12,
                                  "mem_capacity": 1e12}))
        result = self.run_cli("analyze", "--model", "mha-48x2048", "--hardware",
                              str(hw), "--out", str(tmp_path))
        assert result.returncode == 2
        assert "available precisions: 8" in result.stderr
