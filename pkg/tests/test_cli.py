import csv
import json
import math
from pathlib import Path

import pytest

from nsee.cli import main


def read_csv(path: Path):
    with open(path) as f:
        return list(csv.DictReader(f))


class TestSre:
    def test_tstate(self, tmp_path):
        assert main(["sre", "--n", "4", "--state", "tstate",
                     "--output-dir", str(tmp_path)]) == 0
        rows = read_csv(tmp_path / "results.csv")
        assert len(rows) == 1
        assert float(rows[0]["value_nats"]) == pytest.approx(
            4 * math.log(4 / 3), abs=1e-9)
        assert float(rows[0]["density"]) == pytest.approx(
            math.log(4 / 3), abs=1e-9)

    def test_zero_state(self, tmp_path):
        assert main(["sre", "--n", "3", "--state", "zero",
                     "--output-dir", str(tmp_path)]) == 0
        rows = read_csv(tmp_path / "results.csv")
        assert abs(float(rows[0]["value_nats"])) < 1e-10

    def test_meta_written(self, tmp_path):
        main(["sre", "--n", "2", "--output-dir", str(tmp_path)])
        meta = json.loads((tmp_path / "meta.json").read_text())
        assert meta["command"] == "sre"
        assert meta["log_base"] == "e"
        assert meta["config"]["n"] == 2


class TestIsingSweep:
    def test_columns_and_physics(self, tmp_path):
        assert main(["ising", "--lx", "2", "--ly", "2", "--h-min", "0.0",
                     "--h-max", "1.0", "--h-step", "0.5", "--hz", "0.2",
                     "--output-dir", str(tmp_path)]) == 0
        rows = read_csv(tmp_path / "results.csv")
        assert [r["h"] for r in rows] == ["0", "0.5", "1"]
        for r in rows:
            if r["reduction_rate"] != "":
                ee = float(r["ee_sum"])
                ns = float(r["nsee_sum"])
                assert float(r["reduction_rate"]) == pytest.approx(
                    (ee - ns) / ee, abs=1e-9)
            assert float(r["camps_energy"]) == pytest.approx(
                float(r["energy"]), abs=1e-6)
            assert r["error"] == ""

    def test_reduction_blank_when_ee_zero(self, tmp_path):
        # pinned h=0 ground state is an exact product state
        main(["ising", "--lx", "2", "--ly", "2", "--h-min", "0.0",
              "--h-max", "0.0", "--h-step", "1.0", "--hz", "0.2",
              "--output-dir", str(tmp_path)])
        rows = read_csv(tmp_path / "results.csv")
        assert rows[0]["reduction_rate"] == ""

    def test_deterministic_reruns(self, tmp_path):
        argv = ["ising", "--lx", "2", "--ly", "2", "--h-min", "1.0",
                "--h-max", "1.5", "--h-step", "0.5"]
        main(argv + ["--output-dir", str(tmp_path / "a")])
        main(argv + ["--output-dir", str(tmp_path / "b")])
        for name in ("results.csv", "trace.csv", "circuit.json"):
            assert (tmp_path / "a" / name).read_bytes() == \
                (tmp_path / "b" / name).read_bytes()

    def test_empty_grid_usage_error(self, tmp_path):
        assert main(["ising", "--h-min", "2.0", "--h-max", "1.0",
                     "--h-step", "0.5", "--output-dir", str(tmp_path)]) == 2


class TestSpectrumCommand:
    def test_round_one_flat(self, tmp_path):
        assert main(["spectrum", "--n", "6", "--rounds", "1",
                     "--output-dir", str(tmp_path)]) == 0
        rows = read_csv(tmp_path / "results.csv")
        vals = [float(r["value"]) for r in rows if r["round"] == "1"]
        assert max(vals) - min(vals) < 1e-8 * max(vals)


class TestConfigFile:
    def test_config_merged_and_flags_override(self, tmp_path):
        cfg = tmp_path / "run.json"
        cfg.write_text(json.dumps({"n": 3, "state": "zero"}))
        out = tmp_path / "out"
        assert main(["sre", "--config", str(cfg), "--n", "2",
                     "--output-dir", str(out)]) == 0
        rows = read_csv(out / "results.csv")
        assert rows[0]["n_qubits"] == "2"          # flag wins
        assert abs(float(rows[0]["value_nats"])) < 1e-10  # state from config

    def test_unknown_key_rejected(self, tmp_path):
        cfg = tmp_path / "run.json"
        cfg.write_text(json.dumps({"frobnicate": True}))
        assert main(["sre", "--config", str(cfg),
                     "--output-dir", str(tmp_path)]) == 2

    def test_nested_config_rejected(self, tmp_path):
        cfg = tmp_path / "run.json"
        cfg.write_text(json.dumps({"n": {"value": 3}}))
        assert main(["sre", "--config", str(cfg),
                     "--output-dir", str(tmp_path)]) == 2

    def test_missing_config_usage_error(self, tmp_path):
        assert main(["sre", "--config", str(tmp_path / "nope.json"),
                     "--output-dir", str(tmp_path)]) == 2

    def test_invalid_json(self, tmp_path):
        cfg = tmp_path / "run.json"
        cfg.write_text("{not json")
        assert main(["sre", "--config", str(cfg),
                     "--output-dir", str(tmp_path)]) == 2


class TestUsage:
    def test_unknown_command(self):
        assert main(["transmogrify"]) == 2

    def test_no_command(self):
        assert main([]) == 2

    def test_float_format_12_digits(self, tmp_path):
        main(["sre", "--n", "1", "--state", "tstate",
              "--output-dir", str(tmp_path)])
        rows = read_csv(tmp_path / "results.csv")
        assert rows[0]["value_nats"] == f"{math.log(4 / 3):.12g}"
