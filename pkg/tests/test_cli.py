"""Command-line interface: exit codes, file outputs and schema conformance."""

import csv
import json
import math
import subprocess
import sys
from importlib import resources

import jsonschema
import pytest
import yaml
from click.testing import CliRunner

from condelay import fixture_path
from condelay.cli import main


def load_schema(name: str) -> dict:
    res = resources.files("condelay").joinpath("schemas", f"{name}.schema.json")
    return json.loads(res.read_text())


def read_json(path) -> dict:
    with open(path) as fh:
        return json.load(fh)


def run_cli(args):
    return CliRunner().invoke(main, args)


@pytest.fixture
def marginal_config(tmp_path):
    # lambda = 1 and A + C = 0: the root count at zero delay is undefined
    data = {
        "dynamics": {"p": 1, "q": 1, "a": [[1.0]], "b": [[1.0]], "k": [[1.0]]},
        "topologies": [{"adjacency": [[0.0, 0.5], [0.5, 0.0]]}],
    }
    path = tmp_path / "marginal.yaml"
    path.write_text(yaml.safe_dump(data))
    return str(path)


@pytest.fixture
def disconnected_config(tmp_path):
    data = {
        "dynamics": {"p": 1, "q": 1, "a": [[0.0]], "b": [[1.0]], "k": [[1.0]]},
        "topologies": [{"adjacency": [
            [0.0, 1.0, 0.0, 0.0],
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
            [0.0, 0.0, 1.0, 0.0],
        ]}],
    }
    path = tmp_path / "disconnected.yaml"
    path.write_text(yaml.safe_dump(data))
    return str(path)


class TestAnalyze:
    def test_ring5_outputs(self, tmp_path):
        out = tmp_path / "out"
        r = run_cli(["analyze", "--config", fixture_path("ring5"),
                     "--out", str(out)])
        assert r.exit_code == 0, r.output
        assert "delay bound: 0.90104" in r.stdout

        summary = read_json(out / "summary.json")
        jsonschema.validate(summary, load_schema("summary"))
        assert summary["delay_bound"] == pytest.approx(0.901040021617, rel=1e-9)
        assert summary["binding_lambda"] == pytest.approx(3.61803398875)
        assert summary["switching"] is False
        assert summary["nu_at_zero"] == 0
        assert summary["stable_pockets"] == [[0.0, summary["delay_bound"]]]

        crossings = read_json(out / "crossings.json")
        jsonschema.validate(crossings, load_schema("crossings"))
        kinds = {c["kind"] for c in crossings}
        assert kinds == {"kernel", "offspring"}
        assert sum(c["kind"] == "kernel" for c in crossings) == 6

        with open(out / "nu_steps.csv") as fh:
            rows = list(csv.DictReader(fh))
        assert rows[0]["nu"] == "0"
        assert float(rows[0]["tau_end"]) == pytest.approx(0.901040021617)
        for prev, cur in zip(rows, rows[1:]):
            assert prev["tau_end"] == cur["tau_start"]
        assert float(rows[-1]["tau_end"]) == 12.0

    def test_unbounded_delay_serialized_as_inf(self, tmp_path):
        out = tmp_path / "out"
        r = run_cli(["analyze", "--config", fixture_path("single_agent"),
                     "--out", str(out)])
        assert r.exit_code == 0, r.output
        assert "delay bound: inf" in r.stdout
        summary = read_json(out / "summary.json")
        jsonschema.validate(summary, load_schema("summary"))
        assert summary["delay_bound"] == "inf"
        assert summary["binding_lambda"] is None

    def test_switching_set(self, tmp_path):
        out = tmp_path / "out"
        r = run_cli(["analyze", "--config", fixture_path("star5_switching"),
                     "--out", str(out)])
        assert r.exit_code == 0, r.output
        summary = read_json(out / "summary.json")
        assert summary["switching"] is True
        assert summary["delay_bound"] == pytest.approx(math.pi / 10, rel=1e-9)

    def test_missing_config(self, tmp_path):
        r = run_cli(["analyze", "--config", str(tmp_path / "nope.yaml"),
                     "--out", str(tmp_path)])
        assert r.exit_code == 1
        assert r.stderr.startswith("error:")

    def test_disconnected_graph(self, disconnected_config, tmp_path):
        r = run_cli(["analyze", "--config", disconnected_config,
                     "--out", str(tmp_path / "out")])
        assert r.exit_code == 1
        assert "disconnected" in r.stderr

    def test_marginal_at_zero_is_degenerate(self, marginal_config, tmp_path):
        r = run_cli(["analyze", "--config", marginal_config,
                     "--out", str(tmp_path / "out")])
        assert r.exit_code == 2
        assert r.stderr.startswith("degenerate analysis:")

    def test_deterministic_output_bytes(self, tmp_path):
        outs = []
        for sub in ("one", "two"):
            out = tmp_path / sub
            r = run_cli(["analyze", "--config", fixture_path("ring5"),
                         "--out", str(out)])
            assert r.exit_code == 0
            outs.append(out)
        for name in ("summary.json", "crossings.json", "nu_steps.csv"):
            assert (outs[0] / name).read_bytes() == (outs[1] / name).read_bytes()


class TestSimulate:
    def test_stable_run(self, tmp_path):
        out = tmp_path / "out"
        r = run_cli(["simulate", "--config", fixture_path("integrator_pair"),
                     "--tau", "0.5", "--out", str(out)])
        assert r.exit_code == 0, r.output
        assert "tau = 0.5: stable" in r.stdout

        verdict = read_json(out / "verdict.json")
        jsonschema.validate(verdict, load_schema("verdict"))
        assert verdict["verdict"] == "stable"
        assert verdict["tau"] == 0.5
        assert verdict["diverged"] is False
        assert verdict["backend"] in ("compiled", "python")

        with open(out / "trajectory.csv") as fh:
            rows = list(csv.DictReader(fh))
        assert set(rows[0]) == {"t", "x0", "x1"}
        with open(out / "disagreement.csv") as fh:
            rows = list(csv.DictReader(fh))
        assert set(rows[0]) == {"t", "norm"}
        assert float(rows[0]["norm"]) > 0.0

    def test_first_config_delay_is_default(self, tmp_path):
        out = tmp_path / "out"
        r = run_cli(["simulate", "--config", fixture_path("integrator_pair"),
                     "--out", str(out)])
        assert r.exit_code == 0, r.output
        assert read_json(out / "verdict.json")["tau"] == 0.5

    def test_negative_tau(self, tmp_path):
        r = run_cli(["simulate", "--config", fixture_path("integrator_pair"),
                     "--tau", "-0.1", "--out", str(tmp_path)])
        assert r.exit_code == 1
        assert r.stderr.startswith("error:")

    def test_no_delay_available(self, tmp_path):
        data = {
            "dynamics": {"p": 1, "q": 1, "a": [[0.0]], "b": [[1.0]],
                         "k": [[1.0]]},
            "topologies": [{"adjacency": [[0.0, 1.0], [1.0, 0.0]]}],
        }
        cfg = tmp_path / "nodelay.yaml"
        cfg.write_text(yaml.safe_dump(data))
        r = run_cli(["simulate", "--config", str(cfg), "--out", str(tmp_path)])
        assert r.exit_code == 1
        assert r.stderr.startswith("error:")

    def test_seed_changes_trajectory_not_verdict(self, tmp_path):
        verdicts = []
        norms = []
        for seed in ("11", "12"):
            out = tmp_path / seed
            r = run_cli(["simulate", "--config",
                         fixture_path("integrator_pair"), "--tau", "0.5",
                         "--seed", seed, "--out", str(out)])
            assert r.exit_code == 0, r.output
            v = read_json(out / "verdict.json")
            verdicts.append(v["verdict"])
            norms.append(v["initial_norm"])
        assert verdicts == ["stable", "stable"]
        assert norms[0] != norms[1]


class TestSweep:
    def test_ring5_consistency(self, tmp_path):
        out = tmp_path / "out"
        r = run_cli(["sweep", "--config", fixture_path("ring5"),
                     "--out", str(out)])
        assert r.exit_code == 0, r.output
        assert "3/3 consistent" in r.stdout

        report = read_json(out / "sweep.json")
        jsonschema.validate(report, load_schema("sweep"))
        assert report["total"] == 3
        assert report["consistent_count"] == 3
        got = [(e["tau"], e["predicted"], e["verdict"]) for e in report["entries"]]
        assert got == [(0.7, "stable", "stable"),
                       (0.901, "marginal", "marginal"),
                       (1.1, "unstable", "unstable")]

    def test_empty_tau_list(self, tmp_path):
        r = run_cli(["sweep", "--config", fixture_path("ring5"),
                     "--tau-list", "", "--out", str(tmp_path)])
        assert r.exit_code == 1
        assert r.stderr.startswith("error:")

    def test_malformed_tau_list(self, tmp_path):
        r = run_cli(["sweep", "--config", fixture_path("ring5"),
                     "--tau-list", "0.2,oops", "--out", str(tmp_path)])
        assert r.exit_code == 1


def test_module_entry_point(tmp_path):
    out = subprocess.run(
        [sys.executable, "-m", "condelay", "analyze",
         "--config", fixture_path("integrator_pair"),
         "--out", str(tmp_path / "out")],
        capture_output=True, text=True,
    )
    assert out.returncode == 0, out.stderr
    assert "delay bound: 1.5708" in out.stdout
