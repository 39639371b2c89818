"""End-to-end checks of the command-line interface via subprocess."""

import csv
import json
import subprocess
import sys

import pytest


def run_cli(*args, cwd=None):
    return subprocess.run(
        [sys.executable, "-m", "consensus_lab", *args],
        capture_output=True,
        text=True,
        cwd=cwd,
    )


def write_json(path, obj):
    path.write_text(json.dumps(obj) + "\n")
    return str(path)


def cycle_graph_json(n):
    edges = [[i, (i + 1) % n, 1.0] for i in range(n)]
    return {"n": n, "undirected": True,
            "edges": [[min(i, j), max(i, j), w] for i, j, w in edges]}


def static_network_json(graph_obj):
    return {
        "signal": {"type": "floor_modulo", "rate": 1.0, "modulus": 1},
        "graphs": [graph_obj],
    }


@pytest.fixture
def cycle4_net(tmp_path):
    return write_json(tmp_path / "net.json", static_network_json(cycle_graph_json(4)))


@pytest.fixture
def linear_protocol(tmp_path):
    return write_json(
        tmp_path / "proto.json",
        {"direction": "aggregated", "f": {"type": "linear", "k": 2.0}},
    )


@pytest.fixture
def x0_file(tmp_path):
    p = tmp_path / "x0.txt"
    p.write_text("1.0\n-1.0\n0.5\n-0.5\n")
    return str(p)


class TestSimulate:
    def test_settles_and_writes_outputs(self, tmp_path, cycle4_net, linear_protocol, x0_file):
        out = tmp_path / "run"
        res = run_cli(
            "simulate", cycle4_net, linear_protocol,
            "--x0-file", x0_file, "--dt", "1e-3", "--t-end", "10.0",
            "--epsilon", "1e-4", "--out", str(out),
        )
        assert res.returncode == 0, res.stderr
        assert "settled at t=" in res.stdout
        for name in ("trajectory.csv", "metrics.csv", "events.csv", "meta.json"):
            assert (out / name).exists(), name
        with open(out / "trajectory.csv") as fh:
            header = next(csv.reader(fh))
        assert header == ["t", "x_0", "x_1", "x_2", "x_3", "V", "E_tot"]
        meta = json.loads((out / "meta.json").read_text())
        assert meta["command"] == "simulate"
        assert meta["x0"] == [1.0, -1.0, 0.5, -0.5]
        assert meta["protocol"]["f"]["type"] == "linear"

    def test_no_settle_exit_code(self, tmp_path, cycle4_net, linear_protocol, x0_file):
        res = run_cli(
            "simulate", cycle4_net, linear_protocol,
            "--x0-file", x0_file, "--dt", "1e-3", "--t-end", "0.01",
            "--epsilon", "1e-9", "--out", str(tmp_path / "run"),
        )
        assert res.returncode == 3
        assert "did not settle" in res.stdout

    def test_no_epsilon_always_ok(self, tmp_path, cycle4_net, linear_protocol, x0_file):
        res = run_cli(
            "simulate", cycle4_net, linear_protocol,
            "--x0-file", x0_file, "--dt", "1e-3", "--t-end", "0.01",
            "--out", str(tmp_path / "run"),
        )
        assert res.returncode == 0
        assert "finished at" in res.stdout

    def test_missing_network_file(self, tmp_path, linear_protocol, x0_file):
        res = run_cli(
            "simulate", str(tmp_path / "absent.json"), linear_protocol,
            "--x0-file", x0_file, "--t-end", "1.0",
        )
        assert res.returncode == 1
        assert "absent.json" in res.stderr

    def test_x0_sources_exclusive(self, tmp_path, cycle4_net, linear_protocol, x0_file):
        res = run_cli(
            "simulate", cycle4_net, linear_protocol,
            "--x0-file", x0_file, "--x0-lcg", "--t-end", "1.0",
        )
        assert res.returncode == 1
        assert "mutually exclusive" in res.stderr

    def test_x0_required(self, cycle4_net, linear_protocol):
        res = run_cli("simulate", cycle4_net, linear_protocol, "--t-end", "1.0")
        assert res.returncode == 1

    def test_lcg_x0(self, tmp_path, cycle4_net, linear_protocol):
        out = tmp_path / "run"
        res = run_cli(
            "simulate", cycle4_net, linear_protocol,
            "--x0-lcg", "--dt", "1e-3", "--t-end", "0.01", "--out", str(out),
        )
        assert res.returncode == 0, res.stderr
        meta = json.loads((out / "meta.json").read_text())
        assert meta["x0"][0] == -9.98046875
        assert meta["x0"][1] == -9.1015625

    def test_divergence_exit_code(self, tmp_path, cycle4_net):
        proto = write_json(
            tmp_path / "ft.json",
            {"direction": "aggregated",
             "f": {"type": "fixed_time", "k1": 1.0, "k2": 1000.0,
                   "p": 0.5, "q": 3.0}},
        )
        x0 = tmp_path / "big.txt"
        x0.write_text("1000.0\n0.0\n0.0\n-1000.0\n")
        res = run_cli(
            "simulate", cycle4_net, proto,
            "--x0-file", str(x0), "--dt", "1e-3", "--t-end", "5.0",
            "--out", str(tmp_path / "run"),
        )
        assert res.returncode == 2
        assert "diverged" in res.stderr.lower()

    def test_byte_identical_reruns(self, tmp_path, cycle4_net, linear_protocol, x0_file):
        outs = []
        for name in ("a", "b"):
            out = tmp_path / name
            res = run_cli(
                "simulate", cycle4_net, linear_protocol,
                "--x0-file", x0_file, "--dt", "1e-3", "--t-end", "2.0",
                "--record-stride", "10", "--out", str(out),
            )
            assert res.returncode == 0, res.stderr
            outs.append(out)
        for name in ("trajectory.csv", "metrics.csv", "events.csv", "meta.json"):
            assert (outs[0] / name).read_bytes() == (outs[1] / name).read_bytes()


class TestBenchmark:
    def test_sizes_must_include_anchor(self, tmp_path):
        res = run_cli(
            "benchmark", "--experiment", "1", "--sizes", "30",
            "--out", str(tmp_path),
        )
        assert res.returncode == 1
        assert "25" in res.stderr

    def test_bad_sizes_string(self, tmp_path):
        res = run_cli(
            "benchmark", "--experiment", "1", "--sizes", "a,b",
            "--out", str(tmp_path),
        )
        assert res.returncode == 1

    def test_coarse_sweep(self, tmp_path):
        res = run_cli(
            "benchmark", "--experiment", "1", "--sizes", "25",
            "--dt", "1e-3", "--out", str(tmp_path),
        )
        assert res.returncode == 0, res.stderr
        with open(tmp_path / "results.csv") as fh:
            rows = list(csv.DictReader(fh))
        assert [(r["n"], r["direction"]) for r in rows] == [
            ("25", "per_edge"), ("25", "aggregated")
        ]
        assert all(r["protocol"] == "power" for r in rows)
        assert all(r["k1"] == "" and r["k2"] == "" for r in rows)
        meta = json.loads((tmp_path / "meta.json").read_text())
        assert meta["experiment"] == 1
        assert "calibration" in meta


class TestVerify:
    def test_spectral_small_cycle(self, tmp_path):
        g = write_json(tmp_path / "c6.json", cycle_graph_json(6))
        res = run_cli("verify", g, "--spectral")
        assert res.returncode == 0, res.stderr
        assert "connected: yes" in res.stdout
        lam2 = next(
            float(line.split("=")[1])
            for line in res.stdout.splitlines()
            if line.startswith("lambda2 =")
        )
        assert lam2 == pytest.approx(1.0, abs=1e-9)
        assert "kappa1 = 2" in res.stdout
        assert "lambda2 <= kappa1: ok" in res.stdout

    def test_spectral_large_cycle_skips_kappa(self, tmp_path):
        g = write_json(tmp_path / "c25.json", cycle_graph_json(25))
        res = run_cli("verify", g, "--spectral")
        assert res.returncode == 0, res.stderr
        assert "kappa1" not in res.stdout

    def test_spectral_complete_graph_skips_bound(self, tmp_path):
        edges = [[i, j, 1.0] for i in range(4) for j in range(i + 1, 4)]
        g = write_json(tmp_path / "k4.json",
                       {"n": 4, "undirected": True, "edges": edges})
        res = run_cli("verify", g, "--spectral")
        assert res.returncode == 0, res.stderr
        assert "skipped (complete graph)" in res.stdout

    def test_spectral_rejects_directed(self, tmp_path):
        g = write_json(tmp_path / "dir.json",
                       {"n": 3, "undirected": False,
                        "edges": [[0, 1, 1.0], [1, 2, 1.0]]})
        res = run_cli("verify", g, "--spectral")
        assert res.returncode == 1
        assert "undirected" in res.stderr

    @pytest.fixture
    def phased_net(self, tmp_path):
        # each member alone is disconnected; their union is a path on 3 nodes
        g0 = {"n": 3, "undirected": True, "edges": [[0, 1, 1.0]]}
        g1 = {"n": 3, "undirected": True, "edges": [[1, 2, 1.0]]}
        return write_json(
            tmp_path / "phased.json",
            {"signal": {"type": "floor_modulo", "rate": 1.0, "modulus": 2},
             "graphs": [g0, g1]},
        )

    def test_joint_connectivity_pass(self, phased_net):
        res = run_cli("verify", phased_net, "--tau", "2.0")
        assert res.returncode == 0, res.stderr
        assert res.stdout.count("disconnected (2 components)") == 2
        assert "tau-jointly connected" in res.stdout

    def test_joint_connectivity_fail(self, phased_net):
        res = run_cli("verify", phased_net, "--tau", "0.5")
        assert res.returncode == 4
        assert "FAIL" in res.stdout

    def test_tau_required(self, phased_net):
        res = run_cli("verify", phased_net)
        assert res.returncode == 1
        assert "--tau" in res.stderr


class TestParsing:
    def test_unknown_subcommand(self):
        res = run_cli("frobnicate")
        assert res.returncode == 1

    def test_no_arguments(self):
        res = run_cli()
        assert res.returncode == 1

    def test_bad_flag_value(self, tmp_path):
        res = run_cli("benchmark", "--experiment", "7", "--sizes", "25",
                      "--out", str(tmp_path))
        assert res.returncode == 1
