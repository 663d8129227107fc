import csv
import json
import math

import numpy as np
import pytest

from cgq.cli import DISCRIMINATE_HEADER, EVOLVE_HEADER, main
from cgq.channels import bns_channel


def write_state(path, m):
    m = np.asarray(m, dtype=complex)
    path.write_text(json.dumps({"dim": m.shape[0], "re": m.real.tolist(), "im": m.imag.tolist()}))
    return str(path)


def read_matrix(d):
    return np.array(d["re"]) + 1j * np.array(d["im"])


def read_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], np.array(rows[1:], dtype=float)


@pytest.fixture
def states(tmp_path):
    return {
        "zero": write_state(tmp_path / "zero.json", np.diag([1, 0])),
        "half": write_state(tmp_path / "half.json", np.eye(2) / 2),
        "plus": write_state(tmp_path / "plus.json", np.full((2, 2), 0.5)),
        "bad": write_state(tmp_path / "bad.json", [[1, 1], [1, 1]]),
        "edge": write_state(tmp_path / "edge.json", [[0, 1e-7], [1e-7, 1]]),
    }


def test_assign_bns_ground_state(states, tmp_path):
    out = tmp_path / "a.json"
    assert main(["assign", states["zero"], "--channel", "bns", "--out", str(out)]) == 0
    data = json.loads(out.read_text())
    assert np.allclose(read_matrix(data["micro_state"]), np.diag([1, 0, 0, 0]))
    assert data["report"]["validation"]["passed"]


def test_assign_partial_trace(states, tmp_path):
    out = tmp_path / "a.json"
    argv = ["assign", states["half"], "--channel", "partial-trace", "--dim-e", "2", "--out", str(out)]
    assert main(argv) == 0
    assert np.allclose(read_matrix(json.loads(out.read_text())["micro_state"]), np.eye(4) / 4)


def test_assign_with_monte_carlo(states, tmp_path):
    out = tmp_path / "a.json"
    assert main(["assign", states["plus"], "--channel", "bns", "--mc", "1000000", "17", "--out", str(out)]) == 0
    mc = json.loads(out.read_text())["report"]["mc"]
    assert mc["samples"] == 10**6 and mc["seed"] == 17
    assert mc["max_deviation"] <= 5e-3


def test_assign_exit_codes(states):
    assert main(["assign", states["bad"]]) == 2
    assert main(["assign", states["edge"], "--channel", "bns"]) == 3
    assert main(["assign", "/nonexistent.json"]) == 2


def test_tolerance_override(tmp_path):
    rough = write_state(tmp_path / "rough.json", [[0.800001, 0.4], [0.4, 0.2]])
    assert main(["assign", rough]) == 2
    assert main(["assign", rough, "--tol", "1e-5", "--out", str(tmp_path / "o.json")]) == 0


def test_evolve_third_period(states, tmp_path):
    out = tmp_path / "e.csv"
    t = math.pi / 3
    argv = ["evolve", states["half"], "--channel", "bns", "--hamiltonian", "local-y",
            "--t-min", repr(t), "--t-max", repr(t), "--steps", "1", "--out", str(out)]
    assert main(argv) == 0
    header, rows = read_csv(out)
    assert header == EVOLVE_HEADER
    assert rows.shape == (1, 5)
    # brute-force value for this configuration (see test_dynamics)
    assert rows[0, 1] == pytest.approx(0.25, abs=1e-12)


def test_evolve_time_zero_returns_input(tmp_path):
    rho = np.array([[0.7, 0.2 - 0.1j], [0.2 + 0.1j, 0.3]])
    path = write_state(tmp_path / "s.json", rho)
    out = tmp_path / "e.csv"
    assert main(["evolve", path, "--t-min", "0", "--steps", "1", "--out", str(out)]) == 0
    _, rows = read_csv(out)
    assert np.allclose(rows[0, 1:], [0.7, 0.2, -0.1, 0.3], atol=1e-12)


def test_evolve_partial_trace_local_matches_qubit_rotation(tmp_path):
    # H = sz (x) 1 + 1 (x) sz acts on the system as exp(-i t sz)
    h = np.kron(np.diag([1, -1]), np.eye(2)) + np.kron(np.eye(2), np.diag([1, -1]))
    hpath = tmp_path / "h.json"
    hpath.write_text(json.dumps({"re": h.tolist(), "im": np.zeros((4, 4)).tolist()}))
    chi = np.array([[0.8, 0.4], [0.4, 0.2]])
    path = write_state(tmp_path / "chi.json", chi)
    out = tmp_path / "e.csv"
    argv = ["evolve", path, "--channel", "partial-trace", "--hamiltonian", str(hpath),
            "--steps", "25", "--out", str(out)]
    assert main(argv) == 0
    _, rows = read_csv(out)
    t = rows[:, 0]
    coherence = 0.4 * np.exp(-2j * t)
    assert np.allclose(rows[:, 1], 0.8, atol=1e-12)
    assert np.allclose(rows[:, 2], coherence.real, atol=1e-12)
    assert np.allclose(rows[:, 3], coherence.imag, atol=1e-12)


def test_discriminate_fig3(tmp_path):
    out = tmp_path / "d.csv"
    assert main(["discriminate", "--preset", "fig3", "--out", str(out)]) == 0
    header, rows = read_csv(out)
    assert header == DISCRIMINATE_HEADER
    assert rows.shape == (400, 4)
    summary = json.loads((tmp_path / "d.json").read_text())
    assert summary["exceeds_initial"] is True
    assert summary["d_initial"] == pytest.approx(0.5, abs=1e-12)


def test_discriminate_identical_states(states, tmp_path):
    out = tmp_path / "d.csv"
    argv = ["discriminate", "--rho", states["half"], "--chi", states["half"], "--steps", "30", "--out", str(out)]
    assert main(argv) == 0
    _, rows = read_csv(out)
    assert np.max(np.abs(rows[:, 1:])) <= 1e-12


def test_discriminate_partial_trace_preset_constant(tmp_path):
    out = tmp_path / "d.csv"
    assert main(["discriminate", "--preset", "partial-trace-local", "--out", str(out)]) == 0
    _, rows = read_csv(out)
    assert np.max(np.abs(rows[:, 1] - rows[:, 2])) <= 1e-12


def test_discriminate_is_byte_reproducible(tmp_path):
    outs = []
    for name, extra in [("a", []), ("b", []), ("c", ["--workers", "4", "--chunk-size", "4096"])]:
        path = tmp_path / f"{name}.csv"
        argv = ["discriminate", "--preset", "fig3", "--steps", "50", "--samples", "20000",
                "--seed", "5", "--out", str(path)] + extra
        assert main(argv) == 0
        outs.append((path.read_bytes(), path.with_suffix(".json").read_bytes()))
    assert outs[0] == outs[1] == outs[2]


def test_csv_format(tmp_path):
    out = tmp_path / "d.csv"
    main(["discriminate", "--preset", "fig3", "--steps", "5", "--out", str(out)])
    raw = out.read_bytes()
    assert b"\r" not in raw and raw.endswith(b"\n")
    value = raw.split(b"\n")[2].split(b",")[1].decode()
    assert float(value) == float(format(float(value), ".17g"))
    assert len(value.replace(".", "").replace("-", "").lstrip("0")) >= 15


@pytest.mark.parametrize("channel", ["bns", "partial-trace"])
def test_verify_passes(channel, tmp_path):
    out = tmp_path / "v.json"
    assert main(["verify", "--channel", channel, "--out", str(out)]) == 0
    data = json.loads(out.read_text())
    assert data["passed"] and data["round_trip"]["max_defect"] <= 1e-12


def test_verify_corrupted_table_fails(tmp_path):
    t = np.array(bns_channel().table)
    t[1, 1] = [[0.2, 0], [0, 1]]
    path = tmp_path / "table.json"
    path.write_text(json.dumps({"re": t.real.tolist(), "im": t.imag.tolist()}))
    out = tmp_path / "v.json"
    assert main(["verify", "--table", str(path), "--out", str(out)]) == 1
    assert not json.loads(out.read_text())["passed"]


def test_run_from_config(states, tmp_path):
    out = tmp_path / "e.csv"
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({
        "command": "evolve", "state": states["plus"], "channel": "bns",
        "hamiltonian": "global-y", "t_min": 0, "t_max": 1, "steps": 3, "out": str(out),
    }))
    assert main(["run", str(cfg)]) == 0
    _, rows = read_csv(out)
    assert rows.shape == (3, 5)


def test_seed_from_environment(tmp_path, monkeypatch):
    paths = []
    for seed_env in ("11", "11", "12"):
        monkeypatch.setenv("CGQ_SEED", seed_env)
        path = tmp_path / f"d{len(paths)}.csv"
        main(["discriminate", "--preset", "fig3", "--steps", "3", "--samples", "5000", "--out", str(path)])
        paths.append(path.read_bytes())
    assert paths[0] == paths[1] != paths[2]
