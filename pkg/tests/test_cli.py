import json

import numpy as np
import pytest

from micrep.cli import main
from micrep.serialize import complex_to_pairs, load_json


def run_cli(*argv):
    return main(list(argv))


@pytest.fixture()
def sic_file(tmp_path):
    path = tmp_path / "sic.json"
    assert run_cli("frame", "build-sic", "--dim", "2", "--out", str(path)) == 0
    return path


def test_build_sic_and_validate(sic_file, capsys):
    assert run_cli("frame", "validate", str(sic_file)) == 0
    out = capsys.readouterr().out
    assert "valid MIC-POVM frame" in out


def test_build_sic_wrong_dim_is_validation_error(tmp_path):
    assert run_cli("frame", "build-sic", "--dim", "3",
                   "--out", str(tmp_path / "x.json")) == 3


def test_frame_tensor(sic_file, tmp_path, capsys):
    out = tmp_path / "prod.json"
    assert run_cli("frame", "tensor", str(sic_file), str(sic_file),
                   "--out", str(out)) == 0
    obj = load_json(out)
    assert obj["dim"] == 4
    assert len(obj["effects"]) == 16


def test_frame_validate_malformed(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"dim": 2, "effects": []}))
    assert run_cli("frame", "validate", str(bad)) == 3


def test_unknown_subcommand_exits_2(capsys):
    with pytest.raises(SystemExit) as exc:
        run_cli("frame", "frobnicate")
    assert exc.value.code == 2


def test_state_check_verdict_is_data(sic_file, tmp_path, capsys):
    state = tmp_path / "corner.json"
    state.write_text(json.dumps({"frame": load_json(sic_file),
                                 "p": [1.0, 0.0, 0.0, 0.0]}))
    assert run_cli("state", "check", str(state)) == 0
    assert "not physical" in capsys.readouterr().out


def test_state_roundtrip_through_cli(sic_file, tmp_path, capsys):
    rho = np.array([[1.0, 0.0], [0.0, 0.0]], dtype=complex)
    state = tmp_path / "zero.json"
    state.write_text(json.dumps({"frame": load_json(sic_file),
                                 "rho": complex_to_pairs(rho)}))
    out = tmp_path / "p.json"
    assert run_cli("state", "to-prob", str(state), "--out", str(out)) == 0
    p = np.array(load_json(out)["p"])
    r3 = np.sqrt(3.0)
    assert np.abs(p - np.array([3 + r3, 3 + r3, 3 - r3, 3 - r3]) / 12).max() <= 1e-12
    assert run_cli("state", "purity", str(out)) == 0
    assert "pure" in capsys.readouterr().out


def test_channel_commands(sic_file, tmp_path, capsys):
    chan = tmp_path / "chan.json"
    h = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
    chan.write_text(json.dumps({"kraus": [complex_to_pairs(h)],
                                "in_frame": load_json(sic_file)}))
    out = tmp_path / "pstoch.json"
    assert run_cli("channel", "to-pstoch", str(chan), "--out", str(out)) == 0
    assert run_cli("channel", "check", str(chan)) == 0
    assert "CPTP" in capsys.readouterr().out
    state = tmp_path / "zero.json"
    state.write_text(json.dumps({"frame": load_json(sic_file),
                                 "p": [0.39433757, 0.39433757,
                                       0.10566243, 0.10566243]}))
    assert run_cli("channel", "apply", str(chan), str(state),
                   "--out", str(tmp_path / "out.json")) == 0
    assert run_cli("channel", "choi", str(chan),
                   "--out", str(tmp_path / "choi.json")) == 0


def test_measure_commands(sic_file, tmp_path, capsys):
    meas = tmp_path / "meas.json"
    p0 = [[[1, 0], [0, 0]], [[0, 0], [0, 0]]]
    p1 = [[[0, 0], [0, 0]], [[0, 0], [1, 0]]]
    meas.write_text(json.dumps({"frame": load_json(sic_file),
                                "effects": [p0, p1], "labels": ["0", "1"]}))
    state = tmp_path / "state.json"
    state.write_text(json.dumps({"frame": load_json(sic_file),
                                 "p": [0.25, 0.25, 0.25, 0.25]}))
    assert run_cli("measure", "probs", str(meas), str(state)) == 0
    out = capsys.readouterr().out
    values = dict(line.split(",") for line in out.strip().splitlines())
    assert abs(float(values["0"]) - 0.5) <= 1e-12
    assert abs(float(values["1"]) - 0.5) <= 1e-12
    assert run_cli("measure", "check", str(meas)) == 0
    assert "valid measurement" in capsys.readouterr().out
    obs = tmp_path / "obs.json"
    obs.write_text(json.dumps({"frame": load_json(sic_file),
                               "operator": complex_to_pairs(np.diag([1., -1.]))}))
    assert run_cli("measure", "mean", str(obs), str(state)) == 0
    assert abs(float(capsys.readouterr().out)) <= 1e-9


def test_dyn_commands(sic_file, tmp_path, capsys):
    model = tmp_path / "model.json"
    model.write_text(json.dumps({
        "frame": load_json(sic_file),
        "hamiltonian": complex_to_pairs(np.diag([0.5, -0.5])),
        "noise_ops": [complex_to_pairs(np.diag([1.0, -1.0]) / 2)],
    }))
    gen = tmp_path / "gen.json"
    assert run_cli("dyn", "generator", str(model), "--out", str(gen)) == 0
    assert run_cli("dyn", "check-generator", str(model)) == 0
    assert "valid GKSL generator" in capsys.readouterr().out
    state = tmp_path / "state.json"
    state.write_text(json.dumps({"frame": load_json(sic_file),
                                 "p": [0.25, 0.25, 0.25, 0.25]}))
    out = tmp_path / "evolved.json"
    assert run_cli("dyn", "evolve", str(model), str(state), "--t", "0.5",
                   "--out", str(out)) == 0
    assert np.abs(np.array(load_json(out)["p"]) - 0.25).max() <= 1e-9
    assert run_cli("dyn", "project-unitary", str(gen),
                   "--out", str(tmp_path / "proj.json")) == 0


def test_dyn_table_deterministic(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run_cli("dyn", "table", "--t", "0.3", "--out", str(a)) == 0
    assert run_cli("dyn", "table", "--t", "0.3", "--out", str(b)) == 0
    assert a.read_bytes() == b.read_bytes()
    assert a.read_text().startswith("channel,row,")


def test_circuit_run_and_trace(tmp_path, capsys):
    prog = tmp_path / "grover.json"
    prog.write_text(json.dumps({
        "n": 2,
        "ops": [{"gate": "h", "targets": [0]}, {"gate": "h", "targets": [1]},
                {"gate": "u", "targets": [0, 1],
                 "unitary": complex_to_pairs(np.diag([1, 1, -1, 1]))},
                {"gate": "u", "targets": [0, 1],
                 "unitary": complex_to_pairs(np.full((4, 4), 0.5) - np.eye(4))},
                {"measure": [0, 1]}],
    }))
    trace = tmp_path / "trace.csv"
    out = tmp_path / "counts.csv"
    assert run_cli("circuit", "run", str(prog), "--shots", "1024", "--seed", "7",
                   "--emit-trace", str(trace), "--out", str(out)) == 0
    printed = capsys.readouterr().out
    assert "10,1" in printed
    assert out.read_text().strip().splitlines()[1] == "10,1024"
    lines = trace.read_text().strip().splitlines()
    assert len(lines) == 1 + 6  # header, init, 4 gates, measure


def test_circuit_run_determinism(tmp_path):
    prog = tmp_path / "h.json"
    prog.write_text(json.dumps({"n": 1, "ops": [{"gate": "h", "targets": [0]},
                                                {"measure": [0]}]}))
    outs = []
    for name in ("a.csv", "b.csv"):
        out = tmp_path / name
        assert run_cli("circuit", "run", str(prog), "--shots", "100",
                       "--seed", "42", "--out", str(out)) == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]


def test_circuit_gate_table(tmp_path):
    out = tmp_path / "h.csv"
    assert run_cli("circuit", "gate-table", "--gate", "h", "--out", str(out)) == 0
    rows = out.read_text().strip().splitlines()
    assert len(rows) == 5
    values = np.array([[float(v) for v in r.split(",")[1:]] for r in rows[1:]])
    assert values.min() <= -0.01


def test_classicality_tau_crit_cli(tmp_path, capsys):
    out = tmp_path / "tc.csv"
    assert run_cli("classicality", "tau-crit", "--kind", "depol",
                   "--theta", "0.3", "--family", "sic", "--seed", "7",
                   "--restarts", "8", "--max-iterations", "200",
                   "--tau-tol", "0.02", "--out", str(out)) == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "theta,tau_crit,family,kind,seed,evaluations"
    tau = float(lines[1].split(",")[1])
    assert abs(tau - 0.5) <= 0.04


def test_classicality_scan_determinism(tmp_path):
    outs = []
    for name in ("s1.csv", "s2.csv"):
        out = tmp_path / name
        assert run_cli("classicality", "scan", "--kind", "depol",
                       "--theta-grid", "0:1.5:2", "--family", "sic",
                       "--seed", "11", "--restarts", "6",
                       "--max-iterations", "150", "--tau-tol", "0.02",
                       "--out", str(out)) == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]


def test_bad_grid_spec_is_usage_like_error():
    assert main(["classicality", "scan", "--kind", "depol",
                 "--theta-grid", "oops", "--family", "sic"]) == 3
