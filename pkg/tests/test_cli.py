import csv
import json
import math
from pathlib import Path

import numpy as np
import pytest

from relstate import cli
from relstate.cli import ConfigError, load_config, main
from relstate.errors import ContractViolation
from relstate.hilbert import StateVector, save_snapshot

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def write(tmp_path, doc, name="run.json"):
    p = tmp_path / name
    p.write_text(doc if isinstance(doc, str) else json.dumps(doc))
    return p


def rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_cat_branches_alive_column(tmp_path):
    assert main(["--config", str(CONFIGS / "cat_branches.json"), "--out", str(tmp_path), "--quiet"]) == 0
    for r in rows(tmp_path / "cat_weights.csv"):
        t = float(r["t"])
        assert float(r["alive_weight"]) == pytest.approx(math.exp(-t), abs=1e-9)
        assert float(r["alive_weight"]) + float(r["dead_weight"]) == pytest.approx(1.0, abs=1e-9)


def test_born_future_table(tmp_path):
    assert main(["--config", str(CONFIGS / "born_future.json"), "--out", str(tmp_path), "--quiet"]) == 0
    table = {r["m"]: float(r["truth_value"]) for r in rows(tmp_path / "future_01.csv")}
    assert table["1"] == pytest.approx(0.25, abs=1e-9)
    assert table["2"] == pytest.approx(0.75, abs=1e-9)
    assert table["sum"] == pytest.approx(1.0, abs=1e-9)
    doc = json.loads((tmp_path / "future.json").read_text())
    assert [t["t"] for t in doc["tables"]] == [0.5, 1.0]


def test_logic_config(tmp_path):
    assert main(["--config", str(CONFIGS / "three_way_logic.json"), "--out", str(tmp_path), "--quiet"]) == 0
    vals = [float(r["truth_value"]) for r in rows(tmp_path / "logic.csv")]
    assert vals[0] + vals[1] == pytest.approx(1.0, abs=1e-9)
    assert vals[2] == pytest.approx(1.0, abs=1e-9)
    assert vals[3] == 1.0


def test_rabi_evolve_norm_and_energy(tmp_path):
    assert main(["--config", str(CONFIGS / "rabi_evolve.json"), "--out", str(tmp_path), "--quiet"]) == 0
    for r in rows(tmp_path / "evolve.csv"):
        assert float(r["norm"]) == pytest.approx(1.0, abs=1e-12)
    final = StateVector.from_dict(json.loads((tmp_path / "state_final.json").read_text()))
    # |<1|U(3)|0>|^2 = sin^2(3)
    assert abs(final.amplitudes[1]) ** 2 == pytest.approx(math.sin(3.0) ** 2, abs=1e-10)


@pytest.mark.parametrize("name", sorted(p.name for p in CONFIGS.glob("*.json")))
def test_bundled_configs_deterministic(tmp_path, name):
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        assert main(["--config", str(CONFIGS / name), "--out", str(out), "--quiet", "--plot"]) == 0
    files_a = sorted(p.name for p in a.iterdir())
    assert files_a == sorted(p.name for p in b.iterdir())
    for f in files_a:
        assert (a / f).read_bytes() == (b / f).read_bytes(), f


def test_seed_override_changes_sample(tmp_path):
    outs = []
    for seed in ("1", "2"):
        out = tmp_path / seed
        assert main(["--config", str(CONFIGS / "cat_sample.json"), "--out", str(out), "--seed", seed, "--quiet"]) == 0
        outs.append(json.loads((out / "records.json").read_text()))
    assert outs[0]["seed"] == 1 and outs[1]["seed"] == 2
    assert outs[0]["records"] != outs[1]["records"]


def test_plot_flag_writes_svg(tmp_path):
    main(["--config", str(CONFIGS / "cat_branches.json"), "--out", str(tmp_path / "p"), "--plot", "--quiet"])
    main(["--config", str(CONFIGS / "cat_branches.json"), "--out", str(tmp_path / "n"), "--quiet"])
    assert (tmp_path / "p" / "weights.svg").read_text().startswith("<svg")
    assert not (tmp_path / "n" / "weights.svg").exists()


def test_quiet_suppresses_summary(tmp_path, capsys):
    main(["--config", str(CONFIGS / "custom_qubits.json"), "--out", str(tmp_path)])
    assert "[custom/branches]" in capsys.readouterr().out
    main(["--config", str(CONFIGS / "custom_qubits.json"), "--out", str(tmp_path), "--quiet"])
    assert capsys.readouterr().out == ""


# --- errors ----------------------------------------------------------------------


def test_malformed_json_reports_line_col(tmp_path, capsys):
    p = write(tmp_path, '{\n  "model": "cat",\n  "query" "branches"\n}')
    assert main(["--config", str(p), "--out", str(tmp_path / "o")]) == 2
    assert "3:11" in capsys.readouterr().err


@pytest.mark.parametrize(
    "doc, where",
    [
        ({"model": "dog", "query": "evolve", "times": [0]}, "$.model"),
        ({"model": "rabi", "query": "fly", "times": [0]}, "$.query"),
        ({"model": "rabi", "query": "evolve", "times": [1, 0]}, "$.times"),
        ({"model": "cat", "params": {"gamma": 0.5, "bins": 4}, "query": "branches", "times": [0]}, "$.params.t_max"),
        ({"model": "cat", "params": {"gamma": 0.5, "bins": 4, "t_max": 1}, "query": "branches", "times": [2]}, "$.times"),
        ({"model": "rabi", "query": "future", "times": [1]}, "$.perspective"),
        ({"model": "rabi", "query": "future", "times": [1], "perspective": {"N": 5, "t0": 0}}, "$.perspective.N"),
        ({"model": "rabi", "query": "future", "times": [0], "perspective": {"N": 0, "t0": 0}}, "$.times"),
        ({"model": "rabi", "query": "logic", "times": [1], "perspective": {"N": 0, "t0": 0},
          "propositions": ["E(0,1) &"]}, "$.propositions[0]"),
        ({"model": "rabi", "query": "evolve", "times": [0], "initial_state": [1, 0, 0]}, "$.initial_state"),
        ({"model": "custom", "params": {"dims": [2, 2], "hamiltonian": [[0, 1], [1, 0]],
          "initial_state": [1, 0, 0, 0]}, "query": "evolve", "times": [0]}, "$.params.hamiltonian"),
        ({"model": "ideal_measurement", "params": {"coefficients": [1, 1]}, "query": "evolve", "times": [0]},
         "$.params"),
    ],
)
def test_schema_errors_carry_path(doc, where):
    with pytest.raises(ConfigError) as info:
        load_config(json.dumps(doc))
    assert info.value.position == where


def test_bad_config_exit_code(tmp_path):
    p = write(tmp_path, {"model": "rabi", "query": "evolve"})
    assert main(["--config", str(p), "--out", str(tmp_path / "o")]) == 2
    assert main(["--config", str(tmp_path / "missing.json"), "--out", str(tmp_path / "o")]) == 2


def test_contract_violation_exit_code(tmp_path, monkeypatch):
    def broken(cfg, files, plot):
        raise ContractViolation("weights sum to 1.5")

    monkeypatch.setitem(cli.QUERY_FUNCS, "branches", broken)
    out = tmp_path / "o"
    assert main(["--config", str(CONFIGS / "cat_branches.json"), "--out", str(out)]) == 3
    diag = json.loads((out / "diagnostic.json").read_text())
    assert "1.5" in diag["error"] and diag["query"] == "branches"


def test_check_unit_flags_excess():
    with pytest.raises(ContractViolation):
        cli._check_unit([0.6, 0.6], "x")
    cli._check_unit([0.5, 0.5 + 1e-12], "x")


# --- snapshots --------------------------------------------------------------------


def test_snapshot_initial_state(tmp_path):
    state = StateVector(np.array([0.6, 0.8j]))
    save_snapshot(state, tmp_path / "psi.json")
    p = write(tmp_path, {"model": "rabi", "query": "evolve", "times": [0.0, 1.0],
                         "initial_state": {"snapshot": "psi.json"}})
    cfg = load_config(p.read_text(), base=tmp_path)
    np.testing.assert_array_equal(cfg.initial_state.amplitudes, state.amplitudes)
    assert main(["--config", str(p), "--out", str(tmp_path / "o"), "--quiet"]) == 0


def test_snapshot_round_trip_through_evolve(tmp_path):
    out = tmp_path / "o"
    main(["--config", str(CONFIGS / "rabi_evolve.json"), "--out", str(out), "--quiet"])
    p = write(tmp_path, {"model": "rabi", "query": "evolve", "times": [0.0],
                         "initial_state": {"snapshot": "o/state_final.json"}})
    main(["--config", str(p), "--out", str(tmp_path / "o2"), "--quiet"])
    first = json.loads((out / "state_final.json").read_text())
    second = json.loads((tmp_path / "o2" / "state_final.json").read_text())
    np.testing.assert_allclose(np.array(second["amplitudes"]), np.array(first["amplitudes"]), atol=1e-15)


def test_truncated_snapshot(tmp_path):
    (tmp_path / "psi.json").write_text('{"dim": 2, "amplitudes": [[1.0, 0')
    p = write(tmp_path, {"model": "rabi", "query": "evolve", "times": [0.0],
                         "initial_state": {"snapshot": "psi.json"}})
    with pytest.raises(ConfigError) as info:
        load_config(p.read_text(), base=tmp_path)
    assert info.value.position == "$.initial_state.snapshot"
    assert main(["--config", str(p), "--out", str(tmp_path / "o")]) == 2


def test_snapshot_dim_mismatch(tmp_path):
    save_snapshot(StateVector(np.array([1.0, 0, 0, 0])), tmp_path / "psi.json")
    p = write(tmp_path, {"model": "rabi", "query": "evolve", "times": [0.0],
                         "initial_state": {"snapshot": "psi.json"}})
    with pytest.raises(ConfigError, match="dim"):
        load_config(p.read_text(), base=tmp_path)
