"""Command-line interface: subcommands, formats, exit codes, round trips."""

import json
from pathlib import Path

import numpy as np

from qdarwin import NoiseConfig, maximally_mixed, prepare_initial_isbs, prepare_initial_sqd, sqd_layout
from qdarwin.cli import main
from qdarwin.protocol import DEFAULT_SEED
from qdarwin.serialize import (
    load_state,
    report_from_json,
    save_state,
    state_from_dict,
    state_to_dict,
)

REPO_ROOT = Path(__file__).resolve().parent.parent


def write_config(tmp_path, name, payload):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return str(path)


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# ---------------------------------------------------------------------------
# witness
# ---------------------------------------------------------------------------

def test_witness_objective_config(tmp_path, capsys):
    cfg = write_config(tmp_path, "w.json", {
        "framework": "SQD", "fragment": ["E1"],
        "noise": {"p": 0.0}, "shots": 0,
    })
    code, out, _ = run_cli(capsys, "witness", "--config", cfg)
    assert code == 0
    report = json.loads(out)
    assert report["measure"] == 0.0
    assert report["witness_max_subset"] == 0.0


def test_witness_noise_config(tmp_path, capsys):
    cfg = write_config(tmp_path, "w.json", {
        "framework": "SQD", "fragment": ["E1"],
        "noise": {"p": 0.4}, "shots": 0,
    })
    code, out, _ = run_cli(capsys, "witness", "--config", cfg)
    assert code == 0
    assert abs(json.loads(out)["measure"] - 0.2) < 1e-9


def test_witness_monte_carlo_byte_identical(tmp_path, capsys):
    cfg = write_config(tmp_path, "w.json", {
        "framework": "SQD", "fragment": ["E1"],
        "noise": {"p": 0.3}, "shots": 6000, "seed": 7,
    })
    code1, out1, _ = run_cli(capsys, "witness", "--config", cfg)
    code2, out2, _ = run_cli(capsys, "witness", "--config", cfg)
    assert code1 == code2 == 0
    assert out1 == out2


def test_witness_report_round_trip(tmp_path, capsys):
    cfg = write_config(tmp_path, "w.json", {
        "framework": "SQD", "fragment": ["E1"],
        "noise": {"p": 0.2}, "shots": 800, "seed": 4,
    })
    _, out, _ = run_cli(capsys, "witness", "--config", cfg)
    report = report_from_json(out)
    assert json.loads(out) == report.to_dict()


def test_witness_default_seed_is_fixed(tmp_path, capsys):
    cfg = write_config(tmp_path, "w.json", {
        "framework": "SQD", "fragment": ["E1"], "shots": 0,
    })
    _, out, _ = run_cli(capsys, "witness", "--config", cfg)
    assert json.loads(out)["seed"] == DEFAULT_SEED


def test_witness_seed_flag_overrides(tmp_path, capsys):
    cfg = write_config(tmp_path, "w.json", {
        "framework": "SQD", "fragment": ["E1"], "shots": 0, "seed": 5,
    })
    _, out, _ = run_cli(capsys, "witness", "--config", cfg, "--seed", "12")
    assert json.loads(out)["seed"] == 12


def test_witness_malformed_config_names_field(tmp_path, capsys):
    cfg = write_config(tmp_path, "bad.json", {
        "framework": "SQD", "fragment": ["E1"],
        "noise": {"p": 1.7}, "shots": 0,
    })
    code, _, err = run_cli(capsys, "witness", "--config", cfg)
    assert code == 2
    assert "noise" in err


def test_witness_nontermination_exit_code(tmp_path, capsys):
    cfg = write_config(tmp_path, "w.json", {
        "framework": "SQD", "fragment": ["E1", "E2"],
        "noise": {"p_cnot": 0.005}, "shots": 50, "seed": 2,
    })
    code, _, err = run_cli(capsys, "witness", "--config", cfg)
    assert code == 4
    assert "aborted" in err


def test_witness_csv_format(tmp_path, capsys):
    cfg = write_config(tmp_path, "w.json", {
        "framework": "SQD", "fragment": ["E1"], "noise": {"p": 0.4},
    })
    code, out, _ = run_cli(capsys, "witness", "--config", cfg, "--format", "csv")
    assert code == 0
    rows = [line for line in out.splitlines() if line and not line.startswith("#")]
    assert rows[0].startswith("p,fragment,")
    assert rows[1].startswith("0.4,E1,")


# ---------------------------------------------------------------------------
# sweep
# ---------------------------------------------------------------------------

def parse_csv(text):
    lines = [l for l in text.splitlines() if l and not l.startswith("#")]
    header = lines[0].split(",")
    rows = []
    for line in lines[1:]:
        cells = line.split(",")
        rows.append(dict(zip(header, cells)))
    return rows


def test_sweep_closed_form_law(tmp_path, capsys):
    cfg = write_config(tmp_path, "s.json", {
        "framework": "SQD", "noise_mode": "mix_global",
        "p_values": [round(0.1 * k, 10) for k in range(11)],
        "fragments": [["E1"], ["E1", "E2"]],
        "shots": 0,
    })
    code, out, _ = run_cli(capsys, "sweep", "--config", cfg)
    assert code == 0
    rows = parse_csv(out)
    assert len(rows) == 22
    for row in rows:
        if row["fragment"] == "E1":
            assert abs(float(row["measure"]) - float(row["p"]) / 2) < 1e-9


def test_sweep_csv_is_lossfree(tmp_path, capsys):
    cfg = write_config(tmp_path, "s.json", {
        "framework": "SQD", "noise_mode": "mix_global",
        "p_values": [0.0, 1 / 3, 2 / 3], "fragments": [["E1"]], "shots": 0,
    })
    _, out, _ = run_cli(capsys, "sweep", "--config", cfg)
    rows = parse_csv(out)
    # repr round-trip: parsing the cell recovers the exact float.
    from qdarwin import ProtocolConfig, witness_exact
    for row in rows:
        p = float(row["p"])
        exact = witness_exact(ProtocolConfig(
            framework="SQD", fragment=("E1",), noise=NoiseConfig(p=p)))
        assert float(row["measure"]) == exact.measure
        assert float(row["witness_max_subset"]) == exact.witness_max_subset


def test_sweep_rejects_empty_p_values(tmp_path, capsys):
    cfg = write_config(tmp_path, "s.json", {
        "framework": "SQD", "noise_mode": "mix_global",
        "p_values": [], "fragments": [["E1"]],
    })
    code, _, err = run_cli(capsys, "sweep", "--config", cfg)
    assert code == 2
    assert "p_values" in err


def test_sweep_rejects_unsorted_p_values(tmp_path, capsys):
    cfg = write_config(tmp_path, "s.json", {
        "framework": "SQD", "noise_mode": "mix_global",
        "p_values": [0.5, 0.1], "fragments": [["E1"]],
    })
    code, _, err = run_cli(capsys, "sweep", "--config", cfg)
    assert code == 2


def test_sweep_writes_file(tmp_path, capsys):
    out_path = tmp_path / "rows.csv"
    cfg = write_config(tmp_path, "s.json", {
        "framework": "SQD", "noise_mode": "mix_global",
        "p_values": [0.0, 0.5], "fragments": [["E1"]], "shots": 0,
        "output_path": str(out_path),
    })
    code, out, _ = run_cli(capsys, "sweep", "--config", cfg)
    assert code == 0
    assert out == ""
    assert out_path.exists()
    assert len(parse_csv(out_path.read_text())) == 2


def test_sweep_unwritable_path(tmp_path, capsys):
    cfg = write_config(tmp_path, "s.json", {
        "framework": "SQD", "noise_mode": "mix_global",
        "p_values": [0.0], "fragments": [["E1"]], "shots": 0,
    })
    code, _, err = run_cli(capsys, "sweep", "--config", cfg,
                           "--out", str(tmp_path / "missing" / "out.csv"))
    assert code == 2
    assert "cannot write" in err


def test_sweep_isbs_families(tmp_path, capsys):
    cfg = write_config(tmp_path, "s.json", {
        "framework": "ISBS", "noise_mode": "mix_global",
        "p_values": [round(0.2 * k, 10) for k in range(6)],
        "fragments": [["E1"], ["E1", "E2"], ["E1", "E2", "E3"],
                      ["E1", "E2", "E3", "E4"]],
        "shots": 0,
    })
    code, out, _ = run_cli(capsys, "sweep", "--config", cfg)
    assert code == 0
    rows = parse_csv(out)
    assert len(rows) == 24
    families = {}
    for row in rows:
        families.setdefault(row["fragment"], []).append(
            (float(row["p"]), float(row["measure"]), float(row["witness_max_subset"])))
    # The full-fragment measure decreases with noise and always dominates the
    # witness; the witness itself is V-shaped (it rides the projected
    # branch's null mass once every outcome difference turns positive).
    full = sorted(families["E1+E2+E3+E4"])
    assert all(full[k][1] >= full[k + 1][1] - 1e-9 for k in range(len(full) - 1))
    for p, measure, witness in full:
        assert witness <= measure + 1e-9
        expected = 0.5 - p / 32 if p < 16 / 31 else 15 * p / 16
        assert abs(witness - expected) < 1e-9
    # Reduced fragments: the witness saturates the measure at every point.
    for name in ("E1", "E1+E2", "E1+E2+E3"):
        for _, measure, witness in families[name]:
            assert abs(measure - witness) < 1e-9


# ---------------------------------------------------------------------------
# check
# ---------------------------------------------------------------------------

def test_check_shipped_branching_state(capsys):
    code, out, _ = run_cli(
        capsys, "check", "--state", str(REPO_ROOT / "states" / "sqd_initial.json"),
        "--subspace", "parity2", "--fragment", "E1")
    assert code == 0
    verdict = json.loads(out)
    assert verdict["sqd"] is True and verdict["qd"] is True


def test_check_ghz_full_environment(capsys):
    code, out, _ = run_cli(
        capsys, "check", "--state", str(REPO_ROOT / "states" / "ghz5.json"),
        "--subspace", "computational")
    assert code == 0
    verdict = json.loads(out)
    assert verdict["qd"] is True
    assert verdict["sqd"] is False


def test_check_maximally_mixed(capsys):
    code, out, _ = run_cli(
        capsys, "check", "--state",
        str(REPO_ROOT / "states" / "maximally_mixed_sqd.json"),
        "--subspace", "parity2", "--fragment", "E1")
    assert code == 0
    assert json.loads(out)["qd"] is False


def test_check_with_custom_subspace_file(tmp_path, capsys):
    # Parity partition rebuilt from spanning vectors should reproduce the
    # preset verdict on the shipped branching state.
    spec_payload = {
        "system_label": "S",
        "environments": {"E1": ["E1_1", "E1_2"], "E2": ["E2_1", "E2_2"]},
        "basis_vectors": {
            "E1": [
                [[[1, 0], [0, 0], [0, 0], [0, 0]], [[0, 0], [0, 0], [0, 0], [1, 0]]],
                [[[0, 0], [1, 0], [0, 0], [0, 0]], [[0, 0], [0, 0], [1, 0], [0, 0]]],
            ],
            "E2": [
                [[[1, 0], [0, 0], [0, 0], [0, 0]], [[0, 0], [0, 0], [0, 0], [1, 0]]],
                [[[0, 0], [1, 0], [0, 0], [0, 0]], [[0, 0], [0, 0], [1, 0], [0, 0]]],
            ],
        },
    }
    spec_path = tmp_path / "spec.json"
    spec_path.write_text(json.dumps(spec_payload))
    code, out, _ = run_cli(
        capsys, "check", "--state", str(REPO_ROOT / "states" / "sqd_initial.json"),
        "--subspace", str(spec_path), "--fragment", "E1")
    assert code == 0
    assert json.loads(out)["sqd"] is True


def test_check_rejects_invalid_state(tmp_path, capsys):
    bad = {
        "layout": [["S", 2]],
        "matrix": [[[0.9, 0.0], [0.4, 0.0]], [[0.1, 0.0], [0.1, 0.0]]],
    }
    path = tmp_path / "bad_state.json"
    path.write_text(json.dumps(bad))
    code, _, err = run_cli(capsys, "check", "--state", str(path))
    assert code == 3
    assert "Hermitian" in err


# ---------------------------------------------------------------------------
# cost
# ---------------------------------------------------------------------------

def test_cost_table(capsys):
    code, out, _ = run_cli(capsys, "cost", "--m-envs", "1", "--c", "1000",
                           "--p-cnot", "0.5")
    assert code == 0
    assert "27000" in out
    assert "5000" in out
    assert "yes" in out


def test_cost_crossover_with_fidelity(capsys):
    code, out, _ = run_cli(capsys, "cost", "--m-envs", "1", "--c", "1000",
                           "--p-cnot", "0.5", "--f-cnot", "0.79",
                           "--format", "json")
    assert code == 0
    payload = json.loads(out)
    assert 0.41 <= payload["crossover_p"] <= 0.43


def test_cost_large_fragment_break_even(capsys):
    code, out, _ = run_cli(capsys, "cost", "--m-envs", "8", "--c", "100",
                           "--p-cnot", "0.34", "--format", "json")
    assert code == 0
    assert json.loads(out)["witness_wins"] is True


# ---------------------------------------------------------------------------
# State file round trips
# ---------------------------------------------------------------------------

def test_state_file_round_trip(tmp_path):
    rho = prepare_initial_sqd(NoiseConfig(p=0.3))
    path = tmp_path / "state.json"
    save_state(rho, path)
    back = load_state(path)
    assert back.layout.subsystems == rho.layout.subsystems
    assert np.array_equal(back.matrix, rho.matrix)


def test_state_dict_round_trip():
    rho = prepare_initial_isbs(NoiseConfig(p=0.1))
    assert np.array_equal(state_from_dict(state_to_dict(rho)).matrix, rho.matrix)


def test_shipped_states_match_generators():
    shipped = load_state(REPO_ROOT / "states" / "sqd_initial.json")
    assert np.max(np.abs(
        shipped.matrix - prepare_initial_sqd(NoiseConfig()).matrix)) < 1e-15
    shipped_ghz = load_state(REPO_ROOT / "states" / "ghz5.json")
    assert np.max(np.abs(
        shipped_ghz.matrix - prepare_initial_isbs(NoiseConfig()).matrix)) < 1e-15
    shipped_mm = load_state(REPO_ROOT / "states" / "maximally_mixed_sqd.json")
    assert np.max(np.abs(
        shipped_mm.matrix - maximally_mixed(sqd_layout()).matrix)) < 1e-15
