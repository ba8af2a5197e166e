import json
import math
import shutil
from pathlib import Path

import numpy as np
import pytest

from pqwolff.cli import main
from pqwolff.config import ConfigError, parse_config

CONFIGS = Path(__file__).resolve().parents[1] / "configs"


def write(tmp_path, text, name="cfg.yaml"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def read_csv(path):
    return np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)


def test_wolff_newtonian(tmp_path, capsys):
    code, _, _ = run(capsys, "wolff", "--config", str(CONFIGS / "newtonian_atom.yaml"), "--out", str(tmp_path), "--quiet")
    assert code == 0
    data = read_csv(tmp_path / "wolff_profile.csv")
    assert data.shape == (400, 2)
    assert np.allclose(data[:, 1], 1 / (2 * data[:, 0]), rtol=1e-6)
    meta = json.loads((tmp_path / "wolff_meta.json").read_text())
    assert meta["n"] == 3 and meta["radial"] is True


def test_wolff_zero_measure(tmp_path, capsys):
    code, _, _ = run(capsys, "wolff", "--config", str(CONFIGS / "zero_measure.yaml"), "--out", str(tmp_path))
    assert code == 0
    assert np.all(read_csv(tmp_path / "wolff_profile.csv")[:, 1] == 0.0)


def test_regime_error_exit_code(tmp_path, capsys):
    code, _, err = run(capsys, "wolff", "--config", str(CONFIGS / "regime_error.yaml"), "--out", str(tmp_path))
    assert code == 3
    assert json.loads(err)["error"]["code"] == "regime"


def test_inadmissible_gamma_exit_code(capsys):
    code, out, err = run(capsys, "constants", "--config", str(CONFIGS / "bad_gamma.yaml"))
    assert code == 2 and out == ""
    assert json.loads(err)["error"]["type"] == "DomainError"


def test_constants_stdout(capsys):
    code, out, _ = run(capsys, "constants", "--config", str(CONFIGS / "constants.yaml"))
    d = json.loads(out)
    assert code == 0
    assert d["lambda"] == pytest.approx(0.0061728395061728, rel=1e-12)
    assert d["delta_limit"] == pytest.approx(4 / 3)


def test_check_atom_divergent(tmp_path, capsys):
    code, _, _ = run(capsys, "check", "--config", str(CONFIGS / "conditions_atom.yaml"), "--out", str(tmp_path))
    assert code == 3
    assert json.loads((tmp_path / "conditions.json").read_text())["status"] == "divergent"


def test_unknown_key_rejected(tmp_path, capsys):
    cfg = write(tmp_path, "nfunction: {p: 2, q: 3, n: 3}\nmeasure: {atoms: []}\nwolf: {A: 1}\n")
    code, _, err = run(capsys, "wolff", "--config", cfg, "--out", str(tmp_path))
    assert code == 2 and json.loads(err)["error"]["code"] == "validation"


def test_missing_file_and_bad_yaml(tmp_path, capsys):
    code, _, err = run(capsys, "wolff", "--config", str(tmp_path / "nope.yaml"))
    assert code == 2 and "error" in json.loads(err)
    code, _, err = run(capsys, "wolff", "--config", write(tmp_path, "nfunction: [1, 2\n"))
    assert code == 2 and "error" in json.loads(err)


def test_command_mismatch(tmp_path, capsys):
    code, _, err = run(capsys, "solve", "--config", str(CONFIGS / "constants.yaml"), "--out", str(tmp_path))
    assert code == 2


def test_solve_nonconvergence_exit_code(tmp_path, capsys):
    cfg = write(tmp_path, """
nfunction: {p: 2, q: 3, n: 3}
gamma: 0.25
measure: {densities: [{kind: constant, radius: 1.0, c: 0.01}]}
iteration: {max_iters: 2}
grid: {r_min: 0.01, r_max: 100, points: 21}
""")
    code, _, _ = run(capsys, "solve", "--config", cfg, "--out", str(tmp_path), "--quiet")
    assert code == 4
    rows = [json.loads(x) for x in (tmp_path / "iterations.jsonl").read_text().splitlines()]
    assert len(rows) == 3 and rows[-1]["kind"] == "summary" and rows[-1]["converged"] is False


def test_solve_atom_unsupported(tmp_path, capsys):
    cfg = write(tmp_path, "nfunction: {p: 2, q: 3, n: 3}\ngamma: 0.25\nmeasure: {atoms: [{position: [0,0,0], mass: 1}]}\n")
    code, _, err = run(capsys, "solve", "--config", cfg, "--out", str(tmp_path))
    assert code == 2 and json.loads(err)["error"]["code"] == "unsupported"


def test_verify_failure_exit_code(tmp_path, capsys):
    cfg = write(tmp_path, """
nfunction: {p: 2, q: 3, n: 4}
measure: {densities: [{kind: constant, radius: 1.0}]}
verify: {suite: [truncated_center_bound], bound: 1.0e-6}
""")
    code, _, _ = run(capsys, "verify", "--config", cfg, "--out", str(tmp_path), "--quiet")
    assert code == 1
    assert json.loads((tmp_path / "verify.json").read_text())["pass"] is False


def test_wolff_off_axis_atom(tmp_path, capsys):
    cfg = write(tmp_path, """
nfunction: {p: 2, q: 2, n: 3}
measure: {atoms: [{position: [2.0, 0, 0], mass: 1.0}]}
grid: {r_min: 0.5, r_max: 1.5, points: 3}
""")
    code, _, _ = run(capsys, "wolff", "--config", cfg, "--out", str(tmp_path))
    data = read_csv(tmp_path / "wolff_profile.csv")
    assert code == 0
    assert np.allclose(data[:, 1], 1 / (2 * np.abs(2.0 - data[:, 0])), rtol=1e-9)


def test_wolff_wp_kind(tmp_path, capsys):
    cfg = write(tmp_path, """
nfunction: {p: 2, q: 3, n: 3}
measure: {atoms: [{position: [0, 0, 0], mass: 1.0}]}
wolff: {kind: Wp}
grid: {r_min: 0.5, r_max: 2.0, points: 3}
""")
    run(capsys, "wolff", "--config", cfg, "--out", str(tmp_path))
    data = read_csv(tmp_path / "wolff_profile.csv")
    assert np.allclose(data[:, 1], 1 / data[:, 0], rtol=1e-9)


@pytest.mark.parametrize("raw", [
    {"nfunction": {"p": 2, "n": 3, "r": 1}},
    {"nfunction": {"p": "two", "n": 3}},
    {"nfunction": {"p": 2, "n": 3.5}},
    {"measure": {"atoms": []}},
    {"command": "plot"},
    {"nfunction": {"p": 2, "n": 3}, "measure": {"densities": [{"kind": "constant"}]}},
    {"wolff": {"kind": "Wz"}},
    {"check": {"conditions": ["all"]}},
    {"verify": {"suite": ["everything"]}},
    {"grid": {"points": True}},
])
def test_config_validation(raw):
    with pytest.raises(ConfigError):
        parse_config(raw)


def test_config_accepts_infinity_and_auto():
    cfg = parse_config({"nfunction": {"p": 2, "q": 3, "n": 3}, "wolff": {"R": "inf", "A": "n_omega_n"},
                        "iteration": {"epsilon": "auto"}})
    assert math.isinf(cfg.wolff.R) and cfg.epsilon == "auto"


def test_every_shipped_config_parses():
    from pqwolff.config import load_config
    for p in sorted(CONFIGS.glob("*.yaml")):
        if p.name == "bad_gamma.yaml":
            continue
        load_config(p)
