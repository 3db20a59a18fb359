import csv
import json

import numpy as np
import pytest

from betheprod import io
from betheprod.bethe import find_state
from betheprod.cli import RunConfig, main, run


@pytest.fixture
def files(tmp_path, xxx6):
    model = tmp_path / "model.json"
    io.write_json(model, io.model_to_json(xxx6))
    state = find_state(xxx6, 2, rng=4)
    u = tmp_path / "u.json"
    io.write_json(u, io.state_to_json(state))
    v = tmp_path / "v.json"
    io.write_json(v, {"roots": [0.7 + 0.1j, -0.5 - 0.3j]})
    return {"model": str(model), "u": str(u), "v": str(v), "dir": tmp_path, "state": state}


def read(path):
    with open(path) as fh:
        return json.load(fh)


def test_solve_bethe(files, tmp_path):
    out = tmp_path / "solved.json"
    guess = tmp_path / "guess.json"
    io.write_json(guess, {"roots": list(files["state"].u * (1 + 1e-3))})
    assert main(["solve-bethe", "--model", files["model"], "--guess", str(guess),
                 "--out", str(out)]) == 0
    data = read(out)
    assert data["on_shell"] and data["residual"] < 1e-12


def test_solve_bethe_negative_modes(tmp_path):
    model = tmp_path / "m.json"
    io.write_json(model, {"type": "inhomogeneous_xxx", "theta": [0] * 8, "kappa": 1, "epsilon": 1})
    out = tmp_path / "s.json"
    assert main(["solve-bethe", "--model", str(model), "--modes=-1,1", "--out", str(out)]) == 0
    assert read(out)["mode_numbers"] == [-1, 1]


def test_scalar_product_all_methods(files, tmp_path):
    out = tmp_path / "sp.json"
    assert main(["scalar-product", "--model", files["model"], "--u", files["u"], "--v", files["v"],
                 "--out", str(out)]) == 0
    data = read(out)
    assert set(data["methods"]) == {"ratio", "fredholm", "coulomb"}
    assert max(data["pairwise_relative_deviation"].values()) < 1e-10
    assert data["on_shell"] and "warning" not in data


def test_oracle_check(files, tmp_path):
    out = tmp_path / "oc.json"
    assert main(["oracle-check", "--model", files["model"], "--u", files["u"], "--v", files["v"],
                 "--out", str(out)]) == 0
    data = read(out)
    assert data["passed"] and data["relative_deviation"] < 1e-10
    assert data["transfer_defect"] < 1e-10


def test_verify_identities_and_mutation(tmp_path):
    out = tmp_path / "vi.json"
    assert main(["verify-identities", "--instances", "12", "--oracle-instances", "1",
                 "--out", str(out)]) == 0
    assert read(out)["passed"]
    assert main(["verify-identities", "--instances", "12", "--oracle-instances", "0",
                 "--flip-epsilon", "--out", str(out)]) == 1
    props = {p["name"]: p for p in read(out)["properties"]}
    assert not props["ratio_vs_fredholm"]["passed"]
    assert props["coulomb_vs_fredholm"]["passed"]


def test_outputs_are_deterministic(files, tmp_path):
    texts = []
    for k in range(2):
        out = tmp_path / f"run{k}.json"
        main(["verify-identities", "--instances", "6", "--oracle-instances", "1", "--seed", "3",
              "--out", str(out)])
        texts.append(out.read_bytes())
    assert texts[0] == texts[1]


def test_semiclassical_compare_writes_full_table(tmp_path, xxx6):
    family = tmp_path / "family.json"
    io.write_json(family, {"generator": "one_cut", "M": [4, 8]})
    out = tmp_path / "table.csv"
    status = main(["semiclassical-compare", "--family", str(family), "--nodes", "128",
                   "--out", str(out)])
    with open(out) as fh:
        rows = list(csv.DictReader(fh))
    assert [r["M"] for r in rows] == ["4", "8"]
    assert "residual_subleading" in rows[0]
    # members that fail are reported in the table and in the exit status
    assert status == (3 if any(r["error"] for r in rows) else 0)


def test_config_errors(tmp_path, capsys):
    assert main(["no-such-command"]) == 2
    assert main(["solve-bethe", "--model", str(tmp_path / "missing.json"), "--modes=1"]) == 2
    err = capsys.readouterr().err
    assert "config_invalid" in err or "ConfigInvalid" in err or "error" in err
    assert run(RunConfig("bogus")) == 2


def test_numerical_error_status(tmp_path):
    model = tmp_path / "m.json"
    io.write_json(model, {"type": "inhomogeneous_xxx", "theta": [0] * 12, "kappa": 1, "epsilon": 1})
    out = tmp_path / "s.json"
    # these modes collapse two roots, which the solver rejects
    assert main(["solve-bethe", "--model", str(model), "--modes=-1,1,-2", "--out", str(out)]) == 3
    assert read(out)["error"]


def test_off_shell_input_is_flagged(files, tmp_path, xxx6):
    off = tmp_path / "off.json"
    io.write_json(off, {"roots": list(files["state"].u + 0.05)})
    out = tmp_path / "sp.json"
    assert main(["scalar-product", "--model", files["model"], "--u", str(off), "--v", files["v"],
                 "--method", "fredholm", "--out", str(out)]) == 0
    data = read(out)
    assert not data["on_shell"] and "warning" in data
    assert np.isfinite(data["methods"]["fredholm"]["value"][0])
