import json
import math

import numpy as np
import pytest

from betheprod import io
from betheprod.bethe import find_state
from betheprod.errors import ConfigInvalid
from betheprod.model import InhomogeneousXXXModel


def test_complex_round_trip_is_exact(rng):
    values = list(rng.normal(size=10) + 1j * rng.normal(size=10))
    back = io.parse_complex_list(json.loads(io.dumps(values)))
    assert np.array_equal(back, np.array(values))


def test_nan_written_as_null():
    assert json.loads(io.dumps({"x": math.nan})) == {"x": None}
    assert "nan" in io.csv_text([{"a": math.nan}], ["a"])


def test_dumps_is_deterministic():
    obj = {"b": [1, 2.5, 3 + 1j], "a": {"nested": [{"x": 1}]}}
    assert io.dumps(obj) == io.dumps(obj)
    assert json.loads(io.dumps(obj))["b"] == [1, 2.5, [3, 1]]


def test_model_round_trip(tmp_path, xxx6):
    path = tmp_path / "model.json"
    io.write_json(path, io.model_to_json(xxx6))
    back = io.load_model(path)
    assert np.array_equal(back.a.expanded().zeros, xxx6.functions().a.expanded().zeros)
    assert back.kappa == xxx6.kappa


def test_custom_rational_model():
    data = {"type": "custom_rational", "a": {"zeros": [[0, -0.5]], "exponent": 2},
            "d": {"zeros": [[0, 0.5]], "exponent": 2}, "kappa": 0.5, "epsilon": 0.25}
    model = io.model_from_json(data)
    assert model.epsilon == 0.25
    back = io.model_from_json(io.model_to_json(model))
    assert back.a(0.3) == model.a(0.3)


@pytest.mark.parametrize("data", [
    [],
    {"type": "nope"},
    {"type": "inhomogeneous_xxx"},
    {"type": "inhomogeneous_xxx", "theta": [0, 1], "L": 3},
    {"type": "inhomogeneous_xxx", "theta": [0], "epsilon": -1},
    {"type": "inhomogeneous_xxx", "theta": ["x"]},
])
def test_invalid_models(data):
    with pytest.raises(ConfigInvalid):
        io.model_from_json(data)


def test_state_round_trip(tmp_path, xxx6):
    state = find_state(xxx6, 2, rng=4)
    path = tmp_path / "state.json"
    io.write_json(path, io.state_to_json(state))
    back = io.load_state(path, xxx6)
    assert np.array_equal(back.u, state.u)
    assert back.mode_numbers == state.mode_numbers
    assert back.residual == pytest.approx(state.residual, abs=1e-15)


def test_atomic_write_leaves_no_temporaries(tmp_path):
    io.atomic_write(tmp_path / "out.txt", "hello\n")
    assert [p.name for p in tmp_path.iterdir()] == ["out.txt"]


def test_missing_and_broken_files(tmp_path):
    with pytest.raises(ConfigInvalid):
        io.read_json(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    with pytest.raises(ConfigInvalid):
        io.read_json(bad)


def test_bundled_family():
    family = io.load_family()
    assert [m.M for m in family] == [8, 16, 32, 64]
    assert all(m.w.size == 2 * m.M for m in family)


def test_explicit_family_members(xxx6):
    model = io.model_to_json(xxx6)
    data = {"members": [
        {"model": model, "u": [0.1, 0.2j], "v": [0.5, -0.3]},
        {"model": model, "w": [0.1, 0.2, 0.3, 0.4], "label": "x"},
    ]}
    family = io.family_from_json(data)
    assert [m.M for m in family] == [2, 2]
    assert family[1].label == "x"
    with pytest.raises(ConfigInvalid):
        io.family_from_json({"members": []})
    with pytest.raises(ConfigInvalid):
        io.family_from_json({"generator": "other"})


def test_xxx_model_type_preserved(tmp_path):
    model = InhomogeneousXXXModel([0.1, 0.2], 0.5, 0.5)
    assert io.model_to_json(model)["type"] == "inhomogeneous_xxx"
