"""JSON and CSV input/output.

Complex numbers are written as ``[re, im]`` pairs and every float with 17
significant digits, so a value read back is bit-identical.  Non-finite floats
become ``null`` in JSON and ``nan`` in CSV.  Files are written atomically
(temporary file + rename).
"""

from __future__ import annotations

import csv
import io
import json
import math
import numbers
import os
import tempfile
from importlib import resources
from pathlib import Path

import numpy as np

from .bethe import BetheState
from .errors import ConfigInvalid
from .model import InhomogeneousXXXModel, ModelFunctions, RationalFunction, as_roots


def _float(x: float) -> str:
    return format(x, ".17g") if math.isfinite(x) else "null"


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON text with complex pairs and 17-digit floats."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    elif isinstance(obj, np.generic):
        obj = obj.item()
    if obj is None or isinstance(obj, (bool, str)):
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return _float(obj)
    if isinstance(obj, complex):
        return f"[{_float(obj.real)}, {_float(obj.imag)}]"
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        parts = [dumps(v, indent, _level + 1) for v in obj]
        if all(isinstance(v, (int, float, complex, np.number)) for v in obj):
            return "[" + ", ".join(parts) + "]"
        return "[\n" + ",\n".join(pad + p for p in parts) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def atomic_write(path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_json(path, obj) -> None:
    atomic_write(path, dumps(obj) + "\n")


def csv_text(rows: list[dict], columns: list[str]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format(v, ".17g") if isinstance(v, float) else v for v in (row[c] for c in columns)])
    return buf.getvalue()


def read_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise ConfigInvalid(f"file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigInvalid(f"{path}: invalid JSON ({exc})") from None


def parse_complex(value) -> complex:
    if isinstance(value, numbers.Number) and not isinstance(value, bool):
        return complex(value)
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return complex(float(value[0]), float(value[1]))
    raise ConfigInvalid(f"expected a number or an [re, im] pair, got {value!r}")


def parse_complex_list(values) -> np.ndarray:
    if not isinstance(values, list):
        raise ConfigInvalid("expected a list of complex numbers")
    return np.array([parse_complex(v) for v in values], dtype=complex)


def _rational(data) -> RationalFunction:
    if not isinstance(data, dict):
        raise ConfigInvalid("rational function must be an object with zeros/poles")
    return RationalFunction(
        parse_complex_list(data.get("zeros", [])),
        parse_complex_list(data.get("poles", [])),
        parse_complex(data.get("scale", 1.0)),
        int(data.get("exponent", 1)),
    )


def model_from_json(data) -> ModelFunctions:
    if not isinstance(data, dict):
        raise ConfigInvalid("model file must contain a JSON object")
    kind = data.get("type")
    try:
        kappa = parse_complex(data.get("kappa", 1.0))
        epsilon = float(data.get("epsilon", 1.0))
        if kind == "inhomogeneous_xxx":
            theta = parse_complex_list(data["theta"])
            if "L" in data and int(data["L"]) != theta.size:
                raise ConfigInvalid(f"L={data['L']} but {theta.size} inhomogeneities given")
            return InhomogeneousXXXModel(theta, kappa, epsilon).functions()
        if kind == "custom_rational":
            return ModelFunctions(_rational(data["a"]), _rational(data["d"]), kappa, epsilon,
                                  name="custom_rational")
    except KeyError as exc:
        raise ConfigInvalid(f"model file is missing {exc}") from None
    except (TypeError, ValueError) as exc:
        raise ConfigInvalid(f"invalid model: {exc}") from None
    raise ConfigInvalid(f"unknown model type {kind!r}")


def model_to_json(model) -> dict:
    if isinstance(model, InhomogeneousXXXModel):
        return {"type": "inhomogeneous_xxx", "L": model.L, "theta": list(model.theta),
                "kappa": model.kappa, "epsilon": model.epsilon}
    if not model.is_rational:
        raise ConfigInvalid("only rational models can be written to JSON")
    return {"type": "custom_rational", "a": model.a.to_json(), "d": model.d.to_json(),
            "kappa": model.kappa, "epsilon": model.epsilon}


def load_model(path) -> ModelFunctions:
    return model_from_json(read_json(path))


def rapidities_from_json(data) -> np.ndarray:
    if isinstance(data, dict):
        if "roots" not in data:
            raise ConfigInvalid("rapidity file needs a 'roots' list")
        data = data["roots"]
    return parse_complex_list(data)


def load_rapidities(path) -> np.ndarray:
    return rapidities_from_json(read_json(path))


def state_to_json(state: BetheState) -> dict:
    return {
        "roots": list(state.u),
        "mode_numbers": list(state.mode_numbers),
        "residual": state.residual,
        "iterations": state.iterations,
        "converged": state.converged,
        "on_shell": state.on_shell,
        "history": list(state.history),
    }


def state_from_json(data, model) -> BetheState:
    """Rebuild a state on ``model``; the residual is recomputed, not trusted from the file."""
    roots = rapidities_from_json(data)
    modes = data.get("mode_numbers") if isinstance(data, dict) else None
    return BetheState.from_roots(model, roots, modes)


def load_state(path, model) -> BetheState:
    return state_from_json(read_json(path), model)


def bundled_family_path():
    return resources.files("betheprod") / "data" / "example_family.json"


def family_from_json(data) -> list:
    """Family members from explicit ``members`` or a ``generator`` entry."""
    from .semiclassical import FamilyMember, one_cut_family

    if not isinstance(data, dict):
        raise ConfigInvalid("family file must contain a JSON object")
    if "generator" in data:
        if data["generator"] != "one_cut":
            raise ConfigInvalid(f"unknown family generator {data['generator']!r}")
        try:
            return one_cut_family(
                sizes=[int(m) for m in data.get("M", [8, 16, 32, 64])],
                shift=parse_complex(data.get("shift", 0.15)),
                mode=int(data.get("mode", -1)),
                kappa=parse_complex(data.get("kappa", 1.0)),
                length_ratio=int(data.get("length_ratio", 8)),
            )
        except (TypeError, ValueError) as exc:
            raise ConfigInvalid(f"invalid family generator: {exc}") from None
    members = []
    for k, item in enumerate(data.get("members", [])):
        try:
            model = model_from_json(item["model"])
            if "w" in item:
                w = parse_complex_list(item["w"])
                M = int(item.get("M", w.size // 2))
            else:
                u = rapidities_from_json(item["u"])
                w = np.concatenate([u, rapidities_from_json(item["v"])])
                M = u.size
        except KeyError as exc:
            raise ConfigInvalid(f"family member {k} is missing {exc}") from None
        members.append(FamilyMember(model, as_roots(w), M, item.get("label", f"member{k}")))
    if not members:
        raise ConfigInvalid("family has no members")
    return members


def load_family(path=None) -> list:
    if path is None:
        with bundled_family_path().open() as fh:
            return family_from_json(json.load(fh))
    return family_from_json(read_json(path))
