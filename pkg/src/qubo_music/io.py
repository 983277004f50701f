"""JSON reading and writing for every model type, dispatched on its ``type`` tag."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

from .compiler import IlpModel, VarMap
from .mrf import MarkovNetwork
from .qubo import IsingModel, QuboModel

__all__ = ["FormatError", "MODEL_TYPES", "model_from_dict", "dumps", "read_json", "load_model", "save_model"]

MODEL_TYPES = {
    "qubo": QuboModel,
    "ising": IsingModel,
    "mrf": MarkovNetwork,
    "ilp": IlpModel,
    "varmap": VarMap,
}


class FormatError(ValueError):
    pass


def read_json(path: str | Path) -> Any:
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError as exc:
        raise FormatError(f"no such file: {path}") from exc
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: not valid JSON ({exc})") from exc


def model_from_dict(data: Any, expected: tuple[str, ...] | None = None):
    if not isinstance(data, dict) or "type" not in data:
        raise FormatError("model files must be JSON objects with a 'type' field")
    kind = data["type"]
    if kind not in MODEL_TYPES or (expected and kind not in expected):
        allowed = expected or tuple(MODEL_TYPES)
        raise FormatError(f"unexpected model type {kind!r}; expected one of {list(allowed)}")
    try:
        return MODEL_TYPES[kind].from_dict(data)
    except FormatError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"invalid {kind} model: {exc}") from exc


def dumps(obj) -> str:
    """Stable JSON text; floats use ``repr`` and so round-trip exactly."""
    data = obj.to_dict() if hasattr(obj, "to_dict") else obj
    if not isinstance(data, dict) or not data:
        return json.dumps(data) + "\n"
    # one top-level field per line keeps files diffable without exploding long lists
    body = ",\n".join(f" {json.dumps(k)}: {json.dumps(v)}" for k, v in data.items())
    return "{\n" + body + "\n}\n"


def load_model(path: str | Path, expected: tuple[str, ...] | None = None):
    return model_from_dict(read_json(path), expected)


def save_model(obj, path: str | Path) -> None:
    Path(path).write_text(dumps(obj))
