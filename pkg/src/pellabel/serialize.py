"""JSON encoding of the domain types.

Wire shapes: a curve is its flat ascending endpoint array, a comb is
``{"r", "q", "h"}``, a polynomial is its ascending coefficient list and every
other record is an object with exactly its field names.  Non-finite floats
travel as the strings ``"nan"``, ``"inf"`` and ``"-inf"`` so the output stays
strict JSON.  Decoding rejects unknown fields and wrong types.
"""
from __future__ import annotations

import dataclasses
import json
import math
import typing
from typing import Any, Optional, Union

import numpy as np

from .applications import DegenerationFamily, DegenerationStep, KDiffReport, TorsionReport
from .canonical import SEPARATION_FLOOR, CanonicalData, CurveConfig
from .forward import Certificate, PellSolution, PellVerdict
from .inverse import Comb, InverseSolveResult, RoundTrip, SweepVerdict
from .polynomials import Poly


class SerializationError(ValueError):
    """Malformed or unexpected JSON for a domain type."""


REGISTRY: dict[str, type] = {
    cls.__name__: cls
    for cls in (
        Poly,
        CurveConfig,
        Comb,
        CanonicalData,
        PellVerdict,
        PellSolution,
        Certificate,
        InverseSolveResult,
        RoundTrip,
        SweepVerdict,
        KDiffReport,
        TorsionReport,
        DegenerationStep,
        DegenerationFamily,
    )
}

_NONFINITE = {"nan": math.nan, "inf": math.inf, "-inf": -math.inf}


def _float_out(v) -> Union[float, str]:
    v = float(v)
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return v


def encode(obj: Any) -> Any:
    """JSON-ready structure for a domain object (or a container of them)."""
    if obj is None or isinstance(obj, (bool, str)):
        return obj
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _float_out(obj)
    if isinstance(obj, Poly):
        return [_float_out(c) for c in obj.coeffs]
    if isinstance(obj, CurveConfig):
        pts = [_float_out(v) for v in obj.endpoints]
        if obj.separation_floor == SEPARATION_FLOOR:
            return pts
        return {"endpoints": pts, "separation_floor": _float_out(obj.separation_floor)}
    if isinstance(obj, Comb):
        return {"r": obj.r, "q": list(obj.q), "h": [_float_out(v) for v in obj.h]}
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: encode(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): encode(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [encode(v) for v in obj]
    raise SerializationError(f"cannot encode {type(obj).__name__}")


def _expect(cond: bool, path: str, msg: str):
    if not cond:
        raise SerializationError(f"{path or '<root>'}: {msg}")


def _decode_float(data, path: str) -> float:
    if isinstance(data, str):
        _expect(data in _NONFINITE, path, f"invalid float literal {data!r}")
        return _NONFINITE[data]
    _expect(isinstance(data, (int, float)) and not isinstance(data, bool), path, f"expected number, got {type(data).__name__}")
    return float(data)


def _decode_int(data, path: str) -> int:
    _expect(isinstance(data, int) and not isinstance(data, bool), path, f"expected integer, got {type(data).__name__}")
    return int(data)


def _hints(cls) -> dict[str, Any]:
    return typing.get_type_hints(cls)


def decode(data: Any, tp: Any, path: str = "") -> Any:
    """Inverse of :func:`encode` for the declared type ``tp``."""
    origin = typing.get_origin(tp)
    args = typing.get_args(tp)
    if tp is Any:
        return data
    if origin is Union:
        inner = [a for a in args if a is not type(None)]
        if data is None and len(inner) < len(args):
            return None
        _expect(len(inner) == 1, path, "unsupported union")
        return decode(data, inner[0], path)
    if origin in (tuple, list):
        _expect(isinstance(data, list), path, f"expected array, got {type(data).__name__}")
        if origin is list:
            return [decode(v, args[0], f"{path}[{i}]") for i, v in enumerate(data)]
        if len(args) == 2 and args[1] is Ellipsis:
            return tuple(decode(v, args[0], f"{path}[{i}]") for i, v in enumerate(data))
        _expect(len(data) == len(args), path, f"expected {len(args)} entries, got {len(data)}")
        return tuple(decode(v, a, f"{path}[{i}]") for i, (v, a) in enumerate(zip(data, args)))
    if tp is float:
        return _decode_float(data, path)
    if tp is int:
        return _decode_int(data, path)
    if tp is bool:
        _expect(isinstance(data, bool), path, "expected boolean")
        return data
    if tp is str:
        _expect(isinstance(data, str), path, "expected string")
        return data
    if tp is Poly:
        _expect(isinstance(data, list), path, "polynomial must be a coefficient array")
        return Poly([_decode_float(v, f"{path}[{i}]") for i, v in enumerate(data)])
    if tp is CurveConfig:
        floor = SEPARATION_FLOOR
        if isinstance(data, dict):
            _expect(set(data) <= {"endpoints", "separation_floor"} and "endpoints" in data, path, f"bad curve fields {sorted(data)}")
            floor = _decode_float(data.get("separation_floor", SEPARATION_FLOOR), path + ".separation_floor")
            data = data["endpoints"]
        _expect(isinstance(data, list), path, "curve must be an endpoint array")
        pts = tuple(_decode_float(v, f"{path}[{i}]") for i, v in enumerate(data))
        return CurveConfig(pts, floor)
    if dataclasses.is_dataclass(tp):
        _expect(isinstance(data, dict), path, f"expected object for {tp.__name__}")
        fields = {f.name: f for f in dataclasses.fields(tp)}
        unknown = sorted(set(data) - set(fields))
        _expect(not unknown, path, f"unknown field(s) {unknown} for {tp.__name__}")
        hints = _hints(tp)
        kwargs = {}
        for name, f in fields.items():
            if name not in data:
                has_default = f.default is not dataclasses.MISSING or f.default_factory is not dataclasses.MISSING
                _expect(has_default, path, f"missing field {name!r} for {tp.__name__}")
                continue
            kwargs[name] = decode(data[name], hints[name], f"{path}.{name}")
        return tp(**kwargs)
    raise SerializationError(f"{path or '<root>'}: unsupported type {tp!r}")


def to_dict(obj: Any) -> dict:
    """Tagged envelope ``{"type": name, "value": ...}``."""
    name = type(obj).__name__
    if name not in REGISTRY:
        raise SerializationError(f"{name} is not a registered domain type")
    return {"type": name, "value": encode(obj)}


def from_dict(data: dict, expected: Optional[type] = None) -> Any:
    if not isinstance(data, dict) or set(data) != {"type", "value"}:
        raise SerializationError("envelope must have exactly the keys 'type' and 'value'")
    cls = REGISTRY.get(data["type"])
    if cls is None:
        raise SerializationError(f"unknown type tag {data['type']!r}")
    if expected is not None and cls is not expected:
        raise SerializationError(f"expected {expected.__name__}, got {cls.__name__}")
    return decode(data["value"], cls)


def dumps(obj: Any, tagged: bool = True) -> str:
    """Deterministic JSON text (sorted keys, two-space indent, trailing newline)."""
    payload = to_dict(obj) if tagged else encode(obj)
    return json.dumps(payload, sort_keys=True, indent=2, allow_nan=False) + "\n"


def loads(text: str, expected: Optional[type] = None) -> Any:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SerializationError(f"malformed JSON: {exc}") from exc
    return from_dict(data, expected)
