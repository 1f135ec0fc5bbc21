# SPDX-License-Identifier: Apache-2.0
# SPDX-FileCopyrightText: 2025 The Linux Foundation

"""JSON files for surfaces and Fano points, and JSON-safe report encoding."""

import json
from dataclasses import dataclass, fields, is_dataclass
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Sequence, Tuple

import numpy as np

from . import __version__
from .error_handling import SurfaceFileError
from .forms import Backend, BinaryForm, QuaternaryForm, Scalar, Surface
from .lines import FanoPoint

SCHEMA = "fano-congruence/1"


def encode_scalar(value: object) -> Any:
    """Rationals become "p/q" strings, complex numbers {re, im} objects."""
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    z = complex(value)  # type: ignore[arg-type]
    return {"re": z.real, "im": z.imag}


def scalar_list(values: Sequence[object]) -> List[Any]:
    return [encode_scalar(v) for v in values]


def decode_scalar(raw: Any, backend: Backend, entry: int | None = None) -> Scalar:
    if backend is Backend.EXACT:
        if not isinstance(raw, (str, int)) or isinstance(raw, bool):
            raise SurfaceFileError(f"Entry {entry}: exact values must be 'p/q' strings", entry)
        try:
            return Fraction(raw)
        except (ValueError, ZeroDivisionError) as e:
            raise SurfaceFileError(f"Entry {entry}: bad rational {raw!r}: {e}", entry) from e
    if isinstance(raw, dict):
        try:
            return complex(float(raw["re"]), float(raw.get("im", 0.0)))
        except (KeyError, TypeError, ValueError) as e:
            raise SurfaceFileError(f"Entry {entry}: bad complex value {raw!r}", entry) from e
    if isinstance(raw, (int, float)) and not isinstance(raw, bool):
        return complex(raw)
    raise SurfaceFileError(f"Entry {entry}: float values must be {{re, im}} objects", entry)


def _backend(raw: Any) -> Backend:
    try:
        return Backend(raw)
    except ValueError as e:
        raise SurfaceFileError(f"Unknown backend {raw!r}; use 'exact' or 'float'") from e


@dataclass(frozen=True)
class SurfaceFile:
    """On-disk form of a surface: degree, backend and a list of monomial coefficients."""

    degree: int
    backend: Backend
    coefficients: Tuple[Tuple[Tuple[int, int, int, int], Scalar], ...]

    @classmethod
    def from_surface(cls, Y: Surface) -> "SurfaceFile":
        return cls(Y.degree, Y.backend, tuple(Y.form.terms()))  # type: ignore[arg-type]

    def to_surface(self) -> Surface:
        return Surface(QuaternaryForm(self.degree, dict(self.coefficients), self.backend))

    @classmethod
    def parse(cls, data: Dict[str, Any]) -> "SurfaceFile":
        if not isinstance(data, dict):
            raise SurfaceFileError("Surface file must hold a JSON object")
        degree = data.get("degree")
        if not isinstance(degree, int) or isinstance(degree, bool) or degree < 1:
            raise SurfaceFileError(f"Degree must be a positive integer, got {degree!r}")
        backend = _backend(data.get("backend", "exact"))
        entries = data.get("coefficients")
        if not isinstance(entries, list):
            raise SurfaceFileError("'coefficients' must be a list")
        seen: Dict[Tuple[int, ...], int] = {}
        coefficients: List[Tuple[Tuple[int, int, int, int], Scalar]] = []
        for index, entry in enumerate(entries):
            if not isinstance(entry, dict) or "exponents" not in entry or "value" not in entry:
                raise SurfaceFileError(
                    f"Entry {index}: expected {{exponents, value}}, got {entry!r}", index
                )
            exps = entry["exponents"]
            if (
                not isinstance(exps, list)
                or len(exps) != 4
                or not all(isinstance(e, int) and not isinstance(e, bool) and e >= 0 for e in exps)
            ):
                raise SurfaceFileError(
                    f"Entry {index}: exponents must be four non-negative integers, got {exps!r}",
                    index,
                )
            if sum(exps) != degree:
                raise SurfaceFileError(
                    f"Entry {index}: exponents {exps} sum to {sum(exps)}, not {degree}", index
                )
            key = tuple(exps)
            if key in seen:
                raise SurfaceFileError(
                    f"Entry {index}: exponents {exps} repeat entry {seen[key]}", index
                )
            seen[key] = index
            value = decode_scalar(entry["value"], backend, index)
            coefficients.append((key, value))  # type: ignore[arg-type]
        return cls(degree, backend, tuple(coefficients))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "schema": SCHEMA,
            "degree": self.degree,
            "backend": self.backend.value,
            "coefficients": [
                {"exponents": list(e), "value": encode_scalar(v)} for e, v in self.coefficients
            ],
        }


def load_surface(path: Path) -> Surface:
    return SurfaceFile.parse(_read_json(path)).to_surface()


def save_surface(Y: Surface, path: Path) -> None:
    path.write_text(dumps(SurfaceFile.from_surface(Y).to_dict()) + "\n")


def _read_json(path: Path) -> Any:
    try:
        with open(path) as f:
            return json.load(f)
    except FileNotFoundError as e:
        raise SurfaceFileError(f"File not found: {path}") from e
    except json.JSONDecodeError as e:
        raise SurfaceFileError(f"{path} is not valid JSON: {e}") from e


def _decode_vector(raw: Any, backend: Backend, name: str, length: int | None = None) -> List[Scalar]:
    if not isinstance(raw, list) or (length is not None and len(raw) != length):
        expected = f" of length {length}" if length is not None else ""
        raise SurfaceFileError(f"'{name}' must be a list{expected}")
    return [decode_scalar(v, backend, i) for i, v in enumerate(raw)]


def point_to_dict(P: FanoPoint) -> Dict[str, Any]:
    return {
        "schema": SCHEMA,
        "backend": P.backend.value,
        "p": scalar_list(P.p),
        "q": scalar_list(P.q),
        "g": scalar_list(P.g.coeffs),
        "h": scalar_list(P.h.coeffs),
    }


def point_from_dict(data: Dict[str, Any]) -> FanoPoint:
    """FanoPoint from {backend, p, q, g, h}; g and h list coefficients of t0^(k-i) t1^i."""
    if not isinstance(data, dict):
        raise SurfaceFileError("Point file must hold a JSON object")
    backend = _backend(data.get("backend", "exact"))
    p = _decode_vector(data.get("p"), backend, "p", 4)
    q = _decode_vector(data.get("q"), backend, "q", 4)
    g = _decode_vector(data.get("g"), backend, "g", 3)
    h = _decode_vector(data.get("h"), backend, "h")
    if not h:
        raise SurfaceFileError("'h' needs at least one coefficient")
    return FanoPoint(
        tuple(p),
        tuple(q),
        BinaryForm(2, tuple(g), backend),
        BinaryForm(len(h) - 1, tuple(h), backend),
    )


def load_point(path: Path) -> FanoPoint:
    return point_from_dict(_read_json(path))


def to_jsonable(obj: Any) -> Any:
    """Recursively convert reports into JSON-safe values."""
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, (Fraction, complex, np.complexfloating)):
        return encode_scalar(obj)
    if isinstance(obj, BinaryForm):
        return scalar_list(obj.coeffs)
    if isinstance(obj, FanoPoint):
        point = point_to_dict(obj)
        del point["schema"]
        return point
    if is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in fields(obj)}
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    return str(obj)


def dumps(payload: Any) -> str:
    return json.dumps(to_jsonable(payload), indent=2, sort_keys=True)


def report(kind: str, body: Dict[str, Any], config: Dict[str, Any]) -> Dict[str, Any]:
    """Wrap a report body with its schema, tool version and run configuration."""
    return {
        "schema": f"{SCHEMA}/{kind}",
        "tool_version": __version__,
        "config": config,
        **body,
    }
