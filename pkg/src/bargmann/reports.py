"""Run configuration, deterministic JSON, atomic output."""

from __future__ import annotations

import enum
import json
import math
import os
import tempfile
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numpy as np

from .symbols import format_complex, parse_complex
from .verify import DEFAULT_K_GRID

SCHEMA_VERSION = 1


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    r: float = 1.0
    N: int = 64
    tol: float | None = None
    grid: tuple = DEFAULT_K_GRID
    radial_nodes: int = 40
    angles: int = 128
    format: str = "json"
    out: str | None = None

    def __post_init__(self):
        for name in ("r", "N", "radial_nodes", "angles"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and v > 0 and math.isfinite(v)):
                raise ConfigError(f"{name} must be a positive number, got {v!r}")
        if self.tol is not None and not self.tol > 0:
            raise ConfigError(f"tol must be positive, got {self.tol!r}")
        if not self.grid:
            raise ConfigError("grid must contain at least one point")
        if self.format not in ("json", "csv"):
            raise ConfigError(f"format must be json or csv, got {self.format!r}")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["grid"] = [format_complex(w) for w in self.grid]
        return d


_CASTS = {
    "r": float,
    "N": int,
    "tol": float,
    "grid": lambda s: parse_grid(s),
    "radial_nodes": int,
    "angles": int,
    "format": str,
    "out": str,
}


def parse_grid(text: str) -> tuple:
    parts = [p for p in text.split(",") if p.strip()]
    if not parts:
        raise ConfigError("grid must contain at least one point")
    return tuple(parse_complex(p.strip()) for p in parts)


def _normalise_key(key: str) -> str:
    key = key.strip().lstrip("-").replace("-", "_")
    return "N" if key.lower() == "n" else key


def read_config_file(path: str | os.PathLike) -> dict:
    """``key = value`` lines; blank lines and ``#`` comments ignored."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        key = _normalise_key(key)
        if key not in _CASTS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        try:
            out[key] = _CASTS[key](value)
        except ValueError as exc:
            raise ConfigError(f"{path}:{lineno}: bad value for {key}: {exc}") from None
    return out


def resolve_config(file_values: dict | None = None, flag_values: dict | None = None) -> RunConfig:
    """Defaults, then the config file, then explicit flags."""
    merged = {}
    known = {f.name for f in fields(RunConfig)}
    for source in (file_values or {}, flag_values or {}):
        for k, v in source.items():
            if k not in known:
                raise ConfigError(f"unknown config key {k!r}")
            if v is not None:
                merged[k] = v
    return RunConfig(**merged)


# --------------------------------------------------------------------------
# serialisation
# --------------------------------------------------------------------------


def _fmt_float(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    s = format(x, ".17g")
    if all(c in "-0123456789" for c in s):
        s += ".0"
    return s


def _encode(obj, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, enum.Enum):
        return _encode(obj.value, indent, level)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, (complex, np.complexfloating)):
        return _encode({"re": float(obj.real), "im": float(obj.imag)}, indent, level)
    if isinstance(obj, str):
        return _quote(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{_quote(str(k))}: {_encode(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in seq):
            return "[" + ", ".join(_encode(v, indent, level + 1) for v in seq) + "]"
        items = [pad + _encode(v, indent, level + 1) for v in seq]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _quote(s: str) -> str:
    return json.dumps(s, ensure_ascii=False)


def dumps(payload: dict, indent: int = 2) -> str:
    """JSON with fixed 17-significant-digit floats and insertion-ordered keys."""
    return _encode(payload, indent, 0) + "\n"


def envelope(command: str, config: RunConfig, body: dict) -> dict:
    return {"schema": SCHEMA_VERSION, "command": command, "config": config.to_dict(), **body}


def write_atomic(path: str | os.PathLike, text: str) -> None:
    """Write via a temporary file in the target directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
