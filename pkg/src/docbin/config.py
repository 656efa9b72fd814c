"""Run configuration: flat ``key = value`` files merged with command-line flags.

Precedence is flag > config file > built-in default.  Solver keys are named
exactly as the ``SolverParams`` fields; a few run and synthesis keys sit
alongside them in the same flat namespace.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field, fields
from pathlib import Path

from .errors import ConfigError, DocbinError
from .solver import SolverParams

SOLVER_KEYS: dict[str, type] = {f.name: type(f.default) for f in fields(SolverParams)}

RUN_KEYS: dict[str, type] = {
    "trace": int,
    "format": str,
    "out": str,
    "jobs": int,
}

SYNTH_KEYS: dict[str, type] = {
    "width": int,
    "height": int,
    "stroke_width": int,
    "count": int,
    "background": str,
    "bg_level": float,
    "ramp_low": float,
    "ramp_high": float,
    "ramp_direction": str,
    "blob_row": float,
    "blob_col": float,
    "blob_radius": float,
    "blob_depth": float,
    "text_level": float,
    "noise_sigma": float,
    "seed": int,
}

SYNTH_DEFAULTS = {
    "width": 128,
    "height": 128,
    "stroke_width": 3,
    "count": 16,
    "background": "ramp",
    "bg_level": 0.8,
    "ramp_low": 0.5,
    "ramp_high": 0.9,
    "ramp_direction": "x",
    "blob_row": 0.5,
    "blob_col": 0.5,
    "blob_radius": 0.25,
    "blob_depth": 0.3,
    "text_level": 0.2,
    "noise_sigma": 0.05,
    "seed": 42,
}

ALL_KEYS = {**SOLVER_KEYS, **RUN_KEYS, **SYNTH_KEYS}
REPORT_FORMATS = ("csv", "json")


@dataclass
class RunConfig:
    params: SolverParams = field(default_factory=SolverParams)
    inputs: list[Path] = field(default_factory=list)
    gt: list[Path] = field(default_factory=list)
    out: Path = Path(".")
    trace: int = 0
    report_format: str = "csv"
    jobs: int = 1
    synth: dict = field(default_factory=lambda: dict(SYNTH_DEFAULTS))


def _convert(key: str, raw, where: str):
    kind = ALL_KEYS[key]
    if isinstance(raw, kind) and not (kind is int and isinstance(raw, bool)):
        return raw
    try:
        if kind is int:
            f = float(raw)
            if f != int(f):
                raise ValueError
            return int(f)
        if kind is float:
            return float(raw)
        return str(raw)
    except (TypeError, ValueError):
        raise ConfigError(f"{where}: {key!r} expects {kind.__name__}, got {raw!r}") from None


def read_config_file(path) -> dict[str, tuple[object, int]]:
    """Parse a flat config file into {key: (value, line_number)}."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    out: dict[str, tuple[object, int]] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {line.strip()!r}")
        key, value = (part.strip() for part in body.split("=", 1))
        if key not in ALL_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        if key in out:
            raise ConfigError(f"{path}:{lineno}: duplicate key {key!r}")
        out[key] = (_convert(key, value, f"{path}:{lineno}"), lineno)
    return out


def _check_solver_key(key: str, value, where: str) -> None:
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            SolverParams(**{key: value})
    except DocbinError as exc:
        raise ConfigError(f"{where}: invalid {key!r}: {exc}") from None


def merge(file_values: dict | None = None, flag_values: dict | None = None) -> dict:
    """Combine file and flag values (flags win), validating each solver key in isolation."""
    merged: dict = {}
    for source, values in (("config", file_values or {}), ("flag", flag_values or {})):
        for key, item in values.items():
            if key not in ALL_KEYS:
                raise ConfigError(f"unknown key {key!r}")
            if source == "config":
                value, lineno = item
                where = f"config line {lineno}"
            else:
                value, where = _convert(key, item, f"--{key}"), f"--{key}"
            if key in SOLVER_KEYS:
                _check_solver_key(key, value, where)
            merged[key] = value
    return merged


def build_run_config(
    config_path=None,
    flags: dict | None = None,
    inputs=(),
    gt=(),
) -> RunConfig:
    file_values = read_config_file(config_path) if config_path else {}
    values = merge(file_values, {k: v for k, v in (flags or {}).items() if v is not None})
    solver = {k: v for k, v in values.items() if k in SOLVER_KEYS}
    try:
        params = SolverParams(**solver)
    except DocbinError as exc:
        raise ConfigError(str(exc)) from None
    fmt = values.get("format", "csv")
    if fmt not in REPORT_FORMATS:
        raise ConfigError(f"'format' must be one of {REPORT_FORMATS}, got {fmt!r}")
    trace = values.get("trace", 0)
    if trace < 0:
        raise ConfigError(f"'trace' must be >= 0, got {trace}")
    jobs = values.get("jobs", 1)
    if jobs < 1:
        raise ConfigError(f"'jobs' must be >= 1, got {jobs}")
    synth = dict(SYNTH_DEFAULTS)
    synth.update({k: v for k, v in values.items() if k in SYNTH_KEYS})
    return RunConfig(
        params=params,
        inputs=[Path(p) for p in inputs],
        gt=[Path(p) for p in gt],
        out=Path(values.get("out", ".")),
        trace=trace,
        report_format=fmt,
        jobs=jobs,
        synth=synth,
    )


def parse_config(path=None, **flags) -> RunConfig:
    """Resolve a RunConfig from an optional config file and keyword flags."""
    return build_run_config(path, flags)
