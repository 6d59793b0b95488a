"""Configuration files (TOML or JSON) for suites and evaluations."""
from __future__ import annotations

import json
from pathlib import Path

try:  # Python >= 3.11
    import tomllib
except ModuleNotFoundError:  # pragma: no cover - exercised on 3.10
    import tomli as tomllib

from .errors import ConfigError


def load_config(path: str | Path | None) -> dict:
    """Read a TOML or JSON mapping; None gives an empty config."""
    if path is None:
        return {}
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"config file {p} not found")
    text = p.read_text()
    try:
        if p.suffix.lower() == ".json":
            data = json.loads(text)
        elif p.suffix.lower() == ".toml":
            data = tomllib.loads(text)
        else:
            try:
                data = json.loads(text)
            except json.JSONDecodeError:
                data = tomllib.loads(text)
    except (json.JSONDecodeError, tomllib.TOMLDecodeError) as exc:
        raise ConfigError(f"cannot parse {p}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config root must be a mapping")
    return data


def merge(defaults: dict, override: dict) -> dict:
    """Recursive merge; unknown top-level keys are rejected."""
    out = dict(defaults)
    for k, v in override.items():
        if k not in defaults:
            raise ConfigError(f"unknown config key {k!r}; expected one of {sorted(defaults)}")
        if isinstance(defaults[k], dict) and isinstance(v, dict):
            out[k] = {**defaults[k], **v}
        else:
            out[k] = v
    return out
