"""Experiment configuration: one JSON file with per-scenario sections.

The defaults below fully describe every experiment the command line runner
can execute; a user file only needs the leaves it wants to change. Merging
is strict: a key that does not exist in the defaults is rejected with its
full dotted path, and a leaf must keep the type of its default, so typos
fail loudly instead of silently running the defaults.
"""

from __future__ import annotations

import copy
import json
from dataclasses import MISSING, fields
from pathlib import Path
from typing import Any, Mapping

from .astro import AstroParams, ReadoutParams
from .costmodel import AreaWeights, PowerModel
from .reliability import BtiParams, DisturbParams, EnduranceParams

__all__ = ["ConfigError", "default_config", "load_config", "merge_config"]


class ConfigError(ValueError):
    """Invalid experiment configuration; the message names the field."""


def _scalar_defaults(cls: type) -> dict[str, Any]:
    """Default values of a parameter dataclass, as a plain JSON-able dict."""
    out: dict[str, Any] = {}
    for f in fields(cls):
        if not f.init or f.default is MISSING:
            continue
        out[f.name] = f.default
    return out


def _defaults() -> dict[str, Any]:
    return {
        # Base seed for every Monte-Carlo loop (the --seed flag overrides it).
        "seed": 0,
        "selfrepair": {
            "astro": _scalar_defaults(AstroParams),
            "readout": _scalar_defaults(ReadoutParams),
            "n_sources": 2,
            "source_rate_hz": 30.0,
            "duration_s": 100.0,
            "fault_time_s": 50.0,
            "sample_every": 100,
            "n_seeds": 10,
        },
        "clusters": {},
        "synthesize": {
            # A deliberately fragile classifier: each input feature exists in
            # two copies and the hidden drive sits just above the readout
            # cliff, so losing one copy silences hidden units until an
            # astrocyte group rebalances the layer.
            "toy": {
                "layer_sizes": [4, 8, 2],
                "n_classes": 2,
                "seed": 0,
                "hidden_drive": 0.030,
                "blob_spread": 0.08,
                "feature_hi": 0.9,
                "feature_lo": 0.1,
            },
            "harness": {"duration_s": 0.25, "samples": 16, "n_seeds": 1},
            "synthesis": {
                "n_r": 200,
                "a_th": None,
                "max_astro_per_layer": 1,
                "seed": 0,
            },
            "core": "ubrain",
            "time_scale": 25.0,
        },
        "faults": {
            # A redundant classifier whose copies mask any single fault; the
            # insertion pass correctly leaves it alone, and accuracy holds at
            # low error rates without any repair hardware.
            "toy": {
                "layer_sizes": [16, 8, 2],
                "n_classes": 2,
                "seed": 0,
                "hidden_drive": 0.3,
                "blob_spread": 0.06,
                "feature_hi": 0.9,
                "feature_lo": 0.1,
            },
            "harness": {"duration_s": 1.0, "samples": 16, "n_seeds": 1},
            "synthesis": {
                "n_r": 40,
                "a_th": None,
                "max_astro_per_layer": 2,
                "seed": 0,
            },
            "core": "ubrain",
            "time_scale": 25.0,
            "error_rates_pct": [0.0, 10.0, 20.0, 50.0],
            "n_seeds": 10,
        },
        "reliability": {
            "bti": _scalar_defaults(BtiParams),
            "endurance": _scalar_defaults(EnduranceParams),
            "disturb": _scalar_defaults(DisturbParams),
            "voltage_sweep": [0.0, 0.2, 0.4, 0.6, 0.8, 1.0],
            "time_sweep_s": [0.0, 0.5, 1.0, 2.0, 5.0, 10.0],
            "interval_hours": 1000.0,
            "max_failures": 8,
        },
        "area": {
            "weights": _scalar_defaults(AreaWeights),
            "replication_factor": 2.0,
            "redundant_factor": 1.25,
        },
        "power": {
            "alpha_w": _scalar_defaults(PowerModel)["alpha_w"],
            "astro_share_w": _scalar_defaults(PowerModel)["astro_share_w"],
            "activity": 1.0,
        },
        "pwl": {
            "astro": _scalar_defaults(AstroParams),
            "segment_sweep": [16, 32, 64],
            "steps": 40000,
            "sample_every": 100,
        },
    }


def default_config() -> dict[str, Any]:
    """A fresh copy of the full default configuration tree."""
    return copy.deepcopy(_defaults())


def _check_leaf(default: Any, value: Any, path: str) -> Any:
    if default is None:
        # Optional numbers (auto-calibrated gains, thresholds).
        if value is None or (isinstance(value, (int, float))
                             and not isinstance(value, bool)):
            return value
        raise ConfigError(f"{path}: expected a number or null")
    if isinstance(default, bool):
        if isinstance(value, bool):
            return value
        raise ConfigError(f"{path}: expected true/false")
    if isinstance(default, int):
        if isinstance(value, int) and not isinstance(value, bool):
            return value
        raise ConfigError(f"{path}: expected an integer")
    if isinstance(default, float):
        if isinstance(value, (int, float)) and not isinstance(value, bool):
            return float(value)
        raise ConfigError(f"{path}: expected a number")
    if isinstance(default, str):
        if isinstance(value, str):
            return value
        raise ConfigError(f"{path}: expected a string")
    raise ConfigError(f"{path}: unsupported default type")  # pragma: no cover


def _merge(defaults: dict[str, Any], user: Mapping[str, Any],
           path: str) -> None:
    if not isinstance(user, Mapping):
        raise ConfigError(f"{path or 'config'}: expected an object")
    for key, value in user.items():
        here = f"{path}.{key}" if path else key
        if key not in defaults:
            raise ConfigError(f"unknown config key: {here}")
        default = defaults[key]
        if isinstance(default, dict):
            _merge(default, value, here)
        elif isinstance(default, list):
            if (not isinstance(value, list) or not value
                    or not all(isinstance(v, (int, float))
                               and not isinstance(v, bool) for v in value)):
                raise ConfigError(f"{here}: expected a non-empty number list")
            defaults[key] = [type(default[0])(v) for v in value]
        else:
            defaults[key] = _check_leaf(default, value, here)


def merge_config(overrides: Mapping[str, Any]) -> dict[str, Any]:
    """Defaults with ``overrides`` applied; rejects unknown or ill-typed keys."""
    cfg = default_config()
    _merge(cfg, overrides, "")
    return cfg


def load_config(path: str | Path | None) -> dict[str, Any]:
    """Read a JSON config file and merge it over the defaults.

    ``None`` returns the plain defaults. Malformed JSON, a non-object top
    level, unknown keys, and type mismatches all raise :class:`ConfigError`
    naming the problem.
    """
    if path is None:
        return default_config()
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"config {path}: top level must be an object")
    return merge_config(data)
