"""Experiment configuration: a YAML (or JSON) key-value document.

Every key is validated before a command runs; unknown keys are rejected so that
a typo cannot silently change an experiment.
"""

from __future__ import annotations

import dataclasses
import os
from dataclasses import dataclass, field

import numpy as np
import yaml

from .multilayer import LayerConfigError, layer_from_dict
from .ttss import DEFAULT_MAX_ITERS, PRESETS, Hyperparams


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    dataset: str | None = None
    label_column: int | str | None = -1
    has_header: bool = True
    preset: str | None = None
    q: float | None = None
    b: float | None = None
    map: str | None = None
    epsilon: float | None = None
    max_iters: int = DEFAULT_MAX_ITERS
    test_scaling: str = "self"
    layers: list = field(default_factory=list)
    k: int | None = None
    k_range: list | None = None
    trials: int = 10
    seed: int = 0
    sigmas: list | dict | None = None
    trials_per_sigma: int = 20
    model: str | None = None
    uat_epsilon: float | None = None
    codec_p: str | None = None

    def hyperparams(self) -> Hyperparams:
        base = PRESETS[self.preset].to_dict() if self.preset else {}
        for key, attr in (("q", "q"), ("b", "b"), ("map_kind", "map"), ("epsilon", "epsilon")):
            value = getattr(self, attr)
            if value is not None:
                base[key] = value
        missing = [k for k in ("q", "b", "map_kind", "epsilon") if k not in base]
        if missing:
            raise ConfigError(f"hyperparameters missing (set them or use a preset): {missing}")
        base["max_iters"] = self.max_iters
        try:
            return Hyperparams.from_dict(base)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def layer_specs(self) -> tuple:
        params = self.hyperparams()
        try:
            return tuple(layer_from_dict(d, params) for d in self.layers)
        except (LayerConfigError, TypeError, KeyError) as exc:
            raise ConfigError(f"invalid layer specification: {exc}") from None

    def sigma_grid(self) -> list[float]:
        s = self.sigmas
        if s is None:
            raise ConfigError("'sigmas' is required for the noise command")
        if isinstance(s, dict):
            extra = set(s) - {"start", "stop", "num", "spacing"}
            if extra or not {"start", "stop", "num"} <= set(s):
                raise ConfigError("sigmas grid needs start, stop, num and optional spacing (linear|log)")
            spacing = s.get("spacing", "linear")
            if spacing == "log":
                grid = np.geomspace(float(s["start"]), float(s["stop"]), int(s["num"]))
            elif spacing == "linear":
                grid = np.linspace(float(s["start"]), float(s["stop"]), int(s["num"]))
            else:
                raise ConfigError(f"unknown sigma spacing {spacing!r}")
            return [float(v) for v in grid]
        values = [float(v) for v in s]
        if not values or any(v < 0 for v in values):
            raise ConfigError("sigmas must be a non-empty list of non-negative numbers")
        return values


_FIELDS = {f.name: f for f in dataclasses.fields(ExperimentConfig)}


def _check_types(cfg: ExperimentConfig) -> None:
    ints = ("max_iters", "trials", "seed", "trials_per_sigma")
    for name in ints:
        v = getattr(cfg, name)
        if isinstance(v, bool) or not isinstance(v, int):
            raise ConfigError(f"{name} must be an integer, got {v!r}")
    if cfg.k is not None and (isinstance(cfg.k, bool) or not isinstance(cfg.k, int) or cfg.k < 1):
        raise ConfigError(f"k must be a positive integer, got {cfg.k!r}")
    if cfg.k_range is not None:
        kr = cfg.k_range
        if not (isinstance(kr, list) and len(kr) == 2 and all(isinstance(v, int) for v in kr) and 1 <= kr[0] <= kr[1]):
            raise ConfigError(f"k_range must be [low, high] with 1 <= low <= high, got {kr!r}")
    if cfg.trials < 1 or cfg.trials_per_sigma < 1:
        raise ConfigError("trials and trials_per_sigma must be positive")
    if not isinstance(cfg.has_header, bool):
        raise ConfigError("has_header must be true or false")
    if cfg.preset is not None and cfg.preset not in PRESETS:
        raise ConfigError(f"unknown preset {cfg.preset!r}; choose from {sorted(PRESETS)}")
    if cfg.test_scaling not in ("self", "train"):
        raise ConfigError("test_scaling must be 'self' or 'train'")
    if not isinstance(cfg.layers, list):
        raise ConfigError("layers must be a list")


def parse_config(text: str, base_dir: str = ".") -> ExperimentConfig:
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"config is not valid YAML: {exc}") from None
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        raise ConfigError("config must be a mapping of keys to values")
    unknown = sorted(set(raw) - set(_FIELDS))
    if unknown:
        raise ConfigError(f"unknown config keys: {unknown}")
    cfg = ExperimentConfig(**raw)
    for key in ("dataset", "model"):
        v = getattr(cfg, key)
        if v is not None:
            setattr(cfg, key, os.path.normpath(os.path.join(base_dir, str(v))))
    _check_types(cfg)
    if cfg.q is not None or cfg.b is not None or cfg.preset is not None:
        cfg.hyperparams()
        if cfg.layers:
            cfg.layer_specs()
    return cfg


def load_config(path) -> tuple[ExperimentConfig, str]:
    """Parse a config file; returns the config and its verbatim text."""
    if not os.path.exists(path):
        raise ConfigError(f"config file not found: {path}")
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    return parse_config(text, os.path.dirname(os.path.abspath(path))), text
