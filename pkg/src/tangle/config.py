"""Experiment configuration: TOML in, validated dataclass out.

Schema violations raise ConfigError carrying the offending field path; the
CLI maps these to exit code 2.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field

try:
    import tomllib as toml_loader
except ModuleNotFoundError:  # Python < 3.11
    import tomli as toml_loader

SCHEMA_VERSION = 1

KINDS = ("family", "rect-bound", "maximal", "knapp", "sharpness",
         "furstenberg", "lemmas", "wongkew")

RANDOMIZED_KINDS = ("family", "rect-bound", "furstenberg", "lemmas", "wongkew")


class ConfigError(ValueError):
    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


@dataclass
class ExperimentConfig:
    kind: str
    seed: int = None
    threads: int = 1
    out: str = None
    params: dict = field(default_factory=dict)
    schema: int = SCHEMA_VERSION

    def to_dict(self) -> dict:
        return {"schema": self.schema, "kind": self.kind, "seed": self.seed,
                "threads": self.threads, "out": self.out, "params": self.params}


def _require_dyadic(value, path: str):
    try:
        v = float(value)
    except (TypeError, ValueError):
        raise ConfigError(path, f"{value!r} is not a number")
    if v <= 0 or v > 1:
        raise ConfigError(path, f"{v} outside (0, 1]")
    e = math.log2(1.0 / v)
    if abs(e - round(e)) > 1e-9:
        raise ConfigError(path, f"{v} is not a negative dyadic power")
    return v


def _get(d, key, path, typ, default=None, required=False):
    if key not in d:
        if required:
            raise ConfigError(f"{path}{key}", "missing required field")
        return default
    v = d[key]
    if typ is float and isinstance(v, int):
        v = float(v)
    if typ is not None and not isinstance(v, typ):
        raise ConfigError(f"{path}{key}", f"expected {typ.__name__}, got {type(v).__name__}")
    return v


def validate(doc: dict) -> ExperimentConfig:
    if not isinstance(doc, dict):
        raise ConfigError("", "config root must be a table")
    schema = _get(doc, "schema", "", int, default=SCHEMA_VERSION)
    if schema != SCHEMA_VERSION:
        raise ConfigError("schema", f"unsupported schema version {schema}")
    kind = _get(doc, "kind", "", str, required=True)
    if kind not in KINDS:
        raise ConfigError("kind", f"{kind!r} not one of {KINDS}")
    seed = _get(doc, "seed", "", int)
    if kind in RANDOMIZED_KINDS and seed is None:
        raise ConfigError("seed", f"required for randomized kind {kind!r}")
    threads = _get(doc, "threads", "", int, default=1)
    if threads < 1:
        raise ConfigError("threads", "must be >= 1")
    out = _get(doc, "out", "", str)
    params = _get(doc, "params", "", dict, default={})
    _validate_params(kind, params)
    return ExperimentConfig(kind=kind, seed=seed, threads=threads, out=out,
                            params=params, schema=schema)


def _validate_params(kind: str, p: dict):
    path = "params."
    for key in ("delta", "deltas"):
        if key in p:
            vals = p[key] if isinstance(p[key], list) else [p[key]]
            for i, v in enumerate(vals):
                _require_dyadic(v, f"{path}{key}[{i}]")
    if kind == "lemmas":
        n = _get(p, "instances", path, int, default=1000)
        if n < 1:
            raise ConfigError(path + "instances", "must be >= 1")
        names = _get(p, "names", path, list)
        if names is not None:
            from .suites import LEMMA_NAMES

            for i, name in enumerate(names):
                if name not in LEMMA_NAMES:
                    raise ConfigError(f"{path}names[{i}]", f"unknown lemma {name!r}")
    if kind == "rect-bound":
        _get(p, "k", path, int, required=True)
        if "mus" in p:
            for i, m in enumerate(p["mus"]):
                if not isinstance(m, int) or m < 1:
                    raise ConfigError(f"{path}mus[{i}]", "mu must be a positive integer")
    if kind == "knapp":
        s = _get(p, "s", path, int, default=1)
        if s < 1:
            raise ConfigError(path + "s", "s must be >= 1")
    if kind == "furstenberg":
        pairs = _get(p, "pairs", path, list, default=[[0.8, 0.5]])
        for i, pair in enumerate(pairs):
            if (not isinstance(pair, list) or len(pair) != 2
                    or not all(isinstance(x, (int, float)) for x in pair)):
                raise ConfigError(f"{path}pairs[{i}]", "expected [alpha, beta]")
            a, b = float(pair[0]), float(pair[1])
            if not (0 <= b <= a <= 1):
                raise ConfigError(f"{path}pairs[{i}]",
                                  f"need 0 <= beta <= alpha <= 1, got ({a}, {b})")
    if kind == "family":
        fam = _get(p, "family", path, str, default="moment")
        if fam not in ("moment", "circle", "ellipse"):
            raise ConfigError(path + "family", f"unknown family {fam!r}")
    if kind == "wongkew":
        n = _get(p, "samples", path, int, default=100_000)
        if n < 100:
            raise ConfigError(path + "samples", "need at least 100 samples")


def load(path: str) -> ExperimentConfig:
    with open(path, "rb") as fh:
        doc = toml_loader.load(fh)
    return validate(doc)


def resolve_threads(cfg: ExperimentConfig, cli_value=None) -> int:
    env = os.environ.get("TANGLE_THREADS")
    if cli_value is not None:
        return int(cli_value)
    if env is not None:
        try:
            return max(int(env), 1)
        except ValueError:
            raise ConfigError("TANGLE_THREADS", f"{env!r} is not an integer")
    return cfg.threads
