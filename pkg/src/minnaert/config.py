"""Experiment configuration: JSON parsing, validation, defaults and hashing."""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, fields
from typing import Any, Dict, List, Optional, Tuple

EXPERIMENTS = ("table1", "table2", "spectrum_map", "distance_sweep", "scatter_sweep",
               "formula3d", "verify_expansions")

DEFAULT_N = 512
DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITER = 100

TABLE1_DELTAS = [1e-1, 1e-2, 1e-3, 1e-4, 1e-5]
TABLE2_DISTANCES = [10.0, 100.0]
TWO_BUBBLE_MATERIALS = {"rho": 1000.0, "kappa": 1000.0, "rho_b": 1.1, "kappa_b": 0.1}


class ConfigError(ValueError):
    """Malformed or invalid configuration. ``key`` names the offending entry."""

    def __init__(self, message: str, key: Optional[str] = None):
        super().__init__(message)
        self.key = key


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    n: int = DEFAULT_N
    tol: float = DEFAULT_TOL
    max_iter: int = DEFAULT_MAX_ITER
    radius: float = 1.0
    geometry: Optional[Dict[str, Any]] = None
    materials: Optional[Dict[str, float]] = None
    background: float = 1000.0
    delta: Optional[float] = None
    deltas: Optional[List[float]] = None
    distances: Optional[List[float]] = None
    distance_convention: str = "gap"
    cross_delta: bool = False
    seeds: Optional[List[List[List[float]]]] = None
    omega_re: Optional[List[float]] = None
    omega_im: Optional[List[float]] = None
    omegas: Optional[List[float]] = None
    far_distance: float = 1000.0
    direction: Tuple[float, float] = (1.0, 0.0)
    objective: str = "eig"
    cap: Optional[float] = None
    vol: Optional[float] = None
    tau: Optional[float] = None
    v: Optional[float] = None
    output_dir: str = "results"

    def to_dict(self) -> Dict[str, Any]:
        out = {}
        for f in fields(self):
            value = getattr(self, f.name)
            if value is None:
                continue
            out[f.name] = list(value) if isinstance(value, tuple) else value
        return out

    def config_hash(self) -> str:
        """SHA-256 of the canonical JSON form; ``output_dir`` is excluded."""
        data = self.to_dict()
        data.pop("output_dir", None)
        blob = json.dumps(data, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()

    def replace(self, **changes) -> "ExperimentConfig":
        data = self.to_dict()
        data.update({k: v for k, v in changes.items() if v is not None})
        return build_config(data)


_KEYS = {f.name for f in fields(ExperimentConfig)}


def _number(data, key, positive=True, integer=False):
    value = data[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"'{key}' must be a number, got {value!r}", key)
    if integer and not float(value).is_integer():
        raise ConfigError(f"'{key}' must be an integer, got {value!r}", key)
    if not math.isfinite(value) or (positive and value <= 0):
        raise ConfigError(f"'{key}' must be a positive finite number, got {value!r}", key)
    return int(value) if integer else float(value)


def _number_list(data, key, positive=True):
    value = data[key]
    if not isinstance(value, list) or not value:
        raise ConfigError(f"'{key}' must be a non-empty list of numbers", key)
    out = []
    for item in value:
        out.append(_number({key: item}, key, positive=positive))
    return out


def _check_geometry(desc) -> Dict[str, Any]:
    if not isinstance(desc, dict):
        raise ConfigError("'geometry' must be an object", "geometry")
    kind = desc.get("type")
    allowed = {"circle": {"type", "center", "radius"},
               "ellipse": {"type", "center", "semi_axes"},
               "star": {"type", "center", "cos", "sin"}}
    if kind not in allowed:
        raise ConfigError(f"'geometry.type' must be one of {sorted(allowed)}, got {kind!r}", "geometry.type")
    extra = set(desc) - allowed[kind]
    if extra:
        key = sorted(extra)[0]
        raise ConfigError(f"unknown key 'geometry.{key}'", f"geometry.{key}")
    if kind == "circle":
        if "radius" not in desc:
            raise ConfigError("'geometry.radius' is required", "radius")
        _number(desc, "radius")
    if kind == "ellipse":
        axes = desc.get("semi_axes")
        if not (isinstance(axes, list) and len(axes) == 2 and all(
                isinstance(a, (int, float)) and not isinstance(a, bool) and a > 0 for a in axes)):
            raise ConfigError("'geometry.semi_axes' must be two positive numbers", "semi_axes")
    return dict(desc)


def build_config(data: Dict[str, Any]) -> ExperimentConfig:
    """Validate a decoded document and apply defaults."""
    if not isinstance(data, dict):
        raise ConfigError("configuration must be a JSON object")
    unknown = sorted(set(data) - _KEYS)
    if unknown:
        raise ConfigError(f"unknown key '{unknown[0]}'", unknown[0])
    if "experiment" not in data:
        raise ConfigError("missing key 'experiment'", "experiment")
    exp = data["experiment"]
    if exp not in EXPERIMENTS:
        raise ConfigError(f"'experiment' must be one of {list(EXPERIMENTS)}, got {exp!r}", "experiment")
    out: Dict[str, Any] = {"experiment": exp}

    if "n" in data:
        n = _number(data, "n", integer=True)
        if n < 16 or n % 2:
            raise ConfigError(f"'n' must be an even integer >= 16, got {n}", "n")
        out["n"] = n
    if "tol" in data:
        out["tol"] = _number(data, "tol")
    if "max_iter" in data:
        out["max_iter"] = _number(data, "max_iter", integer=True)
    for key in ("radius", "background", "far_distance", "delta", "cap", "vol", "tau", "v"):
        if key in data:
            out[key] = _number(data, key)
    for key in ("deltas", "distances", "omegas"):
        if key in data:
            out[key] = _number_list(data, key)
    if "omega_re" in data:
        out["omega_re"] = _number_list(data, "omega_re")
    if "omega_im" in data:
        out["omega_im"] = _number_list(data, "omega_im", positive=False)
    if "geometry" in data:
        out["geometry"] = _check_geometry(data["geometry"])
    if "materials" in data:
        mats = data["materials"]
        if not isinstance(mats, dict):
            raise ConfigError("'materials' must be an object", "materials")
        extra = set(mats) - {"rho", "kappa", "rho_b", "kappa_b"}
        if extra:
            key = sorted(extra)[0]
            raise ConfigError(f"unknown key 'materials.{key}'", f"materials.{key}")
        for key in ("rho", "kappa", "rho_b", "kappa_b"):
            if key not in mats:
                raise ConfigError(f"missing key 'materials.{key}'", f"materials.{key}")
            _number(mats, key)
        out["materials"] = {k: float(mats[k]) for k in ("rho", "kappa", "rho_b", "kappa_b")}
    if "distance_convention" in data:
        conv = data["distance_convention"]
        if conv not in ("gap", "center"):
            raise ConfigError(f"'distance_convention' must be 'gap' or 'center', got {conv!r}",
                              "distance_convention")
        out["distance_convention"] = conv
    if "cross_delta" in data:
        if not isinstance(data["cross_delta"], bool):
            raise ConfigError("'cross_delta' must be a boolean", "cross_delta")
        out["cross_delta"] = data["cross_delta"]
    if "objective" in data:
        if data["objective"] not in ("eig", "svd", "arnoldi"):
            raise ConfigError("'objective' must be 'eig', 'svd' or 'arnoldi'", "objective")
        out["objective"] = data["objective"]
    if "direction" in data:
        d = data["direction"]
        if not (isinstance(d, list) and len(d) == 2 and all(isinstance(x, (int, float)) for x in d)
                and math.hypot(*d) > 0):
            raise ConfigError("'direction' must be a nonzero 2-vector", "direction")
        out["direction"] = (float(d[0]), float(d[1]))
    if "seeds" in data:
        seeds = data["seeds"]
        ok = isinstance(seeds, list) and all(
            isinstance(pair, list) and len(pair) == 2 and all(
                isinstance(c, list) and len(c) == 2 and all(isinstance(x, (int, float)) for x in c)
                for c in pair) for pair in seeds)
        if not ok or not seeds:
            raise ConfigError("'seeds' must be a list of [[re, im], [re, im]] pairs", "seeds")
        out["seeds"] = [[[float(x) for x in c] for c in pair] for pair in seeds]
    if "output_dir" in data:
        if not isinstance(data["output_dir"], str) or not data["output_dir"]:
            raise ConfigError("'output_dir' must be a non-empty string", "output_dir")
        out["output_dir"] = data["output_dir"]

    _apply_defaults(out)
    cfg = ExperimentConfig(**out)
    _check_requirements(cfg)
    return cfg


def _apply_defaults(out: Dict[str, Any]) -> None:
    exp = out["experiment"]
    if exp == "table1":
        out.setdefault("deltas", list(TABLE1_DELTAS))
    if exp in ("table2", "distance_sweep"):
        out.setdefault("materials", dict(TWO_BUBBLE_MATERIALS))
    if exp == "table2":
        out.setdefault("distances", list(TABLE2_DISTANCES))


def _check_requirements(cfg: ExperimentConfig) -> None:
    exp = cfg.experiment
    needs = {
        "distance_sweep": ("distances", "omega_re", "omega_im"),
        "spectrum_map": ("omega_re", "omega_im"),
        "scatter_sweep": ("omegas",),
        "formula3d": ("cap", "vol", "tau", "v", "delta"),
    }.get(exp, ())
    for key in needs:
        if getattr(cfg, key) is None:
            raise ConfigError(f"experiment '{exp}' requires '{key}'", key)
    if exp in ("spectrum_map", "scatter_sweep") and cfg.materials is None and cfg.delta is None:
        raise ConfigError(f"experiment '{exp}' requires 'materials' or 'delta'", "materials")
    if exp == "table2" and cfg.seeds is not None and len(cfg.seeds) != len(cfg.distances):
        raise ConfigError("'seeds' must have one pair per distance", "seeds")


def parse_config(text: str) -> ExperimentConfig:
    """Parse a JSON document into a validated :class:`ExperimentConfig`."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"JSON parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    return build_config(data)


def serialize_config(cfg: ExperimentConfig) -> str:
    return json.dumps(cfg.to_dict(), indent=2, sort_keys=True)
