"""Run configuration: strict JSON schema, canonical hashing, object builders."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass

from .geometry import DomainSpec, TriMesh, build_domain
from .material import MaterialModel
from .pressure import PressureField, builtin_pressure, extend_pressure
from .studies import SolverOptions


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending key."""


_NUMBER = (int, float)

# key -> (required, validator); nested sections hold their own tables
_DOMAIN_KEYS = {"kind": True, "params": False, "resolution": True}
_MATERIAL_KEYS = {"c1": True, "c2": True, "p": True, "q": True}
_PRESSURE_KEYS = {"name": True, "params": False, "variant": False}
_SOLVER_KEYS = {"grad_tol": False, "max_iter": False, "multistart_angles": False,
                "noise_amplitude": False, "memory": False}
_EXTENSION_KEYS = {"r_inner": False, "r_outer": False, "delta": False}
_STUDY_KEYS = {"resolutions": False, "rotation_grid": False, "refine_tol": False,
               "lambda_exponent": False, "arc_samples": False}
_OUTPUT_KEYS = {"json": False, "csv": False, "svg": False}
_TOP_KEYS = {"domain": True, "material": True, "pressure": True, "solver": False,
             "extension": False, "study": False, "eps_list": False, "seed": False,
             "output": False}


def _check_section(section, table, prefix):
    if not isinstance(section, dict):
        raise ConfigError(f"section {prefix!r} must be an object")
    for key in section:
        if key not in table:
            raise ConfigError(f"unknown key {prefix}.{key}")
    for key, required in table.items():
        if required and key not in section:
            raise ConfigError(f"missing key {prefix}.{key}")


def validate_config(cfg: dict) -> None:
    if not isinstance(cfg, dict):
        raise ConfigError("configuration must be a JSON object")
    for key in cfg:
        if key not in _TOP_KEYS:
            raise ConfigError(f"unknown key {key}")
    for key, required in _TOP_KEYS.items():
        if required and key not in cfg:
            raise ConfigError(f"missing key {key}")

    _check_section(cfg["domain"], _DOMAIN_KEYS, "domain")
    _check_section(cfg["material"], _MATERIAL_KEYS, "material")
    _check_section(cfg["pressure"], _PRESSURE_KEYS, "pressure")
    if "solver" in cfg:
        _check_section(cfg["solver"], _SOLVER_KEYS, "solver")
    if "extension" in cfg:
        _check_section(cfg["extension"], _EXTENSION_KEYS, "extension")
    if "study" in cfg:
        _check_section(cfg["study"], _STUDY_KEYS, "study")
    if "output" in cfg:
        _check_section(cfg["output"], _OUTPUT_KEYS, "output")

    for key in ("c1", "c2", "p", "q"):
        if not isinstance(cfg["material"][key], _NUMBER):
            raise ConfigError(f"material.{key} must be a number")
    if not isinstance(cfg["domain"]["resolution"], int):
        raise ConfigError("domain.resolution must be an integer")
    if "eps_list" in cfg:
        eps = cfg["eps_list"]
        if not isinstance(eps, list) or not eps or not all(isinstance(e, _NUMBER) and e > 0 for e in eps):
            raise ConfigError("eps_list must be a non-empty list of positive numbers")
    if "seed" in cfg and not isinstance(cfg["seed"], int):
        raise ConfigError("seed must be an integer")

    try:
        DomainSpec.from_config(cfg["domain"]).validate()
        MaterialModel.from_config(cfg["material"])
        builtin_pressure(cfg["pressure"]["name"], cfg["pressure"].get("params"),
                         cfg["pressure"].get("variant"))
    except ConfigError:
        raise
    except Exception as exc:  # normalize construction errors to config errors
        raise ConfigError(str(exc)) from exc


def load_config(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            cfg = json.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    validate_config(cfg)
    return cfg


def config_hash(cfg: dict) -> str:
    canonical = json.dumps(cfg, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


@dataclass
class RunContext:
    """Validated configuration plus lazily built solver inputs."""

    config: dict
    hash: str

    def __post_init__(self):
        self._meshes: dict[int, TriMesh] = {}
        self._pi_hat: PressureField | None = None

    @classmethod
    def from_config(cls, cfg: dict) -> "RunContext":
        validate_config(cfg)
        return cls(config=cfg, hash=config_hash(cfg))

    @property
    def seed(self) -> int:
        return int(self.config.get("seed", 0))

    @property
    def material(self) -> MaterialModel:
        return MaterialModel.from_config(self.config["material"])

    @property
    def pressure(self) -> PressureField:
        sec = self.config["pressure"]
        return builtin_pressure(sec["name"], sec.get("params"), sec.get("variant"))

    @property
    def domain_spec(self) -> DomainSpec:
        return DomainSpec.from_config(self.config["domain"])

    def mesh(self, resolution: int | None = None) -> TriMesh:
        res = int(resolution) if resolution is not None else self.domain_spec.resolution
        if res not in self._meshes:
            spec = DomainSpec.from_config({**self.config["domain"], "resolution": res})
            self._meshes[res] = build_domain(spec)
        return self._meshes[res]

    @property
    def pressure_extended(self) -> PressureField:
        if self._pi_hat is None:
            spec = self.domain_spec
            ext = self.config.get("extension", {}) or {}
            r_out = float(ext.get("r_outer") or 1.1 * spec.outer_radius)
            if spec.inner_radius > 0.0:
                r_in = float(ext.get("r_inner") or 0.9 * spec.inner_radius)
                delta = float(ext.get("delta") or 0.5 * r_in)
            else:
                r_in = None
                delta = float(ext.get("delta") or 0.5 * spec.outer_radius)
            self._pi_hat = extend_pressure(self.pressure, r_in, r_out, delta)
        return self._pi_hat

    @property
    def solver_options(self) -> SolverOptions:
        return SolverOptions.from_config(self.config.get("solver"))

    @property
    def eps_list(self) -> list[float]:
        return [float(e) for e in self.config.get("eps_list", [0.08, 0.04, 0.02, 0.01])]

    @property
    def study_resolutions(self) -> list[int]:
        study = self.config.get("study", {}) or {}
        if "resolutions" in study:
            return [int(r) for r in study["resolutions"]]
        return [self.domain_spec.resolution]

    @property
    def rotation_grid(self) -> int:
        return int((self.config.get("study", {}) or {}).get("rotation_grid", 1024))

    @property
    def lambda_exponent(self) -> float:
        return float((self.config.get("study", {}) or {}).get("lambda_exponent", 0.4))

    @property
    def arc_samples(self) -> int:
        return int((self.config.get("study", {}) or {}).get("arc_samples", 5))
