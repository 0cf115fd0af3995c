"""Run configuration: one JSON document, every field defaulted, unknown keys rejected."""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any

from .eigensystem import RadialGrid
from .molecule import I2, MoleculeParams
from .wavepacket import DEFAULT_ALPHA
from .wigner import PhaseSpaceSpec


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class TimeSpec:
    """A time given either as a fraction of T_rev or in atomic units."""

    fraction: Fraction | None = None
    au: float | None = None

    @classmethod
    def parse(cls, value) -> "TimeSpec":
        # strings are fractions of T_rev ("1/4", "0.25"); bare numbers are atomic units
        if isinstance(value, str):
            try:
                return cls(fraction=Fraction(value.strip()))
            except (ValueError, ZeroDivisionError) as exc:
                raise ConfigError(f"cannot parse time fraction {value!r}") from exc
        if isinstance(value, (int, float)) and not isinstance(value, bool) and math.isfinite(value):
            return cls(au=float(value))
        raise ConfigError(f"time must be a fraction string or a number of a.u., got {value!r}")

    def resolve(self, t_rev: float) -> float:
        if self.fraction is not None:
            return float(self.fraction) * t_rev
        return self.au

    @property
    def label(self) -> str:
        if self.fraction is not None:
            return "Trev" + str(self.fraction).replace("/", "-")
        return "au" + re.sub(r"[^0-9a-zA-Z.+-]", "_", repr(self.au))

    def to_json(self):
        return str(self.fraction) if self.fraction is not None else self.au


@dataclass(frozen=True)
class ValidateConfig:
    j: tuple[int, ...] = (0, 60, 81)
    n_check: int = 20
    fd_grid: RadialGrid = RadialGrid(3.8, 8.5, 4096)
    energy_formula: str = "corrected"


@dataclass(frozen=True)
class RunConfig:
    molecule: MoleculeParams = I2
    j: tuple[int, ...] = (0, 60, 81)
    alpha: float = DEFAULT_ALPHA
    n_prime: int | None = None
    times: tuple[TimeSpec, ...] = tuple(TimeSpec.parse(s) for s in ("0", "1/8", "1/4", "1/2"))
    rotation_time: TimeSpec = TimeSpec(fraction=Fraction(1, 4))
    radial_grid: RadialGrid = RadialGrid(4.2, 7.0, 2048)
    auto_widen: bool = True
    phase_grid: PhaseSpaceSpec = PhaseSpaceSpec()
    coarse_steps: int = 720
    convention: str = "lambda_bar"
    format: str = "csv"
    output_dir: str = "out"
    validate: ValidateConfig = field(default_factory=ValidateConfig)


def _take(obj: dict, allowed: set[str], where: str) -> dict:
    if not isinstance(obj, dict):
        raise ConfigError(f"{where} must be a JSON object")
    unknown = set(obj) - allowed
    if unknown:
        raise ConfigError(f"unknown key(s) in {where}: {', '.join(sorted(unknown))}")
    return obj


def _number(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{where} must be a number, got {value!r}")
    return float(value)


def _integer(value, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{where} must be an integer, got {value!r}")
    return value


def _j_list(value, where: str) -> tuple[int, ...]:
    if isinstance(value, dict):
        spec = _take(value, {"start", "stop", "step"}, where)
        start = _integer(spec.get("start", 0), f"{where}.start")
        stop = _integer(spec.get("stop", start), f"{where}.stop")
        step = _integer(spec.get("step", 1), f"{where}.step")
        if step <= 0:
            raise ConfigError(f"{where}.step must be positive")
        value = list(range(start, stop + 1, step))
    if not isinstance(value, list) or not value:
        raise ConfigError(f"{where} must be a non-empty list of integers or a {{start, stop, step}} range")
    js = tuple(_integer(v, where) for v in value)
    if any(v < 0 for v in js):
        raise ConfigError(f"{where} entries must be non-negative")
    if list(js) != sorted(js):
        raise ConfigError(f"{where} must be sorted ascending")
    return js


def _radial(value, where: str) -> tuple[RadialGrid, bool | None]:
    spec = _take(value, {"r_min", "r_max", "count", "auto_widen"}, where)
    base = RadialGrid(4.2, 7.0, 2048)
    try:
        grid = RadialGrid(
            _number(spec.get("r_min", base.r_min), f"{where}.r_min"),
            _number(spec.get("r_max", base.r_max), f"{where}.r_max"),
            _integer(spec.get("count", base.count), f"{where}.count"),
        )
    except ValueError as exc:
        raise ConfigError(f"{where}: {exc}") from exc
    widen = spec.get("auto_widen")
    if widen is not None and not isinstance(widen, bool):
        raise ConfigError(f"{where}.auto_widen must be a boolean")
    return grid, widen


def parse_config(doc: dict[str, Any]) -> RunConfig:
    """Validate a decoded JSON document and fill in defaults."""
    doc = _take(doc, {
        "molecule", "j", "alpha", "n_prime", "times", "rotation_time", "radial_grid",
        "phase_grid", "rotation", "format", "output_dir", "validate",
    }, "config")
    kw: dict[str, Any] = {}

    if "molecule" in doc:
        m = _take(doc["molecule"], {"beta", "mu", "r0", "d"}, "molecule")
        try:
            kw["molecule"] = MoleculeParams(**{
                k: _number(m.get(k, getattr(I2, k)), f"molecule.{k}") for k in ("beta", "mu", "r0", "d")
            })
        except ValueError as exc:
            raise ConfigError(f"molecule: {exc}") from exc
    if "j" in doc:
        kw["j"] = _j_list(doc["j"], "j")
    if "alpha" in doc:
        kw["alpha"] = _number(doc["alpha"], "alpha")
        if kw["alpha"] == 0:
            raise ConfigError("alpha must be non-zero")
    if "n_prime" in doc:
        v = doc["n_prime"]
        if v == "auto":
            kw["n_prime"] = None
        else:
            kw["n_prime"] = _integer(v, "n_prime")
            if kw["n_prime"] < 0:
                raise ConfigError("n_prime must be non-negative")
    if "times" in doc:
        if not isinstance(doc["times"], list) or not doc["times"]:
            raise ConfigError("times must be a non-empty list")
        kw["times"] = tuple(TimeSpec.parse(v) for v in doc["times"])
    if "rotation_time" in doc:
        kw["rotation_time"] = TimeSpec.parse(doc["rotation_time"])
    if "radial_grid" in doc:
        grid, widen = _radial(doc["radial_grid"], "radial_grid")
        kw["radial_grid"] = grid
        if widen is not None:
            kw["auto_widen"] = widen
    if "phase_grid" in doc:
        pg = _take(doc["phase_grid"], {"r_min", "r_max", "n_r", "p_min", "p_max", "n_p"}, "phase_grid")
        base = PhaseSpaceSpec()
        try:
            kw["phase_grid"] = PhaseSpaceSpec(
                _number(pg.get("r_min", base.r_min), "phase_grid.r_min"),
                _number(pg.get("r_max", base.r_max), "phase_grid.r_max"),
                _integer(pg.get("n_r", base.n_r), "phase_grid.n_r"),
                _number(pg.get("p_min", base.p_min), "phase_grid.p_min"),
                _number(pg.get("p_max", base.p_max), "phase_grid.p_max"),
                _integer(pg.get("n_p", base.n_p), "phase_grid.n_p"),
            )
        except ValueError as exc:
            raise ConfigError(f"phase_grid: {exc}") from exc
    if "rotation" in doc:
        rot = _take(doc["rotation"], {"coarse_steps", "convention"}, "rotation")
        if "coarse_steps" in rot:
            kw["coarse_steps"] = _integer(rot["coarse_steps"], "rotation.coarse_steps")
            if kw["coarse_steps"] < 3:
                raise ConfigError("rotation.coarse_steps must be at least 3")
        if "convention" in rot:
            if rot["convention"] not in ("lambda_bar", "index"):
                raise ConfigError("rotation.convention must be 'lambda_bar' or 'index'")
            kw["convention"] = rot["convention"]
    if "format" in doc:
        if doc["format"] not in ("csv", "bin"):
            raise ConfigError("format must be 'csv' or 'bin'")
        kw["format"] = doc["format"]
    if "output_dir" in doc:
        if not isinstance(doc["output_dir"], str):
            raise ConfigError("output_dir must be a string")
        kw["output_dir"] = doc["output_dir"]
    if "validate" in doc:
        v = _take(doc["validate"], {"j", "n_check", "fd_grid", "energy_formula"}, "validate")
        vk: dict[str, Any] = {}
        if "j" in v:
            vk["j"] = _j_list(v["j"], "validate.j")
        if "n_check" in v:
            vk["n_check"] = _integer(v["n_check"], "validate.n_check")
            if not 0 <= vk["n_check"] <= 30:
                raise ConfigError("validate.n_check must lie in 0..30")
        if "fd_grid" in v:
            vk["fd_grid"], _ = _radial(v["fd_grid"], "validate.fd_grid")
        if "energy_formula" in v:
            if v["energy_formula"] not in ("corrected", "as_printed"):
                raise ConfigError("validate.energy_formula must be 'corrected' or 'as_printed'")
            vk["energy_formula"] = v["energy_formula"]
        kw["validate"] = ValidateConfig(**vk)
    return RunConfig(**kw)


def load_config(path: str | Path | None) -> RunConfig:
    if path is None:
        return RunConfig()
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(doc)
