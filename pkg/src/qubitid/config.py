"""Flat key-value campaign configuration files.

The on-disk format is one ``key = value`` pair per line with ``#`` comments
and blank lines ignored.  Unknown keys are rejected so that typos surface
immediately, and every validation error names the offending key.  A manifest
written next to simulation outputs echoes the full effective configuration
(defaults included) and parses back as a config file, which makes any run
reproducible from its own outputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields

import numpy as np

from .models import DriveAxis, ExperimentDesign, SystemParams

__all__ = ["CampaignConfig", "ConfigError", "parse_config", "parse_config_text", "write_manifest"]

ESTIMATOR_NAMES = ("fourier", "timeseries", "bayes")


class ConfigError(ValueError):
    """Invalid or unknown configuration content."""


@dataclass
class CampaignConfig:
    """Everything needed to simulate and estimate one experiment campaign."""

    model: str
    omega: float
    gamma: float
    theta_prep: float
    theta_meas: float
    # time grid
    t_start: float = 0.0
    t_end: float = 0.14
    n_points: int = 100
    # sampling
    n_e: float = 100
    noise_model: str = "bernoulli"
    n_series: int = 1
    seed: int = 0
    # estimator selection and options
    estimators: str = "bayes"
    zero_pad_factor: int = 4
    mask_tol: float = 0.2
    stop_window: int = 3
    stop_tol: float = 1.0
    truncation_floor: float = 0.0  # 0 disables estimator-side truncation
    omega_min: float = math.nan  # nan: derived from omega
    omega_max: float = math.nan
    omega_points: int = 101
    gamma_min: float = math.nan  # nan: derived from gamma
    gamma_max: float = math.nan
    gamma_points: int = 81

    def __post_init__(self):
        self.model = str(self.model).lower()
        try:
            DriveAxis.from_string(self.model)
        except ValueError as exc:
            raise ConfigError(f"config key 'model': {exc}") from None
        _require(self.omega >= 0 and math.isfinite(self.omega), "omega", "must be finite and >= 0")
        _require(self.gamma >= 0 and math.isfinite(self.gamma), "gamma", "must be finite and >= 0")
        _require(math.isfinite(self.theta_prep), "theta_prep", "must be finite")
        _require(math.isfinite(self.theta_meas), "theta_meas", "must be finite")
        _require(self.t_end > self.t_start >= 0, "t_end", "time grid must satisfy 0 <= t_start < t_end")
        _require(self.n_points >= 2, "n_points", "need at least 2 grid points")
        _require(
            self.n_e == math.inf or (float(self.n_e).is_integer() and self.n_e >= 1),
            "n_e", "must be a positive integer or inf",
        )
        _require(self.noise_model in ("gaussian", "bernoulli"), "noise_model",
                 "must be 'gaussian' or 'bernoulli'")
        _require(self.n_series >= 1, "n_series", "must be >= 1")
        _require(0 <= int(self.seed) < 2**64, "seed", "must fit in 64 bits")
        for name in self.estimator_list():
            _require(name in ESTIMATOR_NAMES, "estimators", f"unknown estimator {name!r}")
        _require(self.zero_pad_factor >= 1, "zero_pad_factor", "must be >= 1")
        _require(0 <= self.mask_tol < 1, "mask_tol", "must be in [0, 1)")
        _require(self.stop_window >= 2, "stop_window", "must be >= 2")
        _require(self.stop_tol > 0, "stop_tol", "must be > 0")
        _require(0 <= self.truncation_floor < 1, "truncation_floor", "must be in [0, 1)")
        _require(self.omega_points >= 1, "omega_points", "must be >= 1")
        _require(self.gamma_points >= 1, "gamma_points", "must be >= 1")

    # -- derived pieces ----------------------------------------------------

    def estimator_list(self) -> list[str]:
        return [s.strip() for s in self.estimators.split(",") if s.strip()]

    def drive_axis(self) -> DriveAxis:
        return DriveAxis.from_string(self.model)

    def experiment_design(self) -> ExperimentDesign:
        return ExperimentDesign(self.theta_prep, self.theta_meas, self.drive_axis())

    def system_params(self) -> SystemParams:
        return SystemParams(self.omega, self.gamma)

    def times(self) -> np.ndarray:
        return np.linspace(self.t_start, self.t_end, self.n_points)

    def omega_grid(self) -> np.ndarray:
        lo, hi = self.omega_min, self.omega_max
        if math.isnan(lo):
            lo = 0.5 * self.omega if self.omega > 0 else 0.0
        if math.isnan(hi):
            hi = 1.5 * self.omega if self.omega > 0 else 1.0
        if not hi > lo:
            raise ConfigError("config key 'omega_max': grid must satisfy omega_min < omega_max")
        return np.linspace(lo, hi, self.omega_points)

    def gamma_grid(self) -> np.ndarray:
        lo, hi = self.gamma_min, self.gamma_max
        if math.isnan(lo):
            lo = max(0.1 * self.gamma, 1e-3) if self.gamma > 0 else 1e-3
        if math.isnan(hi):
            hi = 4.0 * self.gamma if self.gamma > 0 else 0.5
        if not hi > lo:
            raise ConfigError("config key 'gamma_max': grid must satisfy gamma_min < gamma_max")
        return np.linspace(lo, hi, self.gamma_points)


def _require(cond: bool, key: str, message: str) -> None:
    if not cond:
        raise ConfigError(f"config key '{key}': {message}")


_FLOAT_KEYS = {
    "omega", "gamma", "theta_prep", "theta_meas", "t_start", "t_end", "n_e",
    "mask_tol", "stop_tol", "truncation_floor",
    "omega_min", "omega_max", "gamma_min", "gamma_max",
}
_INT_KEYS = {
    "n_points", "n_series", "seed", "zero_pad_factor", "stop_window",
    "omega_points", "gamma_points",
}
_STR_KEYS = {"model", "noise_model", "estimators"}
_REQUIRED = ("model", "omega", "gamma", "theta_prep", "theta_meas")


def parse_config_text(text: str, source: str = "<config>") -> CampaignConfig:
    """Parse flat ``key = value`` configuration text into a CampaignConfig."""
    values: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {raw!r}")
        key, _, val = line.partition("=")
        key, val = key.strip(), val.strip()
        if key in values:
            raise ConfigError(f"{source}:{lineno}: duplicate key '{key}'")
        if key in _FLOAT_KEYS:
            values[key] = _parse_number(key, val, float)
        elif key in _INT_KEYS:
            values[key] = _parse_number(key, val, int)
        elif key in _STR_KEYS:
            values[key] = val
        else:
            raise ConfigError(f"{source}:{lineno}: unknown config key '{key}'")
    missing = [k for k in _REQUIRED if k not in values]
    if missing:
        raise ConfigError(f"{source}: missing required key(s): {', '.join(missing)}")
    return CampaignConfig(**values)


def _parse_number(key: str, val: str, kind):
    try:
        if kind is float:
            return float(val)
        f = float(val)
        if f == math.inf:
            return f
        if not f.is_integer():
            raise ValueError("not an integer")
        return int(f)
    except ValueError:
        raise ConfigError(f"config key '{key}': cannot parse {val!r} as {kind.__name__}") from None


def parse_config(path) -> CampaignConfig:
    """Read and parse a configuration file."""
    with open(path) as fh:
        return parse_config_text(fh.read(), source=str(path))


def _format_value(v) -> str:
    if isinstance(v, float):
        return f"{v:.17g}"
    return str(v)


def write_manifest(config: CampaignConfig, path, version: str, command: str) -> None:
    """Echo the full effective configuration; the file parses back as a config."""
    with open(path, "w") as fh:
        fh.write(f"# qubitid {version} manifest ({command})\n")
        for f in fields(config):
            fh.write(f"{f.name} = {_format_value(getattr(config, f.name))}\n")
