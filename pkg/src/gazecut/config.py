"""Run configuration: one JSON file plus flag overrides.

Defaults reproduce the reference operating point (t_a=0.30, t_b=0.10,
t_c=0.05, t_d=0.10), so a run with no config file uses that combination.
"""

import hashlib
import json
from dataclasses import asdict, dataclass
from pathlib import Path

from .cut_detector import Thresholds
from .optical_flow import FlowConfig


class ConfigError(Exception):
    """Invalid run configuration."""


@dataclass
class RunConfig:
    alpha: float = 1.0
    iterations: int = 8
    gaussian_sigma: float = 1.0
    flow_mode: str = "literal-recursion"
    t_a: float = 0.30
    t_b: float = 0.10
    t_c: float = 0.05
    t_d: float = 0.10
    canny_low: float = 30.0
    canny_high: float = 90.0
    canny_sigma: float = 1.4
    skin_model: str | None = None
    min_run: int = 1

    def flow_config(self) -> FlowConfig:
        try:
            return FlowConfig(alpha=self.alpha, iterations=self.iterations,
                              gaussian_sigma=self.gaussian_sigma, mode=self.flow_mode)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def thresholds(self) -> Thresholds:
        try:
            return Thresholds(t_a=self.t_a, t_b=self.t_b, t_c=self.t_c, t_d=self.t_d)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def validate(self):
        self.flow_config()
        self.thresholds()
        if not 0 <= self.canny_low <= self.canny_high:
            raise ConfigError("canny thresholds must satisfy 0 <= low <= high")
        if self.canny_sigma < 0:
            raise ConfigError("canny_sigma must be >= 0")
        if self.min_run < 1:
            raise ConfigError("min_run must be >= 1")
        return self

    def config_hash(self) -> str:
        payload = json.dumps(asdict(self), sort_keys=True)
        return hashlib.sha256(payload.encode()).hexdigest()[:12]


def load_config(path=None, overrides=None) -> RunConfig:
    """Build a RunConfig from an optional JSON file plus override fields."""
    fields = {}
    if path is not None:
        p = Path(path)
        if not p.is_file():
            raise ConfigError(f"config file not found: {p}")
        try:
            fields = json.loads(p.read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{p}: invalid JSON ({exc})") from exc
        if not isinstance(fields, dict):
            raise ConfigError(f"{p}: config must be a JSON object")
        known = set(RunConfig.__dataclass_fields__)
        unknown = set(fields) - known
        if unknown:
            raise ConfigError(f"{p}: unknown config keys: {sorted(unknown)}")
    if overrides:
        fields.update({k: v for k, v in overrides.items() if v is not None})
    try:
        cfg = RunConfig(**fields)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc
    return cfg.validate()
