"""Run configuration: a flat ``key = value`` file in natural units."""

from configparser import ConfigParser
from dataclasses import dataclass, fields, replace

import numpy as np

from .splitter import QuadratureConfig


class ConfigError(ValueError):
    pass


GRID_KINDS = ("timelike", "spacelike")


@dataclass(frozen=True)
class RunConfig:
    mass: float = 1.0
    e2: float = 1.0
    abs_tol: float = 1e-14
    rel_tol: float = 1e-11
    max_subdivisions: int = 400
    threshold_delta: float = 1e-3
    window_radius: float = 1.0
    grid_min: float = 5.0
    grid_max: float = 100.0
    grid_count: int = 20
    grid_kind: str = "timelike"
    allow_threshold: bool = False
    output: str = ""

    def __post_init__(self):
        if not self.mass > 0:
            raise ConfigError("mass must be positive")
        if not (self.abs_tol > 0 and self.rel_tol > 0 and self.threshold_delta > 0):
            raise ConfigError("tolerances must be positive")
        if self.max_subdivisions < 1 or self.grid_count < 1:
            raise ConfigError("max_subdivisions and grid_count must be positive")
        if not self.window_radius > 0:
            raise ConfigError("window_radius must be positive")
        if self.grid_kind not in GRID_KINDS:
            raise ConfigError(f"grid_kind must be one of {GRID_KINDS}")
        if self.grid_min > self.grid_max:
            raise ConfigError("grid_min exceeds grid_max")

    @property
    def quadrature(self):
        return QuadratureConfig(self.abs_tol, self.rel_tol, self.max_subdivisions, self.threshold_delta)

    def thresholds(self):
        """p^2 values (in units of m^2 times m^2) where kernels have support edges."""
        return (self.mass**2, 4 * self.mass**2)

    def grid(self):
        """Rest-frame momenta with p^2 = m^2 * linspace(grid_min, grid_max, grid_count).

        Timelike points are (sqrt(p^2), 0, 0, 0), spacelike ones (0, sqrt(-p^2), 0, 0);
        grid bounds are in units of m^2 and are read as |p^2| for spacelike grids.
        """
        values = self.mass**2 * np.linspace(self.grid_min, self.grid_max, self.grid_count)
        if self.grid_kind == "timelike":
            if np.any(values <= 0):
                raise ConfigError("timelike grid needs grid_min > 0")
            if not self.allow_threshold:
                for thr in self.thresholds():
                    if np.any(np.abs(values - thr) < self.threshold_delta * thr):
                        raise ConfigError(f"grid touches the threshold p^2 = {thr}; set allow_threshold")
            return [np.array([np.sqrt(s), 0.0, 0.0, 0.0]) for s in values]
        if np.any(values <= 0):
            raise ConfigError("spacelike grid bounds are |p^2| and must be positive")
        return [np.array([0.0, np.sqrt(s), 0.0, 0.0]) for s in values]

    def with_overrides(self, **kwargs):
        return replace(self, **{k: v for k, v in kwargs.items() if v is not None})


_TYPES = {f.name: f.type for f in fields(RunConfig)}


def _coerce(key, raw):
    kind = _TYPES[key]
    try:
        if kind in (bool, "bool"):
            low = raw.strip().lower()
            if low not in ("true", "false", "1", "0", "yes", "no"):
                raise ValueError(raw)
            return low in ("true", "1", "yes")
        if kind in (int, "int"):
            return int(raw)
        if kind in (float, "float"):
            return float(raw)
        return raw.strip()
    except ValueError as exc:
        raise ConfigError(f"bad value for {key}: {raw!r}") from exc


def parse_config(text):
    parser = ConfigParser(inline_comment_prefixes=("#",), interpolation=None)
    try:
        parser.read_string("[run]\n" + text)
    except Exception as exc:
        raise ConfigError(f"unreadable config: {exc}") from exc
    values = {}
    for key, raw in parser.items("run"):
        if key not in _TYPES:
            raise ConfigError(f"unknown config key {key!r}")
        values[key] = _coerce(key, raw)
    return RunConfig(**values)


def load_config(path):
    try:
        with open(path) as fh:
            return parse_config(fh.read())
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc


def dump_config(cfg):
    return "".join(f"{f.name} = {getattr(cfg, f.name)}\n" for f in fields(RunConfig))
