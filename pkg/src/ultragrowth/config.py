"""Run-wide configuration: truncation, grids, tolerances.

A single :class:`RunConfig` value is threaded through every checker so that
window sizes and tolerances are pinned in one place.  The defaults match the
package-wide conventions: truncation P = 4096, log-spaced t grid with 512
points per decade on [1e-2, 1e6], doubling lambda grid 1/8 .. 16.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, fields, replace

import numpy as np

DEFAULT_TRUNCATION = 4096
DEFAULT_T_MIN = 1e-2
DEFAULT_T_MAX = 1e6
DEFAULT_POINTS_PER_DECADE = 512
# 1/8 .. 8 doubling, plus 16 so the doubled-index matrix checks stay on-grid.
DEFAULT_LAMBDAS = (0.125, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0)

LOG_TOL = 1e-9
ROUNDTRIP_TOL = 1e-6
STABILITY = 0.05

ENV_CONFIG_VAR = "ULTRAGROWTH_CONFIG"

_OUTPUT_FORMATS = ("json", "tsv")


@dataclass(frozen=True)
class RunConfig:
    """Immutable bundle of window sizes, grids and tolerances."""

    truncation: int = DEFAULT_TRUNCATION
    t_min: float = DEFAULT_T_MIN
    t_max: float = DEFAULT_T_MAX
    points_per_decade: int = DEFAULT_POINTS_PER_DECADE
    lambdas: tuple[float, ...] = DEFAULT_LAMBDAS
    log_tol: float = LOG_TOL
    roundtrip_tol: float = ROUNDTRIP_TOL
    stability: float = STABILITY
    norm_support: int = 1_000_000
    output: str = "json"

    def __post_init__(self) -> None:
        if self.truncation < 8:
            raise ValueError("truncation must be at least 8")
        if not (0.0 < self.t_min < self.t_max):
            raise ValueError("need 0 < t_min < t_max")
        if self.points_per_decade < 8:
            raise ValueError("points_per_decade must be at least 8")
        lams = tuple(float(x) for x in self.lambdas)
        if not lams or any(x <= 0 for x in lams) or list(lams) != sorted(set(lams)):
            raise ValueError("lambdas must be positive, strictly increasing")
        object.__setattr__(self, "lambdas", lams)
        for name in ("log_tol", "roundtrip_tol", "stability"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.output not in _OUTPUT_FORMATS:
            raise ValueError(f"output must be one of {_OUTPUT_FORMATS}")

    def t_grid(self, t_min: float | None = None, t_max: float | None = None) -> np.ndarray:
        """Log-spaced evaluation grid, `points_per_decade` samples per decade."""
        lo = self.t_min if t_min is None else t_min
        hi = self.t_max if t_max is None else t_max
        if not (0.0 < lo < hi):
            raise ValueError("need 0 < t_min < t_max")
        decades = np.log10(hi / lo)
        n = max(16, int(round(decades * self.points_per_decade)) + 1)
        return np.geomspace(lo, hi, n)

    def with_updates(self, **kw) -> "RunConfig":
        return replace(self, **kw)

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        if "lambdas" in data:
            data = dict(data, lambdas=tuple(data["lambdas"]))
        return cls(**data)

    @classmethod
    def from_file(cls, path: str) -> "RunConfig":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))

    @classmethod
    def from_env(cls) -> "RunConfig":
        """Default config, overridden by the file named in ULTRAGROWTH_CONFIG."""
        path = os.environ.get(ENV_CONFIG_VAR, "").strip()
        if not path:
            return cls()
        return cls.from_file(path)

    def to_dict(self) -> dict:
        return {
            "truncation": self.truncation,
            "t_min": self.t_min,
            "t_max": self.t_max,
            "points_per_decade": self.points_per_decade,
            "lambdas": list(self.lambdas),
            "log_tol": self.log_tol,
            "roundtrip_tol": self.roundtrip_tol,
            "stability": self.stability,
            "norm_support": self.norm_support,
            "output": self.output,
        }


DEFAULT_CONFIG = RunConfig()
