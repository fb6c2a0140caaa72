"""Run configuration, dataset presets and flat ``key = value`` config files."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .geometry import Canvas
from .layout import CGL_CATEGORIES, PKU_CATEGORIES, CategoryTable
from .mixer import STRATEGIES
from .vlr import EPS_NON_UNDERLAY, EPS_UNDERLAY

__all__ = ["RunConfig", "PRESETS", "load_config_file"]

PRESETS = {
    "pku": {"k": 96, "alpha": 256, "categories": PKU_CATEGORIES},
    "cgl": {"k": 48, "alpha": 16, "categories": CGL_CATEGORIES},
}


@dataclass(frozen=True)
class RunConfig:
    p: int = 14
    k: int = 96
    alpha: int = 256
    eps_u: float = EPS_UNDERLAY
    eps_n: float = EPS_NON_UNDERLAY
    strategy: str = "pcc"
    seed: int = 0
    canvas: Canvas = Canvas(224, 224)
    preset: str = "pku"
    batch_size: int = 128
    workers: int = 1
    categories: CategoryTable = field(default=PKU_CATEGORIES)

    def __post_init__(self):
        if self.p < 1:
            raise ValueError(f"p must be positive, got {self.p}")
        if not 1 <= self.k <= self.p * self.p:
            raise ValueError(f"k={self.k} must be in [1, p^2={self.p * self.p}]")
        if self.alpha < 1:
            raise ValueError(f"alpha must be >= 1, got {self.alpha}")
        if self.batch_size < 2:
            raise ValueError(f"batch_size must be >= 2, got {self.batch_size}")
        if self.strategy not in STRATEGIES:
            raise ValueError(f"strategy must be one of {STRATEGIES}, got {self.strategy!r}")
        if not (0 < self.eps_u <= 1 and 0 < self.eps_n <= 1):
            raise ValueError("eps_u and eps_n must lie in (0, 1]")
        if self.canvas.width % self.p or self.canvas.height % self.p:
            raise ValueError(f"canvas {self.canvas.width}x{self.canvas.height} not divisible by p={self.p}")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")

    @classmethod
    def from_preset(cls, name: str, **overrides) -> "RunConfig":
        try:
            base = PRESETS[name]
        except KeyError:
            raise ValueError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None
        return cls(preset=name, **{**base, **overrides})

    @classmethod
    def build(cls, file_values: dict | None = None, **flags) -> "RunConfig":
        """Layer preset defaults, then config-file values, then non-None flags."""
        file_values = dict(file_values or {})
        flags = {k: v for k, v in flags.items() if v is not None}
        preset = flags.pop("preset", None) or file_values.pop("preset", None) or "pku"
        file_values.pop("preset", None)
        return cls.from_preset(preset, **{**file_values, **flags})


_COERCE = {
    "p": int, "k": int, "alpha": int, "eps_u": float, "eps_n": float,
    "strategy": str.lower, "seed": int, "canvas": Canvas.parse, "preset": str.lower,
    "batch_size": int, "workers": int,
}


def load_config_file(path: str | Path) -> dict:
    """Read ``key = value`` lines (``#`` comments allowed) into typed overrides."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in _COERCE:
            raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
        try:
            out[key] = _COERCE[key](value)
        except ValueError as exc:
            raise ValueError(f"{path}:{lineno}: {exc}") from None
    return out
