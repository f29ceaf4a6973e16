"""Flat key=value study configuration.

Format: one ``key=value`` per line, ``#`` comments, comma-separated lists.
Unknown keys are rejected; missing optional keys fall back to documented
defaults (gamma=2, a=1, mu1=mu2=nu=0.1, beta=0.5, k=1, L_poly=2, zbar=0.1,
A0=1, dealias=2/3, box_length=2*pi, callback_stride=10, output_dir="out").
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConfigError
from .grid import GridSpec
from .model import PhysicalParams

REQUIRED_KEYS = ("dim", "n", "epsilons", "delta", "seed", "dt", "t_end")

_PARAM_KEYS = {
    "a": "a",
    "gamma": "gamma",
    "mu1": "mu1",
    "mu2": "mu2",
    "nu": "nu",
    "beta": "beta",
    "k": "k",
    "L_poly": "L_poly",
    "zbar": "zbar",
    "A0": "A0",
}

_SCALAR_KEYS = {
    "dim": int,
    "n": int,
    "box_length": float,
    "delta": float,
    "seed": int,
    "dt": float,
    "t_end": float,
    "callback_stride": int,
    "dealias": float,
    "energy_tol": float,
    "stability_factor": float,
    "acoustic_factor": float,
    "rate_min": float,
    "rate_max": float,
    "rate_r2_min": float,
}


@dataclass(frozen=True)
class StudyConfig:
    grid: GridSpec
    params: PhysicalParams
    epsilons: tuple[float, ...]
    delta: float
    seed: int
    dt: float
    t_end: float
    callback_stride: int = 10
    output_dir: str = "out"
    energy_tol: float = 1e-3
    stability_factor: float = 2.0
    acoustic_factor: float = 3.0
    rate_min: float | None = None
    rate_max: float | None = None
    rate_r2_min: float | None = None

    def __post_init__(self):
        if not self.epsilons:
            raise ConfigError("epsilons must be nonempty")
        if any(not 0 < e <= 1 for e in self.epsilons):
            raise ConfigError("epsilons must lie in (0, 1]")
        if any(b >= a for a, b in zip(self.epsilons, self.epsilons[1:])):
            raise ConfigError("epsilons must be strictly descending")
        if self.delta < 0:
            raise ConfigError("delta must be nonnegative")
        if not self.dt > 0:
            raise ConfigError("dt must be positive")
        if self.t_end < 0:
            raise ConfigError("t_end must be nonnegative")
        if self.callback_stride < 1:
            raise ConfigError("callback_stride must be at least 1")


def parse_config(text: str) -> StudyConfig:
    """Parse and fully validate a study configuration."""
    raw: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected key=value, got {line.strip()!r}")
        key, _, value = stripped.partition("=")
        key, value = key.strip(), value.strip()
        if not key or not value:
            raise ConfigError(f"line {lineno}: empty key or value")
        if key in raw:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        if key not in _SCALAR_KEYS and key not in _PARAM_KEYS and key not in (
            "epsilons",
            "output_dir",
        ):
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        raw[key] = value

    for key in REQUIRED_KEYS:
        if key not in raw:
            raise ConfigError(f"missing required key {key!r}")

    def scalar(key: str, default=None):
        if key not in raw:
            return default
        caster = _SCALAR_KEYS[key]
        try:
            return caster(raw[key])
        except ValueError:
            raise ConfigError(f"key {key!r}: cannot parse {raw[key]!r}") from None

    try:
        epsilons = tuple(float(tok) for tok in raw["epsilons"].split(",") if tok.strip())
    except ValueError:
        raise ConfigError(f"key 'epsilons': cannot parse {raw['epsilons']!r}") from None

    n = scalar("n")
    if n % 2 != 0 or n < 8:
        raise ConfigError(f"key 'n': must be even and >= 8, got {n}")
    grid = GridSpec(
        dim=scalar("dim"),
        n=n,
        box_length=scalar("box_length", 2.0 * math.pi),
        dealias_fraction=scalar("dealias", 2.0 / 3.0),
    )
    params = PhysicalParams(
        **{field: float(raw[key]) for key, field in _PARAM_KEYS.items() if key in raw}
    )
    return StudyConfig(
        grid=grid,
        params=params,
        epsilons=epsilons,
        delta=scalar("delta"),
        seed=scalar("seed"),
        dt=scalar("dt"),
        t_end=scalar("t_end"),
        callback_stride=scalar("callback_stride", 10),
        output_dir=raw.get("output_dir", "out"),
        energy_tol=scalar("energy_tol", 1e-3),
        stability_factor=scalar("stability_factor", 2.0),
        acoustic_factor=scalar("acoustic_factor", 3.0),
        rate_min=scalar("rate_min"),
        rate_max=scalar("rate_max"),
        rate_r2_min=scalar("rate_r2_min"),
    )
