"""Experiment configuration: rates, initial state, time grid, oracle settings."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .channels import ChannelKind, NoiseRates

__all__ = [
    "ConfigError",
    "PRESETS",
    "Grid",
    "OracleSettings",
    "ExperimentConfig",
    "parse_state",
    "rates_for_channel",
]


class ConfigError(ValueError):
    """Invalid experiment configuration (CLI exit status 1)."""


_R2 = 1 / math.sqrt(2)
_R3 = 1 / math.sqrt(3)

# name -> (default amplitudes, basis slots filled by "name:x,y,z" overrides)
PRESETS: dict[str, tuple[tuple[complex, ...], tuple[int, ...] | None]] = {
    "bell-phi-plus": ((_R2, 0, 0, _R2), None),
    "phi1": ((_R3, _R3, 0, _R3), (0, 1, 3)),
    "psi1": ((_R3, _R3, _R3, 0), (0, 1, 2)),
    "composite-124": ((_R3, _R3, 0, _R3), None),
    "one-qubit-134": ((_R3, 0, _R3, _R3), None),
    "fidelity-floor": ((0.5, 0.5, 0.5, -0.5), None),
    "robust-23": ((0, _R2, _R2, 0), None),
}


def _normalize(a) -> np.ndarray:
    a = np.asarray(a, dtype=np.complex128)
    norm = np.linalg.norm(a)
    if not np.isfinite(norm) or norm == 0:
        raise ConfigError("state amplitudes must be finite and not all zero")
    return a / norm


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ConfigError(f"could not parse numbers from {text!r}") from None


def parse_state(value) -> np.ndarray:
    """Turn a preset name, ``"name:x,y,z"``, or explicit amplitudes into a normalized state.

    Explicit amplitudes are either 8 comma-separated numbers (re, im pairs),
    4 real numbers, or a list of 4 numbers / ``[re, im]`` pairs.  They are
    normalized, so ``1,0,0,1`` is the Bell state.
    """
    if isinstance(value, dict):
        name = value.get("preset")
        amps = value.get("amplitudes")
        if name is None:
            return parse_state(amps)
        if amps is None:
            return parse_state(name)
        return parse_state(f"{name}:{','.join(str(float(x)) for x in amps)}")
    if isinstance(value, (list, tuple, np.ndarray)):
        items = list(value)
        if len(items) == 4 and all(isinstance(x, (list, tuple)) for x in items):
            return _normalize([complex(float(re), float(im)) for re, im in items])
        if len(items) == 4:
            return _normalize([complex(x) for x in items])
        if len(items) == 8:
            return _normalize([complex(items[k], items[k + 1]) for k in range(0, 8, 2)])
        raise ConfigError(f"expected 4 amplitudes or 8 re/im numbers, got {len(items)}")
    if not isinstance(value, str):
        raise ConfigError(f"cannot interpret initial state {value!r}")

    text = value.strip()
    name, _, args = text.partition(":")
    if name in PRESETS:
        default, slots = PRESETS[name]
        if not args:
            return _normalize(default)
        if slots is None:
            raise ConfigError(f"preset {name!r} takes no amplitudes")
        values = _floats(args)
        if len(values) != len(slots):
            raise ConfigError(f"preset {name!r} takes {len(slots)} amplitudes, got {len(values)}")
        a = np.zeros(4, dtype=np.complex128)
        a[list(slots)] = values
        return _normalize(a)
    if name and not name[0].isdigit() and name[0] not in "+-.":
        raise ConfigError(f"unknown state preset {name!r}; known: {', '.join(PRESETS)}")
    return parse_state(_floats(text))


def rates_for_channel(kind, rates: NoiseRates) -> NoiseRates:
    """Switch off the fields a channel kind does not include."""
    kind = ChannelKind.parse(kind)
    keep = {
        ChannelKind.ONE_QUBIT_A: (0.0, rates.Gamma_A, 0.0),
        ChannelKind.ONE_QUBIT_B: (0.0, 0.0, rates.Gamma_B),
        ChannelKind.TWO_QUBIT_LOCAL: (0.0, rates.Gamma_A, rates.Gamma_B),
        ChannelKind.COLLECTIVE: (rates.Gamma, 0.0, 0.0),
        ChannelKind.FULL_TWELVE: (rates.Gamma, rates.Gamma_A, rates.Gamma_B),
    }[kind]
    return NoiseRates(*keep)


@dataclass(frozen=True)
class Grid:
    t_min: float = 0.0
    t_max: float = 5.0
    points: int = 51
    spacing: str = "linear"

    def __post_init__(self):
        if self.spacing not in ("linear", "log"):
            raise ConfigError(f"grid spacing must be 'linear' or 'log', got {self.spacing!r}")
        if int(self.points) != self.points or self.points < 2:
            raise ConfigError(f"grid needs at least 2 points, got {self.points!r}")
        if not (math.isfinite(self.t_min) and math.isfinite(self.t_max)):
            raise ConfigError("grid bounds must be finite")
        if self.t_min < 0 or self.t_min >= self.t_max:
            raise ConfigError(f"grid needs 0 <= t_min < t_max, got t_min={self.t_min!r}, t_max={self.t_max!r}")
        if self.spacing == "log" and self.t_min <= 0:
            raise ConfigError("log spacing needs t_min > 0")

    def times(self) -> np.ndarray:
        if self.spacing == "log":
            return np.geomspace(self.t_min, self.t_max, int(self.points))
        return np.linspace(self.t_min, self.t_max, int(self.points))


@dataclass(frozen=True)
class OracleSettings:
    enabled: bool = True
    n: int = 100_000
    seed: int = 2003


@dataclass(frozen=True)
class ExperimentConfig:
    channel: ChannelKind = ChannelKind.TWO_QUBIT_LOCAL
    rates: NoiseRates = field(default_factory=lambda: NoiseRates(0.0, 1.0, 1.0))
    initial: str | list = "bell-phi-plus"
    grid: Grid = field(default_factory=Grid)
    epsilon: float = 1e-6
    oracle: OracleSettings = field(default_factory=OracleSettings)

    def __post_init__(self):
        if not 0 < self.epsilon <= 0.1:
            raise ConfigError(f"epsilon must be in (0, 0.1], got {self.epsilon!r}")
        parse_state(self.initial)

    @property
    def state(self) -> np.ndarray:
        return parse_state(self.initial)

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = {"channel", "rates", "initial", "grid", "epsilon", "oracle"}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        try:
            kwargs = {}
            if "channel" in data:
                kwargs["channel"] = ChannelKind.parse(data["channel"])
            if "rates" in data:
                kwargs["rates"] = NoiseRates(**data["rates"])
            if "initial" in data:
                kwargs["initial"] = data["initial"]
            if "grid" in data:
                kwargs["grid"] = Grid(**data["grid"])
            if "epsilon" in data:
                kwargs["epsilon"] = float(data["epsilon"])
            if "oracle" in data:
                kwargs["oracle"] = OracleSettings(**data["oracle"])
            return cls(**kwargs)
        except ConfigError:
            raise
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from None

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        return cls.from_dict(data)

    def override(self, **changes) -> "ExperimentConfig":
        """Copy with top-level or nested (``rates``, ``grid``, ``oracle``) fields replaced."""
        rates = {k: changes.pop(k) for k in ("Gamma", "Gamma_A", "Gamma_B") if changes.get(k) is not None}
        grid = {k: changes.pop(k) for k in ("t_min", "t_max", "points", "spacing") if changes.get(k) is not None}
        oracle = {k: changes.pop(k) for k in ("n", "seed") if changes.get(k) is not None}
        top = {k: v for k, v in changes.items() if v is not None}
        try:
            if "channel" in top:
                top["channel"] = ChannelKind.parse(top["channel"])
            return replace(
                self,
                rates=replace(self.rates, **rates),
                grid=replace(self.grid, **grid),
                oracle=replace(self.oracle, **oracle),
                **top,
            )
        except ConfigError:
            raise
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from None
