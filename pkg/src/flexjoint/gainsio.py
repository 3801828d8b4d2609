"""Flat key = value files for controller gains and plant parameters."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .control import GainSet
from .fuzzy import FlrBounds
from .plant import PlantParams

GAIN_KEYS = ("kp1", "kd1", "kp2", "kd2")
BOUND_KEYS = ("dkp1_lo", "dkp1_hi", "dkd1_lo", "dkd1_hi",
              "dkp2_lo", "dkp2_hi", "dkd2_lo", "dkd2_hi")
PLANT_KEYS = ("m", "g", "l", "I_l", "I_m", "k", "mu")


class GainsFileError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


def _parse_kv(path, allowed) -> dict[str, float]:
    values: dict[str, float] = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise GainsFileError(f"expected 'key = value', got {raw!r}", lineno)
        key, _, val = line.partition("=")
        key = key.strip()
        if key not in allowed:
            raise GainsFileError(f"unknown key {key!r}", lineno)
        if key in values:
            raise GainsFileError(f"duplicate key {key!r}", lineno)
        try:
            values[key] = float(val.strip())
        except ValueError:
            raise GainsFileError(f"invalid number {val.strip()!r}", lineno) from None
    return values


@dataclass(frozen=True)
class LoadedGains:
    gains: GainSet
    bounds: FlrBounds
    repaired_pairs: tuple[str, ...]  # pairs whose (lo, hi) labels were swapped


def load_gains(path) -> LoadedGains:
    """Parse a gains file; missing regulator-bound keys default to 0 and
    any (lo, hi) pair stored in reversed order is normalized to (min, max),
    with the repair reported."""
    values = _parse_kv(path, set(GAIN_KEYS) | set(BOUND_KEYS))
    for key in GAIN_KEYS:
        if key not in values:
            raise GainsFileError(f"missing required key {key!r}")
    pairs = {}
    repaired = []
    for name in ("dkp1", "dkd1", "dkp2", "dkd2"):
        lo = values.get(f"{name}_lo", 0.0)
        hi = values.get(f"{name}_hi", 0.0)
        if lo > hi:
            repaired.append(name)
            lo, hi = hi, lo
        pairs[name] = (lo, hi)
    gains = GainSet(values["kp1"], values["kd1"], values["kp2"], values["kd2"])
    bounds = FlrBounds(**pairs)
    return LoadedGains(gains=gains, bounds=bounds, repaired_pairs=tuple(repaired))


def save_gains(path, gains: GainSet, bounds: FlrBounds | None = None) -> None:
    lines = [f"{k} = {float(getattr(gains, k))!r}" for k in GAIN_KEYS]
    if bounds is not None:
        for name in ("dkp1", "dkd1", "dkp2", "dkd2"):
            lo, hi = getattr(bounds, name)
            lines.append(f"{name}_lo = {float(lo)!r}")
            lines.append(f"{name}_hi = {float(hi)!r}")
    Path(path).write_text("\n".join(lines) + "\n")


def load_plant(path) -> PlantParams:
    """Plant-parameter overrides in the same key = value format; keys not
    present keep their defaults."""
    values = _parse_kv(path, set(PLANT_KEYS))
    return PlantParams(**values)
