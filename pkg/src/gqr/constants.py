"""Physical constants (CODATA 2018) and unit conversion at the I/O boundary.

Everything inside the package works in SI double precision.  Unit tags are
only resolved when reading configuration or user input.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .exceptions import ConfigurationError


@dataclass(frozen=True)
class PhysicalConstants:
    G: float
    hbar: float
    h: float
    c: float
    amu: float


_H = 6.62607015e-34  # exact in SI since 2019

CODATA_2018 = PhysicalConstants(
    G=6.67430e-11,
    hbar=_H / (2.0 * math.pi),
    h=_H,
    c=299792458.0,
    amu=1.66053906660e-27,
)

G = CODATA_2018.G
HBAR = CODATA_2018.hbar
H = CODATA_2018.h
C = CODATA_2018.c
AMU = CODATA_2018.amu

# unit tag -> (scale to SI, dimension)
UNITS: dict[str, tuple[float, str]] = {
    "amu": (AMU, "mass"),
    "kg": (1.0, "mass"),
    "nm": (1e-9, "length"),
    "um": (1e-6, "length"),
    "m": (1.0, "length"),
    "s": (1.0, "time"),
    "m_per_s": (1.0, "speed"),
    "kg_per_m3": (1.0, "density"),
}


def _lookup(unit: str) -> float:
    try:
        return UNITS[unit][0]
    except KeyError:
        raise ConfigurationError(
            f"unknown unit tag {unit!r}; expected one of {sorted(UNITS)}"
        ) from None


def unit_dimension(unit: str) -> str:
    _lookup(unit)
    return UNITS[unit][1]


def to_si(value: float, unit: str) -> float:
    """Convert ``value`` expressed in ``unit`` to SI."""
    scale = _lookup(unit)
    value = float(value)
    if not math.isfinite(value):
        raise ConfigurationError(f"value must be finite, got {value!r}")
    if scale == 1.0:
        return value
    return value * scale


def from_si(value: float, unit: str) -> float:
    scale = _lookup(unit)
    if scale == 1.0:
        return float(value)
    return float(value) / scale
