"""Newtonian field of a source mass prepared in a two-slit spatial superposition.

Three hypotheses for how the superposed mass gravitates are supported:

``COLLAPSED``
    Each shot the source sits behind exactly one slit (probability 1/2 each),
    sampled from a counter-based generator keyed by ``(seed, shot_index)``.
``MEAN_FIELD``
    The source gravitates as its probability-weighted mass density: two
    half-mass point sources whose fields add.
``SUPERPOSED``
    Each branch carries the full mass and its own field.  No averaged field
    exists; callers receive both branch fields, tagged.

All geometry lives in the x-y plane with the slit barrier at ``x = 0``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .constants import G
from .exceptions import ConfigurationError, SingularityError


class Hypothesis(str, enum.Enum):
    COLLAPSED = "Collapsed"
    MEAN_FIELD = "MeanField"
    SUPERPOSED = "Superposed"

    @classmethod
    def parse(cls, value: "str | Hypothesis") -> "Hypothesis":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("_", "").replace("-", "")
        for member in cls:
            if member.value.lower() == key:
                return member
        raise ConfigurationError(
            f"unknown hypothesis {value!r}; expected one of "
            f"{[m.value for m in cls]}"
        )


@dataclass(frozen=True)
class GravityHypothesis:
    tag: Hypothesis
    rng_seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "tag", Hypothesis.parse(self.tag))
        seed = int(self.rng_seed)
        if not 0 <= seed < 2**64:
            raise ConfigurationError("rng_seed must fit in an unsigned 64-bit integer")
        object.__setattr__(self, "rng_seed", seed)


@dataclass(frozen=True)
class SourceSpec:
    mass_M: float
    radius_R: float
    slit_positions: tuple[float, float]
    slit_width_sigma: float

    def __post_init__(self):
        y1, y2 = (float(v) for v in self.slit_positions)
        object.__setattr__(self, "slit_positions", (y1, y2))
        for name in ("mass_M", "radius_R", "slit_width_sigma"):
            value = float(getattr(self, name))
            if not (math.isfinite(value) and value > 0):
                raise ConfigurationError(f"{name} must be > 0, got {value!r}")
            object.__setattr__(self, name, value)
        if not (math.isfinite(y1) and math.isfinite(y2)) or y1 == y2:
            raise ConfigurationError("slit positions must be finite and distinct")

    @property
    def separation(self) -> float:
        y1, y2 = self.slit_positions
        return abs(y2 - y1)

    @property
    def centroid(self) -> np.ndarray:
        y1, y2 = self.slit_positions
        return np.array([0.0, 0.5 * (y1 + y2)])

    def branch_position(self, i: int) -> np.ndarray:
        return np.array([0.0, self.slit_positions[i]])


@dataclass(frozen=True)
class Branch:
    weight: float
    position: np.ndarray = field(compare=False)
    mass: float
    label: str


@dataclass(frozen=True)
class BranchSet:
    hypothesis: Hypothesis
    branches: tuple[Branch, ...]

    def __iter__(self):
        return iter(self.branches)

    def __len__(self):
        return len(self.branches)

    def __getitem__(self, i):
        return self.branches[i]


def point_field(mass, source_pos, field_point):
    """Acceleration at ``field_point`` due to a point ``mass`` at ``source_pos``.

    Points toward the source with magnitude ``G * mass / r**2``.
    """
    src = np.asarray(source_pos, dtype=float)
    sep = src - np.asarray(field_point, dtype=float)
    r2 = float(sep @ sep)
    if r2 == 0.0:
        raise SingularityError(f"field point coincides with source at {tuple(src)}")
    r = math.sqrt(r2)
    return (G * mass / (r2 * r)) * sep


def hypothesis_branches(source: SourceSpec, hyp: GravityHypothesis) -> BranchSet:
    tag = hyp.tag
    M = source.mass_M
    if tag is Hypothesis.COLLAPSED:
        weights, masses = (0.5, 0.5), (M, M)
    elif tag is Hypothesis.MEAN_FIELD:
        weights, masses = (1.0, 1.0), (0.5 * M, 0.5 * M)
    else:
        a = 1.0 / math.sqrt(2.0)
        weights, masses = (a, a), (M, M)
    branches = tuple(
        Branch(w, source.branch_position(i), m, f"y{i + 1}")
        for i, (w, m) in enumerate(zip(weights, masses))
    )
    return BranchSet(tag, branches)


def shot_branches(seed: int, n_shots: int, start: int = 0) -> np.ndarray:
    """Branch index (0 or 1) chosen for shots ``start .. start + n_shots - 1``.

    Shot ``k`` reads the first word of Philox block ``k`` under key ``seed``,
    so any shot can be regenerated on its own, on any platform.
    """
    if n_shots < 0 or start < 0:
        raise ConfigurationError("shot counts and indices must be non-negative")
    if n_shots == 0:
        return np.zeros(0, dtype=np.int8)
    bitgen = np.random.Philox(key=int(seed), counter=int(start))
    words = bitgen.random_raw(4 * n_shots)[::4]
    return (words >> np.uint64(63)).astype(np.int8)


def collapsed_branch(seed: int, shot_index: int) -> int:
    return int(shot_branches(seed, 1, start=shot_index)[0])


def effective_field(branches: BranchSet, hyp: GravityHypothesis, field_point, shot_index: int = 0):
    """Field seen at ``field_point`` under ``hyp``.

    Returns a single vector for ``MEAN_FIELD`` and ``COLLAPSED`` (the branch
    picked for ``shot_index``), and a ``{label: vector}`` dict for
    ``SUPERPOSED``.
    """
    tag = hyp.tag
    if tag is Hypothesis.MEAN_FIELD:
        total = np.zeros(2)
        for b in branches:
            total = total + point_field(b.mass, b.position, field_point)
        return total
    if tag is Hypothesis.COLLAPSED:
        b = branches[collapsed_branch(hyp.rng_seed, shot_index)]
        return point_field(b.mass, b.position, field_point)
    return {b.label: point_field(b.mass, b.position, field_point) for b in branches}
