"""Gravity versus the sphere-plane Casimir bound over a (mass, distance) grid.

The competing force is the ideal-conductor proximity-force result

    F = eta * pi**3 * hbar * c * R / (360 d**3)

used as an upper bound; ``eta`` folds in coating/shielding derating.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .constants import AMU, C, G, HBAR
from .exceptions import ConfigurationError

DEFAULT_DENSITY = 2200.0  # kg m^-3, fused silica
DEFAULT_MASS_RANGE = (1e6 * AMU, 1e12 * AMU)
DEFAULT_DISTANCE_RANGE = (1e-7, 1e-4)
DEFAULT_GRID = (64, 64)

_PFA_PREFACTOR = math.pi**3 * HBAR * C / 360.0


@dataclass(frozen=True)
class CasimirModel:
    eta: float = 1.0
    density: float = DEFAULT_DENSITY
    # fixed sphere radius; when None it follows from mass and density
    radius: float | None = None
    geometry: str = "sphere-plane"

    def __post_init__(self):
        if not 0 < self.eta <= 1:
            raise ConfigurationError(f"conductor_reduction_eta must be in (0, 1], got {self.eta!r}")
        if not self.density > 0:
            raise ConfigurationError("density must be > 0")
        if self.radius is not None and not self.radius > 0:
            raise ConfigurationError("radius must be > 0")
        if self.geometry != "sphere-plane":
            raise ConfigurationError("only the sphere-plane geometry is supported")

    def sphere_radius(self, mass):
        if self.radius is not None:
            return np.full(np.shape(mass), self.radius) if np.ndim(mass) else self.radius
        return np.cbrt(3.0 * np.asarray(mass) / (4.0 * math.pi * self.density))


def sphere_radius_from_mass(mass, density=DEFAULT_DENSITY):
    return np.cbrt(3.0 * np.asarray(mass, dtype=float) / (4.0 * math.pi * density))


def casimir_force_sphere_plane(R, d, eta=1.0):
    return eta * _PFA_PREFACTOR * R / (d * d * d)


def gravitational_acceleration(M, d):
    return G * M / (d * d)


def accel_pair(M, m_t, R, d, model: CasimirModel | None = None):
    """``(a_grav, a_casimir)``; gravity depends only on the source mass."""
    eta = model.eta if model is not None else 1.0
    return gravitational_acceleration(M, d), casimir_force_sphere_plane(R, d, eta) / m_t


@dataclass
class ScanGrid:
    mass_axis: np.ndarray
    distance_axis: np.ndarray
    grav_accel: np.ndarray
    casimir_accel: np.ndarray
    log10_ratio: np.ndarray
    radius_axis: np.ndarray = field(default=None)
    test_mass: float = float("nan")
    eta: float = 1.0

    @property
    def shape(self):
        return self.grav_accel.shape


def _log_axis(lo, hi, n, name):
    if not (lo > 0 and hi > 0):
        raise ConfigurationError(f"{name} range must be positive")
    if n < 2:
        raise ConfigurationError(f"{name} grid needs at least 2 points")
    if lo == hi:
        raise ConfigurationError(f"{name} range is empty")
    return np.logspace(math.log10(lo), math.log10(hi), int(n))


def worker_count(threads: int | None = None) -> int:
    if threads is None:
        threads = int(os.environ.get("GQR_THREADS", "0") or 0)
    if threads < 0:
        raise ConfigurationError("GQR_THREADS must be >= 0")
    return threads or (os.cpu_count() or 1)


def feasibility_scan(mass_range=DEFAULT_MASS_RANGE, distance_range=DEFAULT_DISTANCE_RANGE,
                     grid_dims=DEFAULT_GRID, test_mass: float = 1e6 * AMU,
                     model: CasimirModel | None = None, threads: int | None = None) -> ScanGrid:
    """Fill a log-spaced grid of gravitational and Casimir accelerations.

    Rows run over source mass, columns over distance.  Each row is computed
    independently on identical-length arrays, so the result does not depend
    on the worker count.
    """
    model = model or CasimirModel()
    if not test_mass > 0:
        raise ConfigurationError("test mass must be > 0")
    masses = _log_axis(*mass_range, grid_dims[0], "mass")
    distances = _log_axis(*distance_range, grid_dims[1], "distance")
    radii = np.asarray(model.sphere_radius(masses), dtype=float)

    def row(i):
        a_g, a_c = accel_pair(masses[i], test_mass, radii[i], distances, model)
        return a_g, a_c, np.log10(a_g / a_c)

    n = worker_count(threads)
    if n == 1:
        rows = [row(i) for i in range(len(masses))]
    else:
        with ThreadPoolExecutor(max_workers=n) as pool:
            rows = list(pool.map(row, range(len(masses))))
    grav, cas, ratio = (np.vstack(parts) for parts in zip(*rows))
    return ScanGrid(masses, distances, grav, cas, ratio, radii, float(test_mass), model.eta)


@dataclass
class FeasibleRegion:
    mask: np.ndarray
    contour: list[tuple[float, float]]
    status: str

    @property
    def any(self) -> bool:
        return bool(self.mask.any())


def _crossings(log_axis, values):
    """Log-linear zero crossings of ``values`` sampled along ``log_axis``."""
    out = []
    for j in range(len(values) - 1):
        a, b = values[j], values[j + 1]
        if a == 0:
            out.append(log_axis[j])
        elif a * b < 0:
            out.append(log_axis[j] + (log_axis[j + 1] - log_axis[j]) * a / (a - b))
    if len(values) and values[-1] == 0:
        out.append(log_axis[-1])
    return out


def feasible_region(grid: ScanGrid, threshold_ratio: float = 1.0) -> FeasibleRegion:
    """Cells where ``a_grav >= threshold_ratio * a_casimir`` and the boundary.

    The boundary is interpolated linearly in log-log coordinates, along
    rows (fixed mass) and columns (fixed distance).
    """
    if not threshold_ratio > 0:
        raise ConfigurationError("threshold_ratio must be > 0")
    with np.errstate(over="ignore"):
        mask = grid.grav_accel >= threshold_ratio * grid.casimir_accel
    if not mask.any():
        return FeasibleRegion(mask, [], "no feasible cell")
    margin = grid.log10_ratio - math.log10(threshold_ratio)
    log_m = np.log10(grid.mass_axis)
    log_d = np.log10(grid.distance_axis)
    points = set()
    for i, m in enumerate(grid.mass_axis):
        for x in _crossings(log_d, margin[i]):
            points.add((float(m), float(10.0**x)))
    for j, d in enumerate(grid.distance_axis):
        for x in _crossings(log_m, margin[:, j]):
            points.add((float(10.0**x), float(d)))
    status = "all feasible" if mask.all() else "ok"
    return FeasibleRegion(mask, sorted(points), status)
