"""Regularized field expectation of a source mass behind two slits.

Position eigenstates at the slits are replaced by normalized 2-D Gaussians
of width ``sigma`` centred on ``(0, y_i)``.  The field expectation then
splits into two direct terms and a cross term; the cross term is reported
alongside, never folded into a field value.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .constants import G
from .exceptions import ConfigurationError, SingularityError
from .gravity import SourceSpec

BORN_NORM_TOL = 1e-8
CONVERGENCE_TOL = 1e-4


def welcher_weg_expectation(y1, y2):
    """Which-path expectation ``(y1**2 + y2**2) / 2``; no interference terms."""
    return 0.5 * (y1 * y1 + y2 * y2)


@dataclass(frozen=True)
class Grid2D:
    x: np.ndarray
    y: np.ndarray

    @classmethod
    def square(cls, center, extent, points):
        cx, cy = center
        half = 0.5 * extent
        return cls(np.linspace(cx - half, cx + half, points),
                   np.linspace(cy - half, cy + half, points))

    def mesh(self):
        return np.meshgrid(self.x, self.y, indexing="xy")

    @property
    def coarse(self) -> "Grid2D":
        return Grid2D(self.x[::2], self.y[::2])


def _trapezoid_weights(axis):
    h = np.diff(axis)
    w = np.zeros_like(axis)
    w[:-1] += 0.5 * h
    w[1:] += 0.5 * h
    return w


def trapezoid2d(values, grid: Grid2D) -> float:
    """2-D trapezoid rule with an order-independent final reduction.

    Rows are reduced with numpy's pairwise sum, then the row totals are
    combined with ``math.fsum`` (exactly rounded), so the result does not
    depend on how the grid is tiled.
    """
    wx = _trapezoid_weights(grid.x)
    wy = _trapezoid_weights(grid.y)
    rows = np.sum(values * wx[None, :], axis=1) * wy
    return math.fsum(rows.tolist())


@dataclass
class BornResult:
    value: float
    error_estimate: float

    def __float__(self):
        return self.value


def born_integral(f, density, grid: Grid2D) -> BornResult:
    """``integral f(x, y) * density(x, y) d^2r`` over ``grid``.

    ``f`` is called with the meshgrid arrays.  ``density`` is either an
    array on the grid or a callable like ``f``.  The error estimate compares
    the grid with its every-other-point subgrid.
    """
    X, Y = grid.mesh()
    rho = density(X, Y) if callable(density) else np.asarray(density, dtype=float)
    if rho.shape != X.shape:
        raise ConfigurationError("density does not match the grid")
    if len(grid.x) % 2 == 0 or len(grid.y) % 2 == 0:
        raise ConfigurationError("Born grid needs an odd number of points per axis")
    norm = trapezoid2d(rho, grid)
    if abs(norm - 1.0) > BORN_NORM_TOL:
        raise ConfigurationError(f"density integrates to {norm!r}, not 1")
    integrand = np.asarray(f(X, Y), dtype=float) * rho
    integrand = np.broadcast_to(integrand, X.shape)
    fine = trapezoid2d(integrand, grid)
    coarse = trapezoid2d(integrand[::2, ::2], grid.coarse)
    return BornResult(fine, abs(fine - coarse) / 3.0)


def gaussian_density(center, sigma):
    cx, cy = center

    def rho(X, Y):
        return np.exp(-((X - cx) ** 2 + (Y - cy) ** 2) / (2.0 * sigma * sigma)) / (2.0 * math.pi * sigma * sigma)

    return rho


@dataclass(frozen=True)
class RegularizationScheme:
    sigma: float
    grid_extent: float
    grid_points: int = 257

    def __post_init__(self):
        if not self.sigma > 0:
            raise ConfigurationError("regularization sigma must be > 0")
        if self.grid_points < 128:
            raise ConfigurationError("grid_points must be >= 128")
        if not self.grid_extent > 0:
            raise ConfigurationError("grid_extent must be > 0")

    @classmethod
    def default_for(cls, source: SourceSpec, sigma: float | None = None,
                    grid_points: int | None = None) -> "RegularizationScheme":
        """Smallest admissible extent; unless given, enough points for a spacing <= sigma/4."""
        sigma = sigma if sigma is not None else source.slit_width_sigma
        extent = 10.0 * max(sigma, source.separation)
        if grid_points is None:
            grid_points = max(257, math.ceil(4.0 * extent / sigma) | 1)
        return cls(sigma, extent, grid_points)

    def check(self, separation: float):
        if self.grid_extent < 10.0 * max(self.sigma, separation):
            raise ConfigurationError("grid_extent must be >= 10 * max(sigma, d)")

    def normalization_A(self) -> float:
        # each squared Gaussian integrates to 1 / (4 pi sigma^2)
        return 2.0 * math.pi * self.sigma**2


@dataclass
class FieldExpectation:
    term_direct_1: float
    term_direct_2: float
    term_cross: float
    total: float
    converged: bool
    error_estimate: float = 0.0
    scheme: RegularizationScheme | None = None
    field_point: tuple[float, float] = (0.0, 0.0)
    extras: dict = field(default_factory=dict)

    @property
    def terms(self):
        return (self.term_direct_1, self.term_direct_2, self.term_cross)


def _weighted(weight, GM, dist2):
    # zero weight wins over a coincident field point (0 * inf); anything else diverges
    if np.any((dist2 == 0) & (weight > 0)):
        raise SingularityError("field point coincides with a grid node of nonzero density; "
                               "move it or change grid_extent/grid_points")
    with np.errstate(divide="ignore", invalid="ignore"):
        out = weight * GM / dist2
    return np.where(weight > 0, out, 0.0)


def field_integrands(source: SourceSpec, field_point, sigma):
    """Integrands of the three terms as functions of the mesh ``(X, Y)``.

    Direct term i: ``g_i(r)^2 G M / |r0 - r|^2``.  Cross term:
    ``g_1(r) g_2(r) G M / (|r0 - r_1(r)| |r0 - r_2(r)|)`` where
    ``r_i(r) = r + (c_i - c)`` carries the overlap point ``r`` (centred on
    the slit midpoint ``c``) to each slit.
    """
    GM = G * source.mass_M
    c1, c2 = source.branch_position(0), source.branch_position(1)
    mid = 0.5 * (c1 + c2)
    x0, y0 = field_point
    g1 = gaussian_density(c1, sigma)
    g2 = gaussian_density(c2, sigma)

    def direct(i):
        g = g1 if i == 0 else g2

        def f(X, Y):
            return _weighted(g(X, Y) ** 2, GM, (x0 - X) ** 2 + (y0 - Y) ** 2)

        return f

    def cross(X, Y):
        s1 = np.hypot(x0 - (X + c1[0] - mid[0]), y0 - (Y + c1[1] - mid[1]))
        s2 = np.hypot(x0 - (X + c2[0] - mid[0]), y0 - (Y + c2[1] - mid[1]))
        return _weighted(g1(X, Y) * g2(X, Y), GM, s1 * s2)

    return direct(0), direct(1), cross


def _terms_on(grid: Grid2D, integrands, A):
    X, Y = grid.mesh()
    return [A * trapezoid2d(f(X, Y), grid) for f in integrands]


def regularized_field_expectation(source: SourceSpec, field_point,
                                  scheme: RegularizationScheme | None = None) -> FieldExpectation:
    """Three-term field expectation at ``field_point`` with Gaussian-regularized slits.

    ``A`` makes the two direct weights sum to one; the cross term is reported
    relative to the same normalization.  Convergence compares the grid with
    its every-other-point subgrid; failure is flagged, not raised.
    """
    scheme = scheme or RegularizationScheme.default_for(source)
    scheme.check(source.separation)
    field_point = (float(field_point[0]), float(field_point[1]))
    p = np.asarray(field_point)
    for i in range(2):
        if np.hypot(*(p - source.branch_position(i))) < 3.0 * scheme.sigma:
            raise ConfigurationError("field point lies within 3 sigma of a slit centre")
    points = scheme.grid_points | 1
    grid = Grid2D.square(source.centroid, scheme.grid_extent, points)
    integrands = field_integrands(source, field_point, scheme.sigma)
    A = scheme.normalization_A()
    fine = _terms_on(grid, integrands, A)
    coarse = _terms_on(grid.coarse, integrands, A)
    errs = [abs(f - c) / 3.0 for f, c in zip(fine, coarse)]
    scale = abs(fine[0]) + abs(fine[1])
    rel = max(errs) / scale if scale > 0 else math.inf
    d1, d2, cr = fine
    return FieldExpectation(
        term_direct_1=d1,
        term_direct_2=d2,
        term_cross=cr,
        total=d1 + d2 + cr,
        converged=bool(rel < CONVERGENCE_TOL),
        error_estimate=rel,
        scheme=scheme,
        field_point=field_point,
    )


REGIME_LABELS = ("classical", "linearized", "semiclassical",
                 "quantum-gravity-corner", "GQR-corner")


def regime_classifier(curvature_R, hbar_scale, source_fluctuation, *,
                      weak_field=1e-2, planck_curvature=1.0, large_fluctuation=1.0) -> str:
    """Coarse label for a point in (curvature, hbar, source fluctuation) space."""
    if min(curvature_R, hbar_scale, source_fluctuation) < 0:
        raise ConfigurationError("regime inputs must be non-negative")
    if hbar_scale == 0:
        if 0 < curvature_R < weak_field:
            return "linearized"
        return "classical"
    if curvature_R >= planck_curvature:
        return "quantum-gravity-corner"
    if source_fluctuation >= large_fluctuation and curvature_R < weak_field:
        return "GQR-corner"
    return "semiclassical"
