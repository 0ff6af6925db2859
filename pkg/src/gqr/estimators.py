"""scikit-learn compatible wrappers so the physics composes with pipelines,
grid searches and ``clone``.

All estimators are stateless apart from the fitted feature count: ``fit``
only validates its input.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .casimir import DEFAULT_DENSITY, CasimirModel, accel_pair
from .constants import AMU
from .exceptions import ConfigurationError
from .interference import BranchPointerState, distinguishability, which_path_visibility
from .scattering import Numerics, deflection_analytic, deflection_numeric


def check_positive_features(X, n_features: int, names: tuple[str, ...]) -> np.ndarray:
    """Validate a 2-D float array with ``n_features`` strictly positive columns."""
    X = check_array(X, dtype=np.float64, ensure_2d=True)
    if X.shape[1] != n_features:
        raise ValueError(f"expected {n_features} columns {names}, got {X.shape[1]}")
    if np.any(X <= 0):
        bad = names[int(np.argwhere(X <= 0)[0, 1])]
        raise ValueError(f"column {bad!r} must be > 0")
    return X


class _StatelessMixin:
    _feature_names: tuple[str, ...] = ()
    _positive = True

    def _validate(self, X):
        if self._positive:
            return check_positive_features(X, len(self._feature_names), self._feature_names)
        X = check_array(X, dtype=np.float64)
        if X.shape[1] != len(self._feature_names):
            raise ValueError(f"expected columns {self._feature_names}, got {X.shape[1]}")
        return X

    def fit(self, X, y=None):
        X = self._validate(X)
        self.n_features_in_ = X.shape[1]
        return self

    def _check(self, X):
        check_is_fitted(self, "n_features_in_")
        return self._validate(X)


class FeasibilityTransformer(_StatelessMixin, TransformerMixin, BaseEstimator):
    """Map ``[source_mass, distance]`` rows to ``[a_grav, a_casimir, log10_ratio]``.

    Parameters
    ----------
    test_mass : float
        Test-particle mass in kg; the Casimir acceleration is ``F / test_mass``.
    eta : float
        Derating of the ideal-conductor bound, in (0, 1].
    density : float
        Sphere density used to turn the source mass into a radius.
    radius : float or None
        Fixed sphere radius, overriding ``density``.
    """

    _feature_names = ("mass", "distance")

    def __init__(self, test_mass=1e6 * AMU, eta=1.0, density=DEFAULT_DENSITY, radius=None):
        self.test_mass = test_mass
        self.eta = eta
        self.density = density
        self.radius = radius

    def transform(self, X):
        X = self._check(X)
        model = CasimirModel(self.eta, self.density, self.radius)
        M, d = X[:, 0], X[:, 1]
        a_g, a_c = accel_pair(M, self.test_mass, model.sphere_radius(M), d, model)
        return np.column_stack([a_g, a_c, np.log10(a_g / a_c)])

    def get_feature_names_out(self, input_features=None):
        return np.array(["a_grav", "a_casimir", "log10_ratio"], dtype=object)


class DeflectionRegressor(_StatelessMixin, RegressorMixin, BaseEstimator):
    """Predict the deflection angle from ``[source_mass, impact_parameter, speed]``.

    ``method="analytic"`` uses the Kepler closed form, ``"numeric"``
    integrates each orbit.
    """

    _feature_names = ("mass", "impact_parameter", "speed")

    def __init__(self, method="analytic", rel_tol=1e-10, abs_tol=1e-12):
        self.method = method
        self.rel_tol = rel_tol
        self.abs_tol = abs_tol

    def predict(self, X):
        X = self._check(X)
        if self.method == "analytic":
            return deflection_analytic(X[:, 0], X[:, 1], X[:, 2])
        if self.method == "numeric":
            num = Numerics(self.rel_tol, self.abs_tol)
            return np.array([deflection_numeric(M, b, v, num) for M, b, v in X])
        raise ConfigurationError(f"unknown method {self.method!r}")


class WhichPathTransformer(_StatelessMixin, TransformerMixin, BaseEstimator):
    """Map ``[delta_x, delta_p]`` rows to ``[visibility, distinguishability]``."""

    _feature_names = ("delta_x", "delta_p")
    _positive = False

    def __init__(self, sigma_x=1e-7):
        self.sigma_x = sigma_x

    def transform(self, X):
        X = self._check(X)
        vis = np.array([which_path_visibility(BranchPointerState(dp, dx, self.sigma_x))
                        for dx, dp in X])
        return np.column_stack([vis, [distinguishability(v) for v in vis]])

    def get_feature_names_out(self, input_features=None):
        return np.array(["visibility", "distinguishability"], dtype=object)
