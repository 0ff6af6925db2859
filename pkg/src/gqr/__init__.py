"""Gravitational scattering off a source mass in a spatial cat state.

Rival hypotheses for how a superposed mass gravitates, the test-particle
dynamics and which-path visibility they imply, and the Casimir-Polder
bound on where such an experiment is feasible.
"""
__version__ = "0.1.0"

from .casimir import (
    CasimirModel,
    ScanGrid,
    accel_pair,
    casimir_force_sphere_plane,
    feasibility_scan,
    feasible_region,
)
from .constants import CODATA_2018, PhysicalConstants, from_si, to_si
from .exceptions import (
    ConfigurationError,
    GQRError,
    IntegrationError,
    NumericalError,
    OutputError,
    SingularityError,
)
from .gravity import (
    BranchSet,
    GravityHypothesis,
    Hypothesis,
    SourceSpec,
    effective_field,
    hypothesis_branches,
    point_field,
)
from .interference import (
    BranchPointerState,
    FringePattern,
    Optics,
    SlitState,
    barrier_probability,
    de_broglie_wavelength,
    far_field_pattern,
    predicted_pattern,
    which_path_visibility,
)
from .scattering import (
    DeflectionResult,
    Numerics,
    TestParticleSpec,
    Trajectory,
    deflect_all_branches,
    deflection_analytic,
    deflection_numeric,
    integrate_trajectory,
    momentum_kick_impulse,
)
from .toymodel import (
    FieldExpectation,
    RegularizationScheme,
    born_integral,
    regime_classifier,
    regularized_field_expectation,
    welcher_weg_expectation,
)
