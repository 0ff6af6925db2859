import math

import numpy as np
import pytest

from gqr.constants import AMU, G
from gqr.exceptions import ConfigurationError, IntegrationError
from gqr.gravity import GravityHypothesis, Hypothesis, SourceSpec
from gqr.scattering import (
    Numerics,
    TestParticleSpec,
    deflect_all_branches,
    deflection_analytic,
    deflection_numeric,
    integrate_trajectory,
    momentum_kick_impulse,
    propagate_state,
)

M = 1e9 * AMU
B, V = 1e-6, 1e-3


def mass_for_strength(k, b=B, v=V):
    return k * b * v * v / G


def test_analytic_golden():
    # 2 atan(G M / (b v^2)), 30-digit recomputation
    assert deflection_analytic(M, B, V) == pytest.approx(2.216587178441676e-16, rel=1e-12)


def test_analytic_limits():
    assert deflection_analytic(0.0, B, V) == 0.0
    small = mass_for_strength(1e-9)
    assert deflection_analytic(small, 2 * B, V) / deflection_analytic(small, B, V) == pytest.approx(0.5, rel=1e-6)


def test_impulse_matches_small_angle_deflection():
    m_t = 1e6 * AMU
    dp = momentum_kick_impulse(M, B, V, m_t)
    assert dp == pytest.approx(m_t * V * deflection_analytic(M, B, V), rel=1e-10)
    assert momentum_kick_impulse(0.0, B, V, m_t) == 0.0
    assert momentum_kick_impulse(M, 2 * B, V, m_t) == dp / 2


def test_free_particle_is_straight():
    traj, theta = integrate_trajectory((np.zeros(2), 0.0), TestParticleSpec(1.0, V, B))
    assert theta == 0.0
    assert np.max(np.abs(traj.velocity[-1] - traj.velocity[0])) <= 1e-14 * V
    assert np.all(traj.position[:, 1] == B)


@pytest.mark.parametrize("k", [1e-16, 1e-12, 1e-8, 1e-4, 1e-2, 0.05])
def test_numeric_matches_kepler(k):
    mass = mass_for_strength(k)
    num = deflection_numeric(mass, B, V)
    ana = deflection_analytic(mass, B, V)
    assert abs(num - ana) / ana <= 1e-6


def test_trajectory_invariants():
    traj, _ = integrate_trajectory((np.zeros(2), mass_for_strength(0.05)), TestParticleSpec(1.0, V, B))
    assert np.all(np.diff(traj.t) > 0)
    assert traj.energy_drift <= 1e-9
    assert traj.angular_momentum_drift <= 1e-9
    assert traj.position[0, 0] <= -100 * B * 0.99
    assert traj.as_array().shape[1] == 5
    assert len(traj.samples) == len(traj.t)


def test_time_reversal():
    src = (np.zeros(2), mass_for_strength(0.02))
    traj, _ = integrate_trajectory(src, TestParticleSpec(1.0, V, B))
    pos, vel = propagate_state(src, traj.position[-1], traj.velocity[-1], -traj.t[-1])
    scale = np.max(np.abs(traj.position[0]))
    assert np.max(np.abs(pos - traj.position[0])) / scale <= 1e-10 * 100


def test_monotonicity():
    base = deflection_numeric(mass_for_strength(1e-3), B, V)
    assert deflection_numeric(mass_for_strength(2e-3), B, V) > base
    assert deflection_numeric(mass_for_strength(1e-3), 2 * B, V) < base
    assert deflection_numeric(mass_for_strength(1e-3), B, 2 * V) < base


def test_collision_is_an_integration_error():
    # head-on line straight into a point source
    with pytest.raises(IntegrationError):
        integrate_trajectory((np.zeros(2), mass_for_strength(1e-3)), TestParticleSpec(1.0, V, B),
                             line_y=0.0)


def test_numerics_validation():
    with pytest.raises(ConfigurationError):
        Numerics(rel_tol=0.1)
    with pytest.raises(ConfigurationError):
        Numerics(x_start_factor=10)


@pytest.fixture
def symmetric_source():
    return SourceSpec(M, 1e-7, (-50e-9, 50e-9), 10e-9)


def bisector_test():
    return TestParticleSpec(1e6 * AMU, V, 50e-9, launch_y=0.0)


def test_superposed_mirror_symmetry(symmetric_source):
    res = deflect_all_branches(symmetric_source, GravityHypothesis("Superposed"), bisector_test())
    assert res.theta == pytest.approx(res.theta_prime, rel=1e-10)
    assert res.signed[0] < 0 < res.signed[1]
    assert set(res.trajectories) == {"y1", "y2"}


def test_mean_field_bisector_no_kick(symmetric_source):
    res = deflect_all_branches(symmetric_source, GravityHypothesis("MeanField"), bisector_test())
    assert res.theta == 0.0
    traj = res.trajectories["mean"]
    assert np.all(traj.velocity[:, 1] == 0.0)


def test_collapsed_replay(symmetric_source):
    hyp = GravityHypothesis(Hypothesis.COLLAPSED, 777)
    a = deflect_all_branches(symmetric_source, hyp, bisector_test(), n_shots=200)
    b = deflect_all_branches(symmetric_source, hyp, bisector_test(), n_shots=200)
    assert np.array_equal(a.shot_deflections, b.shot_deflections)
    assert set(np.unique(a.shot_deflections)) == set(a.signed)


def test_off_axis_branches_differ(symmetric_source):
    test = TestParticleSpec(1e6 * AMU, V, 1e-6)
    res = deflect_all_branches(symmetric_source, GravityHypothesis("Superposed"), test)
    # branch y1 is farther from the line y = +1 um
    assert res.theta < res.theta_prime
    assert res.theta == pytest.approx(deflection_analytic(M, 1.05e-6, V), rel=1e-6)
    assert res.theta_prime == pytest.approx(deflection_analytic(M, 0.95e-6, V), rel=1e-6)


def test_line_through_branch_rejected(symmetric_source):
    with pytest.raises(ConfigurationError):
        deflect_all_branches(symmetric_source, GravityHypothesis("Superposed"),
                             TestParticleSpec(1.0, V, B, launch_y=50e-9))
