"""Acceptance suite: one test per criterion, each reporting a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py`` (the lines appear in the
terminal summary) or ``python3 tests/test_acceptance.py``.
"""
import math
import time

import diptest
import numpy as np
import pytest

import oracles
from gqr.casimir import (
    CasimirModel,
    casimir_force_sphere_plane,
    feasibility_scan,
    gravitational_acceleration,
)
from gqr.cli import main
from gqr.constants import AMU, HBAR
from gqr.gravity import GravityHypothesis, SourceSpec
from gqr.interference import (
    BranchPointerState,
    Optics,
    SlitState,
    distinguishability,
    far_field_pattern,
    predicted_pattern,
    which_path_visibility,
)
from gqr.scattering import (
    Numerics,
    TestParticleSpec,
    deflect_all_branches,
    deflection_analytic,
    integrate_trajectory,
)
from gqr.toymodel import RegularizationScheme, regularized_field_expectation

RESULTS: dict[int, tuple[bool, str]] = {}


def report(n: int, ok: bool, detail: str):
    RESULTS[n] = (bool(ok), detail)
    print(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, detail


NUMERICS = Numerics(rel_tol=1e-10)
B, V = 1e-6, 1e-3
KEPLER_K = np.logspace(-16, -1, 12)  # G M / (b v^2)


def kepler_runs():
    """The 12 acceptance trajectories, cached so criteria 1 and 2 share them."""
    if not hasattr(kepler_runs, "cache"):
        t0 = time.perf_counter()
        runs = []
        for k in KEPLER_K:
            M = k * B * V * V / oracles.G
            traj, theta = integrate_trajectory((np.zeros(2), M), TestParticleSpec(1.0, V, B), NUMERICS)
            runs.append((k, M, traj, abs(theta)))
        kepler_runs.cache = (runs, time.perf_counter() - t0)
    return kepler_runs.cache


def test_criterion_1_kepler_oracle():
    runs, elapsed = kepler_runs()
    worst = max(abs(th / (2 * math.atan(k)) - 1) for k, _, _, th in runs)
    analytic_ok = all(deflection_analytic(M, B, V) == pytest.approx(2 * math.atan(k), rel=1e-13)
                      for k, M, _, _ in runs)
    report(1, worst <= 1e-6 and elapsed < 10 and analytic_ok,
           f"max rel error {worst:.2e} over 12 points in [1e-16, 1e-1], {elapsed:.2f} s")


def test_criterion_2_conservation():
    runs, _ = kepler_runs()
    trajs = [t for _, _, t, _ in runs]
    source = SourceSpec(1e9 * AMU, 1e-7, (-50e-9, 50e-9), 10e-9)
    test = TestParticleSpec(1e6 * AMU, V, B)
    for tag in ("Collapsed", "MeanField", "Superposed"):
        res = deflect_all_branches(source, GravityHypothesis(tag, 3), test, NUMERICS, n_shots=4)
        trajs.extend(res.trajectories.values())
    e = max(t.energy_drift for t in trajs)
    ell = max(t.angular_momentum_drift for t in trajs if t.angular_momentum_drift is not None)
    report(2, e <= 1e-9 and ell <= 1e-9,
           f"{len(trajs)} trajectories, max energy drift {e:.2e}, max L drift {ell:.2e}")


def test_criterion_3_feasibility_arithmetic():
    a = gravitational_acceleration(1e9 * AMU, 1e-6)
    f = casimir_force_sphere_plane(1e-7, 1e-6, 1.0)
    ea = abs(a / oracles.A_GRAV_1E9_AMU_1UM - 1)
    ef = abs(f / oracles.F_CASIMIR_R100NM_D1UM - 1)
    ok = ea <= 1e-3 and ef <= 1e-3 and abs(a / 1.1083e-16 - 1) <= 1e-3 and abs(f / 2.723e-16 - 1) <= 1e-3
    report(3, ok, f"a_grav {a:.6e} (rel {ea:.1e}), F_casimir {f:.6e} N (rel {ef:.1e})")


def test_criterion_4_loglog_slopes():
    grid = feasibility_scan((1e6 * AMU, 1e12 * AMU), (1e-7, 1e-4), (9, 33), model=CasimirModel())
    ld = np.log10(grid.distance_axis)
    span = ld[2:] - ld[:-2]
    sg = (np.log10(grid.grav_accel[:, 2:]) - np.log10(grid.grav_accel[:, :-2])) / span
    sc = (np.log10(grid.casimir_accel[:, 2:]) - np.log10(grid.casimir_accel[:, :-2])) / span
    eg, ec = np.max(np.abs(sg + 2)), np.max(np.abs(sc + 3))
    report(4, eg <= 1e-6 and ec <= 1e-6, f"max |slope + 2| {eg:.1e}, max |slope + 3| {ec:.1e}")


def test_criterion_5_normalization():
    rng = np.random.default_rng(20240605)
    worst_int = worst_sp = 0.0
    for _ in range(100):
        sigma = 10 ** rng.uniform(-9, -7)
        d = sigma * rng.uniform(3, 20)
        lam = 10 ** rng.uniform(-13, -10)
        L = 10 ** rng.uniform(-1, 1)
        amps = (complex(*rng.normal(size=2)), complex(*rng.normal(size=2)))
        y0 = rng.uniform(-1e-6, 1e-6)
        state = SlitState.normalized(y0, y0 + d, sigma, amps)
        p = far_field_pattern(state, lam, L, n_samples=int(rng.integers(257, 8193)),
                              coherence=rng.uniform())
        worst_int = max(worst_int, abs(p.integral() - 1))
        worst_sp = max(worst_sp, abs(p.fringe_spacing / (lam * L / d) - 1))
    report(5, worst_int <= 1e-8 and worst_sp <= 1e-12,
           f"100 patterns, max |integral - 1| {worst_int:.1e}, max spacing rel error {worst_sp:.1e}")


def test_criterion_6_complementarity():
    rng = np.random.default_rng(77)
    worst, in_range = 0.0, True
    for _ in range(1000):
        sx = 10 ** rng.uniform(-9, -5)
        sp = HBAR / (2 * sx)
        p = BranchPointerState(rng.normal() * 3 * sp, rng.normal() * 3 * sx, sx)
        v = which_path_visibility(p)
        in_range &= 0.0 <= v <= 1.0
        worst = max(worst, abs(v * v + distinguishability(v) ** 2 - 1))
    v0 = which_path_visibility(BranchPointerState(0.0, 0.0, 1e-7))
    # spot check against a direct wave-packet overlap
    ref = oracles.pointer_overlap(0.7e-7, 1.1 * HBAR / 2e-7, 1e-7)
    spot = abs(which_path_visibility(BranchPointerState(1.1 * HBAR / 2e-7, 0.7e-7, 1e-7)) - ref)
    report(6, in_range and worst <= 1e-12 and v0 == 1.0 and spot < 1e-8,
           f"1000 pointers in [0,1], max |V^2 + D^2 - 1| {worst:.1e}, V(0,0) = {v0!r}")


def test_criterion_7_hypothesis_separation():
    source = SourceSpec(1e-12, 1e-7, (-5e-7, 5e-7), 1e-7)
    test = TestParticleSpec(3e-18, 1e-6, 2e-6, packet_width_sigma_x=1e-6)
    optics = Optics(wavelength=1e-9, screen_distance_L=1.0)
    collapsed = predicted_pattern(source, GravityHypothesis("Collapsed", 42), test, optics, n_shots=10_000)
    mean = predicted_pattern(source, GravityHypothesis("MeanField"), test, optics)
    sup = predicted_pattern(source, GravityHypothesis("Superposed"), test, optics)
    dip, pval = diptest.diptest(np.asarray(collapsed.deflection.shot_deflections))
    sup_err = abs(sup.visibility - which_path_visibility(sup.pointer) * sup.uncoupled_visibility)
    ok = (collapsed.visibility == 0.0 and pval < 1e-3
          and mean.visibility == mean.uncoupled_visibility
          and sup_err <= 1e-10 and 0 < sup.visibility < 1)
    report(7, ok, f"Collapsed V={collapsed.visibility}, dip={dip:.3f} p={pval:.1e}; "
                  f"MeanField V={mean.visibility:.12f}; Superposed V={sup.visibility:.6f} "
                  f"(wiring error {sup_err:.1e})")


def test_criterion_8_toymodel():
    M, d = 1e9 * AMU, 1e-7
    worst_grid = 0.0
    for ratio in (3.0, 10.0):
        src = SourceSpec(M, 1e-7, (-d / 2, d / 2), d / ratio)
        base = RegularizationScheme.default_for(src)
        fine = RegularizationScheme(base.sigma, base.grid_extent, 2 * base.grid_points - 1)
        fp = (5 * d, 0.3 * d)
        a = regularized_field_expectation(src, fp, base)
        b = regularized_field_expectation(src, fp, fine)
        for x, y in zip(a.terms, b.terms):
            worst_grid = max(worst_grid, abs(x / y - 1))
    far = []
    for ratio in (5.0, 10.0, 20.0):
        src = SourceSpec(M, 1e-7, (-d / 2, d / 2), d / ratio)
        fe = regularized_field_expectation(src, (100 * d, 0.0))
        far.append(abs(fe.total / oracles.far_field(M, 100 * d) - 1))
    cross = []
    for ratio in (1.0, 3.0, 10.0):
        src = SourceSpec(M, 1e-7, (-d / 2, d / 2), d / ratio)
        fp = (5 * d, 0.3 * d)
        fe = regularized_field_expectation(src, fp)
        ref = oracles.cross_term_quadrature(M, -d / 2, d / 2, d / ratio, fp)
        cross.append(abs(fe.term_cross / ref - 1))
    ok = worst_grid <= 1e-4 and max(far) <= 1e-3 and max(cross) <= 1e-8
    report(8, ok, f"grid doubling {worst_grid:.1e}; far field (d/sigma 5,10,20) {max(far):.1e}; "
                  f"cross vs quadrature {max(cross):.1e}")


CONFIG = """\
[run]
experiment = {exp}
seed = 12345
shots = 1000
formats = csv, json, gnuplot

[source]
mass_M = 1e9 amu

[test]
impact_parameter_b = 1 um
speed_v = 1e-3 m_per_s

[hypothesis]
tag = Collapsed

[feasibility]
n_mass = 40
n_distance = 40
"""


def test_criterion_9_reproducibility(tmp_path, monkeypatch):
    identical = True
    for exp in ("scatter", "feasibility"):
        outs = []
        for run in ("a", "b"):
            cfg = tmp_path / f"{exp}.ini"
            cfg.write_text(CONFIG.format(exp=exp))
            out = tmp_path / f"{exp}_{run}"
            assert main(["--config", str(cfg), "--out", str(out)]) == 0
            outs.append({p.name: p.read_bytes() for p in out.iterdir()})
        identical &= outs[0] == outs[1]
    grids = []
    for n in ("1", "3", "8"):
        monkeypatch.setenv("GQR_THREADS", n)
        g = feasibility_scan(grid_dims=(40, 40))
        grids.append(np.concatenate([g.grav_accel, g.casimir_accel, g.log10_ratio]).tobytes())
    threads_ok = grids[0] == grids[1] == grids[2]
    report(9, identical and threads_ok,
           f"reruns byte-identical: {identical}; GQR_THREADS 1/3/8 bitwise equal: {threads_ok}")


if __name__ == "__main__":
    import sys
    sys.exit(pytest.main([__file__, "-q", "-s"]))
