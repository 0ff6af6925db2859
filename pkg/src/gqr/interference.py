"""Matter-wave layer: slit state, barrier density, far-field fringes and
which-path visibility.

Slit modes are normalized Gaussians ``phi_i(y) = (2 pi s^2)^(-1/4)
exp(-(y - y_i)^2 / (4 s^2))`` so ``|phi_i|^2`` has standard deviation
``s``.  The test particle acts as a which-path pointer: a
minimum-uncertainty Gaussian that receives a branch-dependent kick.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .constants import H, HBAR
from .exceptions import ConfigurationError
from .gravity import GravityHypothesis, Hypothesis, SourceSpec
from .scattering import (
    DeflectionResult,
    Numerics,
    TestParticleSpec,
    branch_offsets,
    deflect_all_branches,
    momentum_kick_impulse,
)


def mode_overlap(y1, y2, sigma):
    """``<phi_1|phi_2>`` for two real Gaussian slit modes."""
    d = y2 - y1
    return math.exp(-d * d / (8.0 * sigma * sigma))


@dataclass(frozen=True)
class SlitState:
    y1: float
    y2: float
    sigma: float
    amplitudes: tuple[complex, complex] = (1 / math.sqrt(2), 1 / math.sqrt(2))

    def __post_init__(self):
        if not self.sigma > 0:
            raise ConfigurationError("slit width sigma must be > 0")
        if self.y1 == self.y2:
            raise ConfigurationError("slit positions must differ")
        a1, a2 = (complex(a) for a in self.amplitudes)
        object.__setattr__(self, "amplitudes", (a1, a2))

    @classmethod
    def normalized(cls, y1, y2, sigma, amplitudes=(1.0, 1.0)) -> "SlitState":
        """Rescale ``amplitudes`` so the two-mode state has unit norm."""
        a1, a2 = (complex(a) for a in amplitudes)
        s = cls(y1, y2, sigma, (a1, a2))
        n = s.norm()
        if not n > 0:
            raise ConfigurationError("amplitudes give a zero state")
        k = 1.0 / math.sqrt(n)
        return cls(y1, y2, sigma, (a1 * k, a2 * k))

    @classmethod
    def from_source(cls, source: SourceSpec) -> "SlitState":
        y1, y2 = source.slit_positions
        return cls.normalized(y1, y2, source.slit_width_sigma)

    @property
    def separation(self) -> float:
        return abs(self.y2 - self.y1)

    @property
    def overlap(self) -> float:
        return mode_overlap(self.y1, self.y2, self.sigma)

    def norm(self) -> float:
        a1, a2 = self.amplitudes
        return abs(a1) ** 2 + abs(a2) ** 2 + 2.0 * (a1.conjugate() * a2).real * self.overlap

    def mode(self, i: int, y):
        yi = self.y1 if i == 0 else self.y2
        y = np.asarray(y, dtype=float)
        return (2.0 * math.pi * self.sigma**2) ** -0.25 * np.exp(-((y - yi) ** 2) / (4.0 * self.sigma**2))


def barrier_terms(state: SlitState, y):
    """The two direct terms and the cross term of the barrier density."""
    a1, a2 = state.amplitudes
    p1, p2 = state.mode(0, y), state.mode(1, y)
    direct1 = abs(a1) ** 2 * p1 * p1
    direct2 = abs(a2) ** 2 * p2 * p2
    cross = 2.0 * (a1.conjugate() * a2).real * p1 * p2
    return direct1, direct2, cross


def barrier_probability(state: SlitState, y):
    """``|a1 phi_1(y) + a2 phi_2(y)|^2``."""
    a1, a2 = state.amplitudes
    psi = a1 * state.mode(0, y) + a2 * state.mode(1, y)
    return np.abs(psi) ** 2


def de_broglie_wavelength(mass, speed):
    return H / (np.asarray(mass) * np.asarray(speed))


@dataclass
class FringePattern:
    y_samples: np.ndarray
    intensity: np.ndarray
    visibility: float
    fringe_spacing: float
    envelope: np.ndarray
    fraunhofer_ok: bool = True
    coherence: float = 1.0
    uncoupled_visibility: float = float("nan")
    hypothesis: str | None = None
    pointer: "BranchPointerState | None" = None
    deflection: DeflectionResult | None = None
    meta: dict = field(default_factory=dict)

    def integral(self) -> float:
        return float(np.trapezoid(self.intensity, self.y_samples))

    def extracted_visibility(self, n_fringes: float = 3.0) -> float:
        """Fringe contrast read off the samples over the central fringes,
        with the diffraction envelope divided out."""
        half = 0.5 * n_fringes * self.fringe_spacing
        sel = (np.abs(self.y_samples) <= half) & (self.envelope > 0)
        if sel.sum() < 3:
            raise ConfigurationError("window does not resolve the central fringes")
        ratio = self.intensity[sel] / self.envelope[sel]
        hi, lo = ratio.max(), ratio.min()
        return float((hi - lo) / (hi + lo))


def fresnel_number(separation, wavelength, L):
    return separation**2 / (wavelength * L)


def far_field_pattern(state: SlitState, wavelength: float, screen_distance_L: float,
                      window: float | None = None, n_samples: int = 4097,
                      coherence: float = 1.0) -> FringePattern:
    """Fraunhofer two-slit pattern on a screen at distance ``L``.

    ``coherence`` multiplies the interference term (which-path factor).
    ``window`` is the half-width of the sampled screen region; by default it
    covers five envelope widths or four fringes, whichever is wider.  The
    sampled intensity is normalized to unit trapezoidal integral.
    """
    if not (wavelength > 0 and screen_distance_L > 0):
        raise ConfigurationError("wavelength and screen distance must be > 0")
    if int(n_samples) < 16:
        raise ConfigurationError("n_samples must be >= 16")
    if not 0.0 <= coherence <= 1.0:
        raise ConfigurationError("coherence factor must lie in [0, 1]")
    d = state.y2 - state.y1
    lam_L = wavelength * screen_distance_L
    spacing = lam_L / abs(d)
    env_width = lam_L / (4.0 * math.pi * state.sigma)
    if window is None:
        window = max(5.0 * env_width, 4.0 * spacing)
    if not window > 0:
        raise ConfigurationError("window must be > 0")

    y = np.linspace(-window, window, int(n_samples))
    q = 2.0 * math.pi * y / lam_L
    a1, a2 = state.amplitudes
    envelope = np.exp(-2.0 * state.sigma**2 * q * q)
    balance = abs(a1) ** 2 + abs(a2) ** 2
    v0 = 2.0 * abs(a1 * a2) / balance
    phase = np.angle(a1) - np.angle(a2)
    visibility = coherence * v0
    intensity = envelope * (1.0 + visibility * np.cos(q * d + phase))
    norm = np.trapezoid(intensity, y)
    intensity = intensity / norm
    envelope = envelope / norm
    return FringePattern(
        y_samples=y,
        intensity=intensity,
        visibility=float(visibility),
        fringe_spacing=spacing,
        envelope=envelope,
        fraunhofer_ok=fresnel_number(abs(d), wavelength, screen_distance_L) < 1.0,
        coherence=float(coherence),
        uncoupled_visibility=float(v0),
    )


@dataclass(frozen=True)
class BranchPointerState:
    delta_p: float
    delta_x: float
    sigma_x: float

    def __post_init__(self):
        if not self.sigma_x > 0:
            raise ConfigurationError("pointer width sigma_x must be > 0")

    @property
    def sigma_p(self) -> float:
        return HBAR / (2.0 * self.sigma_x)


def which_path_visibility(pointer: BranchPointerState) -> float:
    """Overlap ``|<chi_1|chi_2>|`` of two displaced, kicked Gaussian pointers."""
    ex = pointer.delta_x / pointer.sigma_x
    ep = pointer.delta_p / pointer.sigma_p
    return math.exp(-(ex * ex + ep * ep) / 8.0)


def distinguishability(visibility: float) -> float:
    return math.sqrt(max(0.0, 1.0 - visibility * visibility))


@dataclass(frozen=True)
class Optics:
    screen_distance_L: float = 1.0
    wavelength: float | None = None
    source_speed: float | None = None
    window: float | None = None
    n_samples: int = 4097

    def resolve_wavelength(self, mass: float) -> float:
        if self.wavelength is not None:
            return self.wavelength
        if self.source_speed is None:
            raise ConfigurationError("optics needs a wavelength or the source speed")
        return float(de_broglie_wavelength(mass, self.source_speed))


def _interaction_displacement(traj, line_y):
    """Transverse offset of the outgoing asymptote, extrapolated back to the
    moment the particle crosses the barrier plane ``x = 0``."""
    x, y = traj.position[:, 0], traj.position[:, 1]
    t_ca = float(np.interp(0.0, x, traj.t))
    vy_end = traj.velocity[-1, 1]
    vx_end = traj.velocity[-1, 0]
    # straight-line reference moves at the final speed along x
    return (y[-1] - vy_end * (traj.t[-1] - t_ca)) - line_y, vx_end


def branch_pointer(source: SourceSpec, test: TestParticleSpec,
                   numerics: Numerics | None = None,
                   deflection: DeflectionResult | None = None) -> BranchPointerState:
    """Pointer state difference carried by the test particle for the two branches."""
    sigma_x = test.packet_width_sigma_x or 0.1 * test.impact_parameter_b
    offsets = branch_offsets(source, test)
    kicks = [
        -math.copysign(float(momentum_kick_impulse(source.mass_M, abs(s), test.speed_v, test.mass_mt)), s)
        for s in offsets
    ]
    if deflection is None:
        deflection = deflect_all_branches(source, GravityHypothesis(Hypothesis.SUPERPOSED),
                                          test, numerics)
    line = test.line_y(source)
    shifts = [_interaction_displacement(deflection.trajectories[f"y{i + 1}"], line)[0]
              for i in range(2)]
    return BranchPointerState(kicks[0] - kicks[1], shifts[0] - shifts[1], sigma_x)


def predicted_pattern(source: SourceSpec, hyp: GravityHypothesis, test: TestParticleSpec,
                      optics: Optics, numerics: Numerics | None = None,
                      n_shots: int = 1) -> FringePattern:
    """Source-mass fringe pattern under ``hyp``.

    MeanField leaves the fringes untouched, Collapsed destroys them (an
    incoherent mixture; the shot-by-shot deflections are attached), and
    Superposed multiplies the contrast by the pointer overlap.
    """
    state = SlitState.from_source(source)
    wavelength = optics.resolve_wavelength(source.mass_M)
    pointer = None
    deflection = None
    if hyp.tag is Hypothesis.MEAN_FIELD:
        coherence = 1.0
    elif hyp.tag is Hypothesis.COLLAPSED:
        coherence = 0.0
        deflection = deflect_all_branches(source, hyp, test, numerics, n_shots=n_shots)
    else:
        deflection = deflect_all_branches(source, hyp, test, numerics)
        pointer = branch_pointer(source, test, numerics, deflection)
        coherence = which_path_visibility(pointer)
    pattern = far_field_pattern(state, wavelength, optics.screen_distance_L, optics.window,
                                optics.n_samples, coherence)
    pattern.hypothesis = hyp.tag.value
    pattern.pointer = pointer
    pattern.deflection = deflection
    pattern.meta = {"wavelength": wavelength, "screen_distance_L": optics.screen_distance_L}
    return pattern


def deflection_histogram(deflections, bins: int = 64):
    """Counts and bin centres of per-shot signed deflections."""
    deflections = np.asarray(deflections, dtype=float)
    lo, hi = float(deflections.min()), float(deflections.max())
    if lo == hi:
        pad = abs(lo) * 1e-3 or 1e-30
        lo, hi = lo - pad, hi + pad
    span = hi - lo
    counts, edges = np.histogram(deflections, bins=bins, range=(lo - 0.05 * span, hi + 0.05 * span))
    return 0.5 * (edges[:-1] + edges[1:]), counts
