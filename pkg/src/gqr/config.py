"""INI-style run configuration with unit-tagged quantities.

Example::

    [run]
    experiment = scatter
    seed = 7

    [source]
    mass_M = 1e9 amu

    [test]
    impact_parameter_b = 1 um
    speed_v = 1e-3 m_per_s

Physical quantities must carry a unit tag; dimensionless values must not.
"""
from __future__ import annotations

import configparser
import math
import re
from dataclasses import dataclass, field
from typing import Any

from .casimir import DEFAULT_DENSITY, CasimirModel, sphere_radius_from_mass
from .constants import AMU, to_si, unit_dimension
from .exceptions import ConfigurationError
from .gravity import GravityHypothesis, Hypothesis, SourceSpec
from .interference import Optics, fresnel_number
from .scattering import Numerics, TestParticleSpec
from .toymodel import RegularizationScheme

EXPERIMENTS = ("scatter", "fringes", "feasibility", "toymodel", "regime")
FORMATS = ("csv", "json", "gnuplot")

_REQ = object()  # required for the experiments listed in `needs`


@dataclass(frozen=True)
class Key:
    kind: str  # dimension name, or float/int/str/bool/list
    default: Any = None
    needs: tuple[str, ...] = ()
    positive: bool = False


SCHEMA: dict[str, dict[str, Key]] = {
    "run": {
        "experiment": Key("str"),
        "seed": Key("int", 0),
        "shots": Key("int", 1),
        "formats": Key("list", ("csv", "json")),
        "trajectories": Key("bool", False),
        "histogram_bins": Key("int", 64),
    },
    "source": {
        "mass_M": Key("mass", _REQ, ("scatter", "fringes", "toymodel"), True),
        "radius_R": Key("length", None, positive=True),
        "density": Key("density", DEFAULT_DENSITY, positive=True),
        "y1": Key("length", -50e-9),
        "y2": Key("length", 50e-9),
        "slit_width_sigma": Key("length", 10e-9, positive=True),
        "speed": Key("speed", None, positive=True),
    },
    "test": {
        "mass_mt": Key("mass", 1e6 * AMU, positive=True),
        "speed_v": Key("speed", _REQ, ("scatter", "fringes"), True),
        "impact_parameter_b": Key("length", _REQ, ("scatter", "fringes"), True),
        "launch_y": Key("length", None),
        "packet_width_sigma_x": Key("length", None, positive=True),
    },
    "hypothesis": {
        "tag": Key("str", "Superposed"),
    },
    "optics": {
        "wavelength": Key("length", None, positive=True),
        "screen_distance_L": Key("length", 1.0, positive=True),
        "window": Key("length", None, positive=True),
        "n_samples": Key("int", 4097),
    },
    "numerics": {
        "rel_tol": Key("float", 1e-10, positive=True),
        "abs_tol": Key("float", 1e-12, positive=True),
        "x_start_factor": Key("float", 100.0, positive=True),
    },
    "feasibility": {
        "mass_min": Key("mass", 1e6 * AMU, positive=True),
        "mass_max": Key("mass", 1e12 * AMU, positive=True),
        "distance_min": Key("length", 1e-7, positive=True),
        "distance_max": Key("length", 1e-4, positive=True),
        "n_mass": Key("int", 64),
        "n_distance": Key("int", 64),
        "eta": Key("float", 1.0, positive=True),
        "threshold_ratio": Key("float", 1.0, positive=True),
        "radius": Key("length", None, positive=True),
    },
    "toymodel": {
        "sigma": Key("length", None, positive=True),
        "grid_extent": Key("length", None, positive=True),
        "grid_points": Key("int", 257),
        "field_x": Key("length", _REQ, ("toymodel",)),
        "field_y": Key("length", 0.0),
    },
    "regime": {
        "curvature_R": Key("float", _REQ, ("regime",)),
        "hbar_scale": Key("float", _REQ, ("regime",)),
        "source_fluctuation": Key("float", _REQ, ("regime",)),
    },
}

_NUMBER = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*([A-Za-z_0-9]*)\s*$")


@dataclass
class RunConfig:
    experiment: str
    seed: int
    shots: int
    formats: tuple[str, ...]
    values: dict[str, dict[str, Any]]
    defaults_used: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)
    source: SourceSpec | None = None
    test: TestParticleSpec | None = None
    hypothesis: GravityHypothesis | None = None
    optics: Optics | None = None
    numerics: Numerics | None = None
    casimir: CasimirModel | None = None
    scheme: RegularizationScheme | None = None

    def get(self, dotted: str):
        section, key = dotted.split(".")
        return self.values[section][key]

    def resolved(self) -> dict:
        return {s: dict(v) for s, v in self.values.items()}


def _line_numbers(text: str) -> dict[tuple[str, str], int]:
    lines, section = {}, None
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line[0] in "#;":
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip()
            continue
        m = re.match(r"([^=:]+?)\s*[=:]", line)
        if m and section is not None:
            lines.setdefault((section, m.group(1).strip()), n)
    return lines


def _fail(section, key, line, message):
    where = f"{section}.{key}" if key else section
    if line:
        where += f" (line {line})"
    raise ConfigurationError(f"{where}: {message}")


def _convert(raw: str, spec: Key, section: str, key: str, line: int | None):
    kind = spec.kind
    try:
        if kind == "str":
            return raw.strip()
        if kind == "int":
            value = int(raw.strip())
            if value < 0:
                _fail(section, key, line, f"{key} must be >= 0")
            return value
        if kind == "bool":
            low = raw.strip().lower()
            if low not in ("true", "false", "yes", "no", "1", "0", "on", "off"):
                _fail(section, key, line, f"not a boolean: {raw!r}")
            return low in ("true", "yes", "1", "on")
        if kind == "list":
            return tuple(p.strip() for p in raw.split(",") if p.strip())
    except ValueError:
        _fail(section, key, line, f"cannot parse {raw!r} as {kind}")

    m = _NUMBER.match(raw)
    if not m:
        _fail(section, key, line, f"cannot parse {raw!r} as a number")
    number, unit = float(m.group(1)), m.group(2)
    if kind == "float":
        if unit:
            _fail(section, key, line, f"{key} is dimensionless, got unit tag {unit!r}")
        value = number
    else:
        if not unit:
            _fail(section, key, line, f"{key} needs a unit tag for a {kind}")
        try:
            dim = unit_dimension(unit)
        except ConfigurationError as exc:
            _fail(section, key, line, str(exc))
        if dim != kind:
            _fail(section, key, line, f"unit mismatch: {unit!r} is a {dim}, {key} is a {kind}")
        value = to_si(number, unit)
    if not math.isfinite(value):
        _fail(section, key, line, "value must be finite")
    if spec.positive and not value > 0:
        _fail(section, key, line, f"{key} must be > 0")
    return value


def parse_config(text: str, *, experiment: str | None = None, seed: int | None = None) -> RunConfig:
    """Parse and validate a configuration document.

    ``experiment`` and ``seed`` override the ``[run]`` section.
    """
    parser = configparser.ConfigParser(strict=True, interpolation=None,
                                       inline_comment_prefixes=("#", ";"))
    parser.optionxform = str  # keys are case-sensitive (mass_M)
    try:
        parser.read_string(text)
    except configparser.DuplicateOptionError as exc:
        raise ConfigurationError(
            f"{exc.section}.{exc.option} (line {exc.lineno}): duplicate key {exc.option!r}"
        ) from None
    except configparser.DuplicateSectionError as exc:
        raise ConfigurationError(f"line {exc.lineno}: duplicate section [{exc.section}]") from None
    except configparser.Error as exc:
        raise ConfigurationError(f"malformed configuration: {exc}") from None

    lines = _line_numbers(text)
    for section in parser.sections():
        if section not in SCHEMA:
            _fail(section, None, None, f"unknown section [{section}]")
        for key in parser[section]:
            if key not in SCHEMA[section]:
                _fail(section, key, lines.get((section, key)), f"unknown key {key!r}")

    raw_exp = experiment or (parser.get("run", "experiment", fallback=None))
    if raw_exp is None:
        _fail("run", "experiment", None, "missing required key 'experiment'")
    raw_exp = raw_exp.strip()
    if raw_exp not in EXPERIMENTS:
        _fail("run", "experiment", lines.get(("run", "experiment")),
              f"unknown experiment {raw_exp!r}; expected one of {list(EXPERIMENTS)}")

    values: dict[str, dict[str, Any]] = {}
    defaults_used = []
    for section, keys in SCHEMA.items():
        values[section] = {}
        for key, spec in keys.items():
            line = lines.get((section, key))
            if parser.has_option(section, key):
                value = _convert(parser.get(section, key), spec, section, key, line)
            elif spec.default is _REQ:
                if raw_exp in spec.needs:
                    _fail(section, key, None, f"missing required key {key!r}")
                value = None
            else:
                value = spec.default
                if raw_exp and (not spec.needs or raw_exp in spec.needs):
                    defaults_used.append(f"{section}.{key}")
            values[section][key] = value
    values["run"]["experiment"] = raw_exp
    if seed is not None:
        values["run"]["seed"] = int(seed)

    cfg = RunConfig(
        experiment=raw_exp,
        seed=values["run"]["seed"],
        shots=values["run"]["shots"],
        formats=values["run"]["formats"],
        values=values,
        defaults_used=defaults_used,
    )
    _build(cfg, lines)
    return cfg


def _build(cfg: RunConfig, lines):
    v = cfg.values
    for fmt in cfg.formats:
        if fmt not in FORMATS:
            _fail("run", "formats", lines.get(("run", "formats")), f"unknown output format {fmt!r}")
    if not 0 <= cfg.seed < 2**64:
        _fail("run", "seed", lines.get(("run", "seed")), "seed must fit in 64 bits")
    if cfg.shots < 1:
        _fail("run", "shots", lines.get(("run", "shots")), "shots must be >= 1")
    try:
        cfg.hypothesis = GravityHypothesis(Hypothesis.parse(v["hypothesis"]["tag"]), cfg.seed)
        cfg.numerics = Numerics(v["numerics"]["rel_tol"], v["numerics"]["abs_tol"],
                                v["numerics"]["x_start_factor"])
    except ConfigurationError as exc:
        _fail("hypothesis/numerics", None, None, str(exc))

    src = v["source"]
    if src["mass_M"] is not None:
        radius = src["radius_R"]
        if radius is None:
            radius = float(sphere_radius_from_mass(src["mass_M"], src["density"]))
            src["radius_R"] = radius
        try:
            cfg.source = SourceSpec(src["mass_M"], radius, (src["y1"], src["y2"]),
                                    src["slit_width_sigma"])
        except ConfigurationError as exc:
            _fail("source", None, None, str(exc))

    t = v["test"]
    if t["speed_v"] is not None and t["impact_parameter_b"] is not None:
        cfg.test = TestParticleSpec(t["mass_mt"], t["speed_v"], t["impact_parameter_b"],
                                    t["launch_y"], t["packet_width_sigma_x"])

    o = v["optics"]
    if o["n_samples"] < 16:
        _fail("optics", "n_samples", lines.get(("optics", "n_samples")), "n_samples must be >= 16")
    cfg.optics = Optics(o["screen_distance_L"], o["wavelength"], src["speed"], o["window"],
                        o["n_samples"])
    if cfg.experiment == "fringes":
        if cfg.optics.wavelength is None and cfg.optics.source_speed is None:
            _fail("optics", "wavelength", None,
                  "missing required key 'wavelength' (or source.speed to derive it)")
        lam = cfg.optics.resolve_wavelength(cfg.source.mass_M)
        nf = fresnel_number(cfg.source.separation, lam, cfg.optics.screen_distance_L)
        if nf >= 1.0:
            cfg.warnings.append(
                f"Fraunhofer condition violated: Fresnel number d^2/(lambda L) = {nf:.3g} >= 1")

    f = v["feasibility"]
    if f["eta"] > 1:
        _fail("feasibility", "eta", lines.get(("feasibility", "eta")), "eta must be in (0, 1]")
    cfg.casimir = CasimirModel(eta=f["eta"], density=src["density"], radius=f["radius"])
    for lo, hi, n in (("mass_min", "mass_max", "n_mass"), ("distance_min", "distance_max", "n_distance")):
        if f[n] < 2:
            _fail("feasibility", n, lines.get(("feasibility", n)), f"{n} must be >= 2")
        if not f[lo] < f[hi]:
            _fail("feasibility", lo, lines.get(("feasibility", lo)), f"{lo} must be < {hi}")

    tm = v["toymodel"]
    if cfg.source is not None:
        sigma = tm["sigma"] or cfg.source.slit_width_sigma
        extent = tm["grid_extent"] or 10.0 * max(sigma, cfg.source.separation)
        try:
            cfg.scheme = RegularizationScheme(sigma, extent, tm["grid_points"])
            if cfg.experiment == "toymodel":
                cfg.scheme.check(cfg.source.separation)
        except ConfigurationError as exc:
            _fail("toymodel", None, None, str(exc))
        tm["sigma"], tm["grid_extent"] = sigma, extent

    r = v["regime"]
    if cfg.experiment == "regime":
        for key in ("curvature_R", "hbar_scale", "source_fluctuation"):
            if r[key] < 0:
                _fail("regime", key, lines.get(("regime", key)), f"{key} must be >= 0")
