"""Batch command-line front end.

    gqr --config run.ini --out results/ [--seed N] [--experiment NAME]

Exit codes: 0 success, 2 configuration error, 3 numerical failure, 4 I/O error.
"""
from __future__ import annotations

import argparse
import logging
import platform
import sys
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from . import io as gio
from .casimir import feasibility_scan, feasible_region, worker_count
from .config import RunConfig, parse_config
from .exceptions import GQRError, OutputError
from .gravity import Hypothesis
from .interference import deflection_histogram, predicted_pattern
from .scattering import deflect_all_branches
from .toymodel import regime_classifier, regularized_field_expectation

log = logging.getLogger("gqr")


def _run_scatter(cfg: RunConfig, out: Path, manifest: dict) -> list[Path]:
    res = deflect_all_branches(cfg.source, cfg.hypothesis, cfg.test, cfg.numerics,
                               n_shots=cfg.shots)
    written = []
    rows = []
    for label, traj in res.trajectories.items():
        idx = {"y1": 0, "y2": 1}.get(label, 0)
        rows.append((label, abs(res.signed[idx]), res.signed[idx], traj.energy_drift,
                     traj.angular_momentum_drift))
    if "csv" in cfg.formats:
        written.append(gio.write_csv(out / "deflection.csv",
                                     ["branch", "theta", "signed_theta", "energy_drift",
                                      "angular_momentum_drift"], rows))
        if cfg.get("run.trajectories"):
            for label, traj in res.trajectories.items():
                written.append(gio.write_trajectory_csv(out / f"trajectory_{label}.csv", traj))
    if res.shot_deflections is not None:
        centers, counts = deflection_histogram(res.shot_deflections, cfg.get("run.histogram_bins"))
        if "csv" in cfg.formats:
            written.append(gio.write_csv(out / "shots.csv", ["shot", "branch", "signed_theta"],
                                         zip(range(cfg.shots), res.shot_branches,
                                             res.shot_deflections)))
            written.append(gio.write_csv(out / "deflection_histogram.csv",
                                         ["signed_theta", "count"], zip(centers, counts)))
        manifest["results"]["branch_frequency_y1"] = float(np.mean(res.shot_branches == 0))
    manifest["results"].update({
        "theta": res.theta,
        "theta_prime": res.theta_prime,
        "signed": list(res.signed),
        "method": res.method,
        "max_energy_drift": max(t.energy_drift for t in res.trajectories.values()),
    })
    if "json" in cfg.formats:
        written.append(gio.write_json(out / "deflection.json", dict(manifest["results"])))
    return written


def _run_fringes(cfg: RunConfig, out: Path, manifest: dict) -> list[Path]:
    pattern = predicted_pattern(cfg.source, cfg.hypothesis, cfg.test, cfg.optics,
                                cfg.numerics, n_shots=cfg.shots)
    manifest["results"].update(gio.pattern_header(pattern))
    return gio.write_pattern(out, pattern, formats=cfg.formats)


def _run_feasibility(cfg: RunConfig, out: Path, manifest: dict) -> list[Path]:
    f = cfg.values["feasibility"]
    grid = feasibility_scan((f["mass_min"], f["mass_max"]), (f["distance_min"], f["distance_max"]),
                            (f["n_mass"], f["n_distance"]), cfg.values["test"]["mass_mt"],
                            cfg.casimir)
    region = feasible_region(grid, f["threshold_ratio"])
    manifest["results"].update({
        "feasible_status": region.status,
        "feasible_cells": int(region.mask.sum()),
        "boundary_points": len(region.contour),
        "threads": worker_count(),
    })
    written = []
    if "csv" in cfg.formats:
        written.append(gio.write_scan_csv(out / "feasibility.csv", grid))
    if "json" in cfg.formats:
        written.append(gio.write_json(out / "feasibility.json", gio.scan_json(grid, region)))
    if "gnuplot" in cfg.formats:
        written.append(gio.write_scan_gnuplot(out / "feasibility_log10_ratio.dat", grid))
    return written


def _run_toymodel(cfg: RunConfig, out: Path, manifest: dict) -> list[Path]:
    tm = cfg.values["toymodel"]
    fe = regularized_field_expectation(cfg.source, (tm["field_x"], tm["field_y"]), cfg.scheme)
    data = gio.field_expectation_json(fe)
    manifest["results"].update(data)
    manifest["convergence"]["toymodel"] = fe.converged
    if not fe.converged:
        log.warning("regularized field expectation did not converge")
    return [gio.write_json(out / "toymodel.json", data)] if "json" in cfg.formats else []


def _run_regime(cfg: RunConfig, out: Path, manifest: dict) -> list[Path]:
    r = cfg.values["regime"]
    label = regime_classifier(r["curvature_R"], r["hbar_scale"], r["source_fluctuation"])
    manifest["results"]["label"] = label
    return [gio.write_json(out / "regime.json", {**r, "label": label})] if "json" in cfg.formats else []


RUNNERS = {
    "scatter": _run_scatter,
    "fringes": _run_fringes,
    "feasibility": _run_feasibility,
    "toymodel": _run_toymodel,
    "regime": _run_regime,
}


def run(cfg: RunConfig, out_dir) -> int:
    """Execute ``cfg`` and write artifacts plus ``manifest.json`` to ``out_dir``."""
    out = Path(out_dir)
    manifest = {
        "experiment": cfg.experiment,
        "seed": cfg.seed,
        "shots": cfg.shots,
        "hypothesis": cfg.hypothesis.tag.value if cfg.hypothesis else None,
        "parameters_si": cfg.resolved(),
        "defaults_used": list(cfg.defaults_used),
        "warnings": list(cfg.warnings),
        "versions": {"gqr": __version__, "numpy": np.__version__, "scipy": scipy.__version__,
                     "python": platform.python_version()},
        "convergence": {},
        "results": {},
    }
    written = RUNNERS[cfg.experiment](cfg, out, manifest)
    manifest["files"] = sorted(p.name for p in written)
    manifest["status"] = "ok"
    gio.write_json(out / "manifest.json", manifest)
    return 0


def _error_manifest(out: Path | None, exc: GQRError):
    if out is None or isinstance(exc, OutputError):
        return
    try:
        gio.write_json(out / "manifest.json", {"status": "error", "category": exc.category,
                                               "exit_code": exc.exit_code, "message": str(exc)})
    except OutputError:
        pass


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gqr", description=__doc__.splitlines()[0])
    p.add_argument("--config", required=True, type=Path, help="INI configuration file")
    p.add_argument("--out", default=Path("."), type=Path, help="output directory")
    p.add_argument("--seed", type=int, default=None, help="override [run] seed")
    p.add_argument("--experiment", default=None, help="override [run] experiment")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        try:
            text = args.config.read_text(encoding="utf-8")
        except OSError as exc:
            raise OutputError(f"cannot read config {args.config}: {exc}") from exc
        cfg = parse_config(text, experiment=args.experiment, seed=args.seed)
        for w in cfg.warnings:
            log.warning(w)
        return run(cfg, args.out)
    except GQRError as exc:
        print(f"gqr: {exc.category} error: {exc}", file=sys.stderr)
        _error_manifest(args.out, exc)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
