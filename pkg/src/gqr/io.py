"""Deterministic file output: CSV (9 significant digits), JSON (17), gnuplot matrices.

All files are written to a temporary sibling and renamed into place.
"""
from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from pathlib import Path

import numpy as np

from .exceptions import OutputError

CSV_DIGITS = 9
JSON_DIGITS = 17


def fmt_csv(x) -> str:
    if isinstance(x, (str, bool)) or x is None:
        return "" if x is None else str(x)
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.{CSV_DIGITS}g}"


def _json_float(x: float) -> str:
    if not math.isfinite(x):
        return "null"
    text = f"{x:.{JSON_DIGITS}g}"
    if "e" not in text and "." not in text and "n" not in text:
        text += ".0"
    return text


def dumps_json(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON text with every float written at 17 significant digits."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps_json(v, indent, _level + 1)}"
                 for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in obj):
            return "[" + ", ".join(dumps_json(v, indent, _level + 1) for v in obj) + "]"
        items = [pad + dumps_json(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _json_float(float(obj))
    if obj is None:
        return "null"
    return json.dumps(str(obj))


def atomic_write(path, text: str) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc}") from exc
    return path


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)  # RFC 4180: CRLF records, minimal quoting
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt_csv(x) for x in row])
    return buf.getvalue()


def write_csv(path, header, rows) -> Path:
    return atomic_write(path, csv_text(header, rows))


def write_json(path, obj) -> Path:
    return atomic_write(path, dumps_json(obj) + "\n")


def gnuplot_matrix_text(x_axis, y_axis, matrix) -> str:
    """``matrix nonuniform`` layout: first row ``N x1..xN``, then ``y_i z_i1..z_iN``."""
    matrix = np.asarray(matrix)
    lines = [" ".join([str(len(x_axis))] + [fmt_csv(x) for x in x_axis])]
    for yv, row in zip(y_axis, matrix):
        lines.append(" ".join([fmt_csv(yv)] + [fmt_csv(z) for z in row]))
    return "\n".join(lines) + "\n"


# -- domain exporters --------------------------------------------------------

def trajectory_rows(traj):
    return traj.as_array().tolist()


def write_trajectory_csv(path, traj) -> Path:
    return write_csv(path, ["t", "x", "y", "vx", "vy"], trajectory_rows(traj))


def scan_long_rows(grid):
    for i, m in enumerate(grid.mass_axis):
        for j, d in enumerate(grid.distance_axis):
            yield (m, d, grid.grav_accel[i, j], grid.casimir_accel[i, j], grid.log10_ratio[i, j])


def write_scan_csv(path, grid) -> Path:
    return write_csv(path, ["mass", "distance", "a_grav", "a_casimir", "log10_ratio"],
                     scan_long_rows(grid))


def scan_json(grid, region=None) -> dict:
    out = {
        "mass_axis": grid.mass_axis,
        "distance_axis": grid.distance_axis,
        "radius_axis": grid.radius_axis,
        "test_mass": grid.test_mass,
        "eta": grid.eta,
        "grav_accel": grid.grav_accel,
        "casimir_accel": grid.casimir_accel,
        "log10_ratio": grid.log10_ratio,
    }
    if region is not None:
        out["feasible_mask"] = region.mask.astype(int)
        out["feasible_status"] = region.status
        out["boundary"] = [list(p) for p in region.contour]
    return out


def write_scan_gnuplot(path, grid) -> Path:
    # rows follow mass, columns follow distance
    return atomic_write(path, gnuplot_matrix_text(grid.distance_axis, grid.mass_axis,
                                                  grid.log10_ratio))


def pattern_header(pattern) -> dict:
    header = {
        "hypothesis": pattern.hypothesis,
        "visibility": pattern.visibility,
        "uncoupled_visibility": pattern.uncoupled_visibility,
        "which_path_factor": pattern.coherence,
        "fringe_spacing": pattern.fringe_spacing,
        "fraunhofer_ok": pattern.fraunhofer_ok,
        "n_samples": len(pattern.y_samples),
        "integral": pattern.integral(),
    }
    header.update(pattern.meta)
    if pattern.pointer is not None:
        p = pattern.pointer
        header["pointer"] = {"delta_p": p.delta_p, "delta_x": p.delta_x,
                             "sigma_x": p.sigma_x, "sigma_p": p.sigma_p}
    return header


def write_pattern(out_dir, pattern, stem="fringes", formats=("csv", "json")) -> list[Path]:
    out_dir = Path(out_dir)
    written = []
    if "csv" in formats:
        written.append(write_csv(out_dir / f"{stem}.csv", ["y", "intensity"],
                                 zip(pattern.y_samples, pattern.intensity)))
    if "json" in formats:
        written.append(write_json(out_dir / f"{stem}.json", pattern_header(pattern)))
    return written


def field_expectation_json(fe) -> dict:
    s = fe.scheme
    return {
        "term_direct_1": fe.term_direct_1,
        "term_direct_2": fe.term_direct_2,
        "term_cross": fe.term_cross,
        "total": fe.total,
        "converged": fe.converged,
        "relative_error_estimate": fe.error_estimate,
        "field_point": list(fe.field_point),
        "scheme": None if s is None else {
            "sigma": s.sigma, "grid_extent": s.grid_extent, "grid_points": s.grid_points,
            "normalization_A": s.normalization_A(),
        },
    }
