"""CSV and JSON writers shared by the command line and the demo scripts.

All writers are deterministic: floats are printed with ``repr`` precision
and JSON keys are sorted.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

__all__ = [
    "to_jsonable",
    "dump_json",
    "write_table",
    "write_shoot_csv",
    "write_profile_csv",
    "write_snapshots",
]


def to_jsonable(obj):
    """Convert numpy scalars/arrays, tuples and enums into plain JSON types.

    Non-finite floats become the strings ``"inf"``, ``"-inf"`` and ``"nan"``
    so the output stays strict JSON.
    """
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        if math.isfinite(x):
            return x
        return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if hasattr(obj, "value") and isinstance(obj.value, str):
        return obj.value
    return obj


def dump_json(record, path=None) -> str:
    text = json.dumps(to_jsonable(record), sort_keys=True, indent=2) + "\n"
    if path is not None:
        Path(path).write_text(text)
    return text


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if v is None:
        return ""
    return str(to_jsonable(v))


def write_table(dest, header, rows):
    """Write rows aligned with ``header`` as CSV to a path or an open text stream."""
    if hasattr(dest, "write"):
        _write_rows(dest, header, rows)
        return
    with open(dest, "w", newline="") as fh:
        _write_rows(fh, header, rows)


def _write_rows(fh, header, rows):
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])


def write_shoot_csv(outcome, path):
    """Columns v, y, phi of a backward shoot (v is the abscissa in [0, H])."""
    write_table(path, ["v", "y", "phi"], zip(outcome.u, outcome.y, outcome.phi))


def write_profile_csv(profile, path):
    write_table(path, ["z", "u", "du_dz"], zip(profile.z, profile.u, profile.du_dz))


def write_snapshots(run, out_dir, manifest: dict, stem="snapshot"):
    """One ``x,u`` CSV per snapshot plus ``manifest.json`` describing the run."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    x = run.grid.x
    files = []
    for k, (t, u) in enumerate(run.snapshots):
        name = f"{stem}_{k:04d}.csv"
        write_table(out / name, ["x", "u"], zip(x, u))
        files.append({"file": name, "t": t})
    manifest = dict(manifest)
    manifest.update({
        "grid": run.grid.to_record(),
        "steps": run.steps,
        "fitted_speed": run.track.fitted_speed,
        "fit_residual": run.track.fit_residual,
        "track": run.track.to_record(),
        "snapshots": files,
    })
    dump_json(manifest, out / "manifest.json")
    return manifest
