"""CSV/JSON artifact formats shared by the harness, tests, and plotting tools.

Every CSV starts with a single `#meta {...}` JSON line followed by a header
row.  Floats are written with repr-stable formatting so reruns with identical
seeds produce byte-identical files.  Experiment summaries carry a schema
version for downstream consumers.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .numerics import Field, Grid1D

SCHEMA_VERSION = 1


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def write_field_csv(path: Path | str, field: Field, meta: dict | None = None) -> None:
    meta = {**(meta or {}), **field.grid.meta()}
    with open(path, "w", newline="") as fh:
        fh.write("#meta " + json.dumps(meta, sort_keys=True) + "\n")
        w = csv.writer(fh)
        w.writerow(["x", "value"])
        for x, v in zip(field.grid.x, field.values):
            w.writerow([_fmt(x), _fmt(v)])


def read_csv_with_meta(path: Path | str) -> tuple[dict, list[str], np.ndarray]:
    with open(path) as fh:
        first = fh.readline()
        meta = json.loads(first[5:]) if first.startswith("#meta") else {}
        if not first.startswith("#meta"):
            fh.seek(0)
        reader = csv.reader(fh)
        header = next(reader)
        rows = [[float(c) for c in row] for row in reader if row]
    return meta, header, np.array(rows)


def read_field_csv(path: Path | str) -> Field:
    meta, header, rows = read_csv_with_meta(path)
    grid = Grid1D(meta["half_width"], meta["n_cells"])
    return Field(grid, rows[:, 1])


def write_profile_csv(path: Path | str, profile) -> None:
    with open(path, "w", newline="") as fh:
        fh.write("#meta " + json.dumps(profile.grid.meta(), sort_keys=True) + "\n")
        w = csv.writer(fh)
        w.writerow(["x", "m", "grad_m"])
        for x, m, gm in zip(profile.grid.x, profile.m.values, profile.grad_m.values):
            w.writerow([_fmt(x), _fmt(m), _fmt(gm)])


def write_trajectory_csv(path: Path | str, traj, meta: dict | None = None) -> None:
    """Long-format (t, x, u) rows for every recorded slice."""
    meta = {**(meta or {}), **traj.config.grid.meta(), "n_records": len(traj.times)}
    with open(path, "w", newline="") as fh:
        fh.write("#meta " + json.dumps(meta, sort_keys=True) + "\n")
        w = csv.writer(fh)
        w.writerow(["t", "x", "u"])
        for t, f in zip(traj.times, traj.fields):
            for x, v in zip(f.grid.x, f.values):
                w.writerow([_fmt(t), _fmt(x), _fmt(v)])


def write_path_record_csv(path: Path | str, record, meta: dict | None = None) -> None:
    with open(path, "w", newline="") as fh:
        fh.write("#meta " + json.dumps(meta or {}, sort_keys=True) + "\n")
        w = csv.writer(fh)
        w.writerow(["t_rescaled", "eta", "distance", "h1_remainder", "valid"])
        dist = record.distances if record.distances is not None else np.full_like(record.times, np.nan)
        h1 = record.h1_remainders if record.h1_remainders is not None else np.full_like(record.times, np.nan)
        for i, t in enumerate(record.times):
            w.writerow([
                _fmt(t),
                _fmt(record.positions[i]),
                _fmt(dist[i]),
                _fmt(h1[i]),
                int(record.valid[i]),
            ])


def write_paths_csv(path: Path | str, times: np.ndarray, positions: np.ndarray,
                    meta: dict | None = None) -> None:
    """Ensemble paths, one row per (t, xi, path_id)."""
    with open(path, "w", newline="") as fh:
        fh.write("#meta " + json.dumps(meta or {}, sort_keys=True) + "\n")
        w = csv.writer(fh)
        w.writerow(["t", "xi", "path_id"])
        for pid in range(positions.shape[0]):
            for t, v in zip(times, positions[pid]):
                w.writerow([_fmt(t), _fmt(v), pid])


def write_scaling_csv(path: Path | str, pairs, meta: dict | None = None) -> None:
    with open(path, "w", newline="") as fh:
        fh.write("#meta " + json.dumps(meta or {}, sort_keys=True) + "\n")
        w = csv.writer(fh)
        w.writerow(["eps", "t_star"])
        for eps, t_star in pairs:
            w.writerow([_fmt(eps), _fmt(t_star)])


def write_slices_csv(path: Path | str, rows: list[dict], meta: dict | None = None) -> None:
    cols = ["t_rescaled", "ks_stat", "p_value", "mean_a", "mean_b", "var_a", "var_b", "n_a", "n_b"]
    with open(path, "w", newline="") as fh:
        fh.write("#meta " + json.dumps(meta or {}, sort_keys=True) + "\n")
        w = csv.writer(fh)
        w.writerow(cols)
        for row in rows:
            w.writerow([_fmt(row[c]) if c not in ("n_a", "n_b") else int(row[c]) for c in cols])


def write_samples_csv(path: Path | str, rows, meta: dict | None = None) -> None:
    """Per-slice raw samples: (t_rescaled, source, value)."""
    with open(path, "w", newline="") as fh:
        fh.write("#meta " + json.dumps(meta or {}, sort_keys=True) + "\n")
        w = csv.writer(fh)
        w.writerow(["t_rescaled", "source", "value"])
        for t, source, value in rows:
            w.writerow([_fmt(t), source, _fmt(value)])


class _NumpyEncoder(json.JSONEncoder):
    def default(self, obj):
        if isinstance(obj, (np.integer,)):
            return int(obj)
        if isinstance(obj, (np.floating,)):
            return float(obj)
        if isinstance(obj, np.ndarray):
            return obj.tolist()
        if isinstance(obj, (np.bool_,)):
            return bool(obj)
        return super().default(obj)


def write_summary(path: Path | str, payload: dict) -> None:
    payload = {"schema_version": SCHEMA_VERSION, **payload}
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True, cls=_NumpyEncoder)
        fh.write("\n")


def read_summary(path: Path | str) -> dict:
    with open(path) as fh:
        return json.load(fh)
