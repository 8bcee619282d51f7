"""Readers for kerrtrack run directories.

The renderer is a pure view over the run files; every loader validates
the column schema so that drift between the producer and this package
fails loudly instead of producing misleading figures.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

TRAJECTORY_COLUMNS = ["s", "s_over_tau", "P", "Pi2", "Pi3", "alpha_or_nan",
                      "omega_tilde", "delta_tilde_track", "P_track",
                      "J_drift", "surface_drift"]
TRACE_COLUMNS = ["s", "s_over_tau", "branch", "family", "tracked", "P",
                 "stability", "energy"]
CROSSING_COLUMNS = ["s", "s_over_tau", "kind", "classification", "branch",
                    "involves_tracked", "P", "tracked_stability_before",
                    "tracked_stability_after"]
DETUNING_COLUMNS = ["s", "s_over_tau", "omega_tilde", "P_track",
                    "delta_tilde_track"]
PORTRAIT_FP_COLUMNS = ["s", "s_over_tau", "omega_tilde", "delta_tilde",
                       "branch", "P", "stability", "energy"]
PORTRAIT_SEP_COLUMNS = ["s", "s_over_tau", "owner_branch", "owner_P", "P",
                        "alpha"]
SWEEP_COLUMNS = ["omega0_over_lambda_s", "lambda_s_tilde", "tau", "branch",
                 "compensate_kerr", "final_P", "infidelity", "n_crossings",
                 "error"]


class RunDataError(ValueError):
    """A run file is missing, empty, or does not match the schema."""


def _read_csv(path: Path, columns, allow_empty=False):
    if not path.exists():
        raise RunDataError(f"missing run file: {path}")
    with open(path) as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise RunDataError(f"empty run file: {path}") from None
        if header != columns:
            raise RunDataError(
                f"{path} columns {header} do not match the expected schema "
                f"{columns}")
        rows = list(reader)
    if not rows and not allow_empty:
        raise RunDataError(f"no data rows in {path}")
    return rows


def _floats(rows, columns, which):
    idx = [columns.index(c) for c in which]
    return {c: np.array([float(r[i]) for r in rows])
            for c, i in zip(which, idx)}


def read_manifest(run_dir: Path) -> dict:
    path = Path(run_dir) / "manifest.json"
    if not path.exists():
        raise RunDataError(f"missing run file: {path}")
    return json.loads(path.read_text())


def read_trajectory(run_dir: Path) -> dict:
    rows = _read_csv(Path(run_dir) / "trajectory.csv", TRAJECTORY_COLUMNS)
    return _floats(rows, TRAJECTORY_COLUMNS,
                   ["s", "s_over_tau", "P", "Pi2", "Pi3", "alpha_or_nan",
                    "omega_tilde", "delta_tilde_track", "P_track"])


def read_fixed_point_trace(run_dir: Path) -> list[dict]:
    rows = _read_csv(Path(run_dir) / "fixed_point_trace.csv", TRACE_COLUMNS,
                     allow_empty=True)
    out = []
    for r in rows:
        rec = dict(zip(TRACE_COLUMNS, r))
        for key in ("s", "s_over_tau", "P", "energy"):
            rec[key] = float(rec[key])
        rec["family"] = int(rec["family"])
        rec["tracked"] = rec["tracked"] == "true"
        out.append(rec)
    return out


def read_crossings(run_dir: Path) -> list[dict]:
    rows = _read_csv(Path(run_dir) / "crossings.csv", CROSSING_COLUMNS,
                     allow_empty=True)
    out = []
    for r in rows:
        rec = dict(zip(CROSSING_COLUMNS, r))
        for key in ("s", "s_over_tau", "P"):
            rec[key] = float(rec[key])
        rec["involves_tracked"] = rec["involves_tracked"] == "true"
        out.append(rec)
    return out


def read_detuning(run_dir: Path) -> dict:
    rows = _read_csv(Path(run_dir) / "detuning.csv", DETUNING_COLUMNS)
    return _floats(rows, DETUNING_COLUMNS, DETUNING_COLUMNS)


def read_portrait_fixed_points(run_dir: Path) -> list[dict]:
    rows = _read_csv(Path(run_dir) / "portrait_fixed_points.csv",
                     PORTRAIT_FP_COLUMNS)
    out = []
    for r in rows:
        rec = dict(zip(PORTRAIT_FP_COLUMNS, r))
        for key in ("s", "s_over_tau", "omega_tilde", "delta_tilde", "P",
                    "energy"):
            rec[key] = float(rec[key])
        out.append(rec)
    return out


def read_portrait_separatrices(run_dir: Path) -> list[dict]:
    rows = _read_csv(Path(run_dir) / "portrait_separatrices.csv",
                     PORTRAIT_SEP_COLUMNS, allow_empty=True)
    out = []
    for r in rows:
        rec = dict(zip(PORTRAIT_SEP_COLUMNS, r))
        for key in ("s", "s_over_tau", "owner_P", "P", "alpha"):
            rec[key] = float(rec[key])
        out.append(rec)
    return out


def read_sweep(run_dir: Path) -> list[dict]:
    rows = _read_csv(Path(run_dir) / "sweep.csv", SWEEP_COLUMNS)
    out = []
    for r in rows:
        rec = dict(zip(SWEEP_COLUMNS, r))
        for key in ("omega0_over_lambda_s", "lambda_s_tilde", "tau",
                    "final_P", "infidelity"):
            rec[key] = float(rec[key])
        rec["compensate_kerr"] = rec["compensate_kerr"] == "true"
        out.append(rec)
    return out
