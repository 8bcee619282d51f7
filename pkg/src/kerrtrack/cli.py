"""Command line entry point and run serialization.

Subcommands:

* ``simulate``     integrate one scenario; writes trajectory.csv,
                   fixed_point_trace.csv, crossings.csv and manifest.json
* ``design``       emit the designed detuning alone (detuning.csv)
* ``fixed-points`` one frozen-parameter snapshot, printed and optionally saved
* ``portrait``     fixed points and separatrices at requested times
* ``sweep``        fidelity table over a parameter grid (sweep.csv)

Configuration is a single JSON document (``--config``); the flags mirror
its keys and override it.  Physical inputs carry explicit unit suffixes
in their key names; every run writes a manifest recording the fully
resolved configuration, from which the run can be reproduced exactly.

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .dynamics import (IntegrationError, IntegratorConfig, integrate_amplitudes,
                       integrate_reduced)
from .model import (AmplitudeState, DimensionlessParams, KerrParams,
                    ReducedState, RB87_KERR_COEFFS_CM3_PER_S)
from .phase_portrait import (ScanResolutionError, portrait_at, scan_crossings)
from .tracking import (BRANCHES, TrackingDomainError, TrackingScenario,
                       canonical_target, design_detuning, sech_pulse,
                       zero_pulse)

TRAJECTORY_COLUMNS = ["s", "s_over_tau", "P", "Pi2", "Pi3", "alpha_or_nan",
                      "omega_tilde", "delta_tilde_track", "P_track",
                      "J_drift", "surface_drift"]
TRACE_COLUMNS = ["s", "s_over_tau", "branch", "family", "tracked", "P",
                 "stability", "energy"]
CROSSING_COLUMNS = ["s", "s_over_tau", "kind", "classification", "branch",
                    "involves_tracked", "P", "tracked_stability_before",
                    "tracked_stability_after"]
SWEEP_COLUMNS = ["omega0_over_lambda_s", "lambda_s_tilde", "tau", "branch",
                 "compensate_kerr", "final_P", "infidelity", "n_crossings",
                 "error"]
DETUNING_COLUMNS = ["s", "s_over_tau", "omega_tilde", "P_track",
                    "delta_tilde_track"]
PORTRAIT_FP_COLUMNS = ["s", "s_over_tau", "omega_tilde", "delta_tilde",
                       "branch", "P", "stability", "energy"]
PORTRAIT_SEP_COLUMNS = ["s", "s_over_tau", "owner_branch", "owner_P", "P",
                        "alpha"]


class ConfigError(ValueError):
    """Invalid configuration; message carries field-level detail."""


def _fail(field_name: str, message: str):
    raise ConfigError(f"{field_name}: {message}")


@dataclass
class ScenarioConfig:
    """Fully resolved run configuration (dimensionless core plus bookkeeping)."""

    branch: str = "alphaPi"
    compensate_kerr: bool = True
    pulse: str = "sech"
    target: str = "canonical"
    tau: float = 5.0
    window_ct: float = 10.0
    lambda_s_tilde: float = 0.0
    lambda_a_tilde: float = 0.0
    representation: str = "amplitude"
    integrator: IntegratorConfig = field(default_factory=IntegratorConfig)
    n_output_samples: int = 2001
    n_scan_samples: int = 400
    # optional physical bookkeeping, recorded in manifests
    omega0_per_s: float | None = None
    kerr_per_s: tuple[float, float, float] | None = None
    rho_per_cm3: float | None = None

    def dimensionless(self) -> DimensionlessParams:
        return DimensionlessParams(lambda_s_tilde=self.lambda_s_tilde,
                                   tau=self.tau, window_ct=self.window_ct)

    def scenario(self) -> TrackingScenario:
        pulse = sech_pulse(self.tau) if self.pulse == "sech" else zero_pulse()
        return TrackingScenario(pulse=pulse, target=canonical_target(self.tau),
                                branch=self.branch, params=self.dimensionless(),
                                compensate_kerr=self.compensate_kerr)

    def to_dict(self) -> dict:
        d = {
            "branch": self.branch,
            "compensate_kerr": self.compensate_kerr,
            "pulse": self.pulse,
            "target": self.target,
            "tau": self.tau,
            "window_ct": self.window_ct,
            "kerr": {"lambda_s_tilde": self.lambda_s_tilde,
                     "lambda_a_tilde": self.lambda_a_tilde},
            "representation": self.representation,
            "integrator": {"method": self.integrator.method,
                           "rel_tol": self.integrator.rel_tol,
                           "abs_tol": self.integrator.abs_tol,
                           "max_step": (None if math.isinf(self.integrator.max_step)
                                        else self.integrator.max_step)},
            "n_output_samples": self.n_output_samples,
            "n_scan_samples": self.n_scan_samples,
        }
        if self.omega0_per_s is not None:
            d["omega0_per_s"] = self.omega0_per_s
        if self.kerr_per_s is not None:
            d["kerr_per_s"] = list(self.kerr_per_s)
        if self.rho_per_cm3 is not None:
            d["rho_per_cm3"] = self.rho_per_cm3
        return d


def _resolve_kerr(raw: dict, omega0, out: ScenarioConfig):
    """Fill the dimensionless Kerr combinations from one of the input forms."""
    forms = {
        "dimensionless": {"lambda_s_tilde"},
        "combined": {"lambda_s_per_s", "lambda_a_per_s"},
        "raw": {"lambda11_per_s", "lambda12_per_s", "lambda22_per_s"},
        "density": {"lambda11_cm3_per_s", "lambda12_cm3_per_s",
                    "lambda22_cm3_per_s"},
    }
    present = [name for name, keys in forms.items() if keys & set(raw)]
    if raw.get("preset") == "rb87":
        present.append("rb87")
    if len(present) != 1:
        _fail("kerr", "exactly one of the dimensionless, combined (lambda_s/"
                      "lambda_a), raw-triple, density-scaled or preset forms "
                      f"must be given (found {present or 'none'})")
    form = present[0]

    if form == "dimensionless":
        out.lambda_s_tilde = float(raw["lambda_s_tilde"])
        out.lambda_a_tilde = float(raw.get("lambda_a_tilde", 0.0))
        return

    if omega0 is None or not omega0 > 0:
        _fail("omega0_per_s", "a positive peak coupling is required with "
                              "dimensional Kerr inputs")
    if form == "combined":
        ls, la = float(raw["lambda_s_per_s"]), float(raw["lambda_a_per_s"])
        kerr = KerrParams.from_combinations(ls, la)
    elif form == "raw":
        kerr = KerrParams(float(raw["lambda11_per_s"]),
                          float(raw["lambda12_per_s"]),
                          float(raw["lambda22_per_s"]))
    elif form == "density":
        if "rho_per_cm3" not in raw:
            _fail("kerr.rho_per_cm3", "density-scaled coefficients need a "
                                      "density")
        rho = float(raw["rho_per_cm3"])
        kerr = KerrParams(float(raw["lambda11_cm3_per_s"]) * rho,
                          float(raw["lambda12_cm3_per_s"]) * rho,
                          float(raw["lambda22_cm3_per_s"]) * rho)
        out.rho_per_cm3 = rho
    else:  # rb87 preset
        rho = float(raw.get("rho_per_cm3", 4.2e14))
        c11, c12, c22 = RB87_KERR_COEFFS_CM3_PER_S
        kerr = KerrParams(c11 * rho, c12 * rho, c22 * rho)
        out.rho_per_cm3 = rho
    out.kerr_per_s = (kerr.lambda11, kerr.lambda12, kerr.lambda22)
    out.lambda_s_tilde = kerr.lambda_s / omega0
    out.lambda_a_tilde = kerr.lambda_a / omega0


def load_config(doc: dict) -> ScenarioConfig:
    """Validate and resolve a configuration document."""
    if "config" in doc:  # accept a manifest in place of a bare config
        doc = doc["config"]
    cfg = ScenarioConfig()
    known = {"branch", "compensate_kerr", "pulse", "target", "tau", "T_s",
             "omega0_per_s", "window_ct", "kerr", "representation",
             "integrator", "n_output_samples", "n_scan_samples",
             "kerr_per_s", "rho_per_cm3"}
    for key in doc:
        if key not in known:
            _fail(key, "unknown configuration key")

    cfg.branch = doc.get("branch", cfg.branch)
    if cfg.branch not in BRANCHES:
        _fail("branch", f"must be one of {BRANCHES}")
    cfg.compensate_kerr = bool(doc.get("compensate_kerr", True))
    cfg.pulse = doc.get("pulse", "sech")
    if cfg.pulse not in ("sech", "zero"):
        _fail("pulse", "must be 'sech' or 'zero'")
    cfg.target = doc.get("target", "canonical")
    if cfg.target != "canonical":
        _fail("target", "only the canonical profile is configurable")

    omega0 = doc.get("omega0_per_s")
    if omega0 is not None:
        cfg.omega0_per_s = float(omega0)
    if "tau" in doc and "T_s" in doc:
        _fail("tau", "give either tau or T_s, not both")
    if "T_s" in doc:
        if cfg.omega0_per_s is None:
            _fail("T_s", "omega0_per_s is required to derive tau from T_s")
        cfg.tau = cfg.omega0_per_s * float(doc["T_s"])
    else:
        cfg.tau = float(doc.get("tau", cfg.tau))
    if not cfg.tau > 0:
        _fail("tau", "must be positive")
    cfg.window_ct = float(doc.get("window_ct", cfg.window_ct))
    if not cfg.window_ct > 0:
        _fail("window_ct", "must be positive")

    kerr_doc = doc.get("kerr", {"lambda_s_tilde": 0.0})
    if isinstance(kerr_doc, str):
        kerr_doc = {"preset": kerr_doc}
    if not isinstance(kerr_doc, dict):
        _fail("kerr", "must be an object or a preset name")
    _resolve_kerr(kerr_doc, cfg.omega0_per_s, cfg)

    cfg.representation = doc.get("representation", "amplitude")
    if cfg.representation not in ("amplitude", "reduced"):
        _fail("representation", "must be 'amplitude' or 'reduced'")

    integ = doc.get("integrator", {})
    try:
        ms = integ.get("max_step")
        cfg.integrator = IntegratorConfig(
            rel_tol=float(integ.get("rel_tol", 1e-10)),
            abs_tol=float(integ.get("abs_tol", 1e-12)),
            max_step=math.inf if ms is None else float(ms),
            method=integ.get("method", "DOP853"))
    except ValueError as exc:
        _fail("integrator", str(exc))

    cfg.n_output_samples = int(doc.get("n_output_samples", 2001))
    if cfg.n_output_samples < 2:
        _fail("n_output_samples", "need at least 2 samples")
    cfg.n_scan_samples = int(doc.get("n_scan_samples", 400))
    if cfg.n_scan_samples < 2:
        _fail("n_scan_samples", "need at least 2 samples")
    return cfg


# ---------------------------------------------------------------------------
# serialization helpers

def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_csv(path: Path, columns: list[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def write_manifest(path: Path, command: str, cfg: ScenarioConfig,
                   extra: dict | None = None) -> None:
    lam = cfg.lambda_s_tilde
    manifest = {
        "tool": "kerrtrack",
        "version": __version__,
        "command": command,
        "config": cfg.to_dict(),
        "derived": {
            "lambda_s_tilde": lam,
            "lambda_a_tilde": cfg.lambda_a_tilde,
            "omega0_over_lambda_s": (math.inf if lam == 0 else 1.0 / lam),
            "tau": cfg.tau,
            "window_s": list(cfg.dimensionless().window),
        },
    }
    if extra:
        manifest.update(extra)
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True, allow_nan=True)
        fh.write("\n")


# ---------------------------------------------------------------------------
# run orchestration (library level, reused by tests)

def run_trajectory(cfg: ScenarioConfig):
    """Integrate the configured scenario, in its configured representation."""
    scenario = cfg.scenario()
    detuning = design_detuning(scenario)
    window = scenario.window
    if cfg.representation == "reduced":
        return integrate_reduced(ReducedState(0.0, 0.0, 0.0), scenario.pulse,
                                 detuning, cfg.lambda_s_tilde, window,
                                 cfg.integrator, cfg.n_output_samples)
    kerr = KerrParams.from_combinations(cfg.lambda_s_tilde, cfg.lambda_a_tilde)

    def delta_full(s, _d=detuning, _a=cfg.lambda_a_tilde):
        return _d(s) + _a

    return integrate_amplitudes(AmplitudeState(1.0 + 0.0j, 0.0j), scenario.pulse,
                                delta_full, kerr, window, cfg.integrator,
                                cfg.n_output_samples)


def run_simulate(cfg: ScenarioConfig, out_dir: Path) -> dict:
    out_dir.mkdir(parents=True, exist_ok=True)
    scenario = cfg.scenario()
    detuning = design_detuning(scenario)
    traj = run_trajectory(cfg)
    tau = cfg.tau

    rows = []
    for i, s in enumerate(traj.s):
        rows.append([s, s / tau, traj.P[i], traj.Pi2[i], traj.Pi3[i],
                     traj.alpha[i], scenario.pulse(s), detuning(s),
                     scenario.target(s),
                     math.nan if traj.j_drift is None else traj.j_drift[i],
                     traj.surface_drift[i]])
    write_csv(out_dir / "trajectory.csv", TRAJECTORY_COLUMNS, rows)

    scan = scan_crossings(scenario, cfg.n_scan_samples)
    trace_rows = []
    for fam in scan.families:
        for i, s in enumerate(scan.times):
            if math.isnan(fam.P[i]):
                continue
            trace_rows.append([s, s / tau, fam.branch, fam.family_id,
                               fam.tracked, fam.P[i], fam.stability[i],
                               fam.energy[i]])
    write_csv(out_dir / "fixed_point_trace.csv", TRACE_COLUMNS, trace_rows)

    crossing_rows = [[r.s, r.s / tau, r.kind, r.classification, r.branch,
                      r.involves_tracked, r.P, r.tracked_stability_before,
                      r.tracked_stability_after] for r in scan.reports]
    write_csv(out_dir / "crossings.csv", CROSSING_COLUMNS, crossing_rows)

    summary = {"final_P": traj.final_P,
               "infidelity": 1.0 - traj.final_P,
               "n_tracked_crossings": len(scan.tracked_crossings)}
    write_manifest(out_dir / "manifest.json", "simulate", cfg,
                   {"summary": summary})
    return summary


def run_design(cfg: ScenarioConfig, out_dir: Path) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    scenario = cfg.scenario()
    detuning = design_detuning(scenario)
    lo, hi = scenario.window
    rows = []
    for s in np.linspace(lo, hi, cfg.n_output_samples):
        rows.append([s, s / cfg.tau, scenario.pulse(s), scenario.target(s),
                     detuning(s)])
    write_csv(out_dir / "detuning.csv", DETUNING_COLUMNS, rows)
    write_manifest(out_dir / "manifest.json", "design", cfg)


def run_portrait(cfg: ScenarioConfig, times: list[float], out_dir: Path) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    scenario = cfg.scenario()
    detuning = design_detuning(scenario)
    fp_rows, sep_rows = [], []
    for s in times:
        snap = portrait_at(scenario.pulse(s), detuning(s), cfg.lambda_s_tilde)
        for fp in snap.fixed_points:
            fp_rows.append([s, s / cfg.tau, snap.omega_tilde, snap.delta_tilde,
                            fp.branch, fp.P, fp.stability, fp.energy])
        for sep in snap.separatrices:
            for P, alpha in zip(sep.P, sep.alpha):
                sep_rows.append([s, s / cfg.tau, sep.owner.branch, sep.owner.P,
                                 P, alpha])
    write_csv(out_dir / "portrait_fixed_points.csv", PORTRAIT_FP_COLUMNS, fp_rows)
    write_csv(out_dir / "portrait_separatrices.csv", PORTRAIT_SEP_COLUMNS,
              sep_rows)
    write_manifest(out_dir / "manifest.json", "portrait", cfg,
                   {"times_s": list(times)})


def run_fixed_points(omega_tilde: float, delta_tilde: float,
                     lambda_s_tilde: float, out_path: Path | None = None):
    from .phase_portrait import fixed_points_at
    fps = fixed_points_at(omega_tilde, delta_tilde, lambda_s_tilde)
    lines = [f"{'branch':10s} {'P':>12s} {'stability':>11s} {'energy':>14s}"]
    for fp in fps:
        lines.append(f"{fp.branch:10s} {fp.P:12.8f} {fp.stability:>11s} "
                     f"{fp.energy:14.8f}")
    if out_path is not None:
        write_csv(out_path, ["branch", "P", "stability", "energy"],
                  [[fp.branch, fp.P, fp.stability, fp.energy] for fp in fps])
    return fps, "\n".join(lines)


def _sweep_cell(payload: dict) -> dict:
    """One sweep cell; exceptions become the row's error column."""
    row = dict(payload["labels"])
    try:
        cfg = load_config(payload["config"])
        scenario = cfg.scenario()
        traj = run_trajectory(cfg)
        scan = scan_crossings(scenario, cfg.n_scan_samples)
        row.update(final_P=traj.final_P, infidelity=1.0 - traj.final_P,
                   n_crossings=len(scan.tracked_crossings), error="")
    except Exception as exc:  # per-cell failure must not kill the sweep
        row.update(final_P=math.nan, infidelity=math.nan, n_crossings=-1,
                   error=f"{type(exc).__name__}: {exc}")
    return row


def run_sweep(doc: dict, out_dir: Path, max_workers: int | None = None) -> list[dict]:
    out_dir.mkdir(parents=True, exist_ok=True)
    sweep = doc.get("sweep")
    if not isinstance(sweep, dict):
        _fail("sweep", "sweep configuration block is required")
    if ("lambda_s_tilde" in sweep) == ("omega0_over_lambda_s" in sweep):
        _fail("sweep", "exactly one of lambda_s_tilde or omega0_over_lambda_s "
                       "axes must be given")
    if "lambda_s_tilde" in sweep:
        lam_axis = [float(v) for v in sweep["lambda_s_tilde"]]
    else:
        ratios = [float(v) for v in sweep["omega0_over_lambda_s"]]
        lam_axis = [0.0 if math.isinf(r) else 1.0 / r for r in ratios]
    taus = [float(v) for v in sweep.get("tau", [5.0])]
    branches = list(sweep.get("branch", ["alphaPi"]))
    compensations = [bool(v) for v in sweep.get("compensate_kerr", [True])]

    base = {k: v for k, v in doc.items() if k != "sweep"}
    cells = []
    for lam in lam_axis:
        for tau in taus:
            for branch in branches:
                for comp in compensations:
                    config = dict(base)
                    config.update(tau=tau, branch=branch, compensate_kerr=comp,
                                  kerr={"lambda_s_tilde": lam})
                    cells.append({
                        "labels": {
                            "omega0_over_lambda_s": (math.inf if lam == 0
                                                     else 1.0 / lam),
                            "lambda_s_tilde": lam, "tau": tau, "branch": branch,
                            "compensate_kerr": comp},
                        "config": config})

    if max_workers is not None and max_workers > 1 and len(cells) > 1:
        with ProcessPoolExecutor(max_workers=max_workers) as pool:
            rows = list(pool.map(_sweep_cell, cells))
    else:
        rows = [_sweep_cell(cell) for cell in cells]

    write_csv(out_dir / "sweep.csv", SWEEP_COLUMNS,
              [[r[c] for c in SWEEP_COLUMNS] for r in rows])
    cfg = load_config(base) if base else ScenarioConfig()
    write_manifest(out_dir / "manifest.json", "sweep", cfg,
                   {"sweep": sweep, "n_cells": len(rows)})
    return rows


# ---------------------------------------------------------------------------
# argument parsing

def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--config", type=Path, help="JSON configuration document")
    p.add_argument("--out", type=Path, default=Path("runs/out"),
                   help="output directory")
    p.add_argument("--branch", choices=list(BRANCHES))
    p.add_argument("--tau", type=float)
    p.add_argument("--window-ct", type=float, dest="window_ct")
    p.add_argument("--lambda-s-tilde", type=float, dest="lambda_s_tilde")
    p.add_argument("--compensate", dest="compensate_kerr",
                   action="store_true", default=None)
    p.add_argument("--no-compensate", dest="compensate_kerr",
                   action="store_false", default=None)
    p.add_argument("--representation", choices=["amplitude", "reduced"])
    p.add_argument("--pulse", choices=["sech", "zero"])
    p.add_argument("--n-output-samples", type=int, dest="n_output_samples")
    p.add_argument("--n-scan-samples", type=int, dest="n_scan_samples")


def _doc_from_args(args) -> dict:
    doc = {}
    if args.config is not None:
        with open(args.config) as fh:
            doc = json.load(fh)
        if "config" in doc:
            doc = doc["config"]
    for key in ("branch", "tau", "window_ct", "compensate_kerr",
                "representation", "pulse", "n_output_samples",
                "n_scan_samples"):
        value = getattr(args, key, None)
        if value is not None:
            doc[key] = value
    if getattr(args, "lambda_s_tilde", None) is not None:
        doc["kerr"] = {"lambda_s_tilde": args.lambda_s_tilde}
    return doc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kerrtrack",
        description="adiabatic tracking of atom-molecule conversion with "
                    "Kerr nonlinearities")
    sub = parser.add_subparsers(dest="command", required=True)

    for name in ("simulate", "design", "portrait", "sweep"):
        p = sub.add_parser(name)
        _add_common(p)
        if name == "portrait":
            p.add_argument("--times", required=True,
                           help="comma separated snapshot times, in s")
        if name == "sweep":
            p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("fixed-points")
    p.add_argument("--omega-tilde", type=float, required=True)
    p.add_argument("--delta-tilde", type=float, required=True)
    p.add_argument("--lambda-s-tilde", type=float, required=True)
    p.add_argument("--out", type=Path, default=None)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "fixed-points":
            _, table = run_fixed_points(args.omega_tilde, args.delta_tilde,
                                        args.lambda_s_tilde, args.out)
            print(table)
            return 0
        doc = _doc_from_args(args)
        if args.command == "sweep":
            run_sweep(doc, args.out, max_workers=args.workers)
            return 0
        cfg = load_config(doc)
        if args.command == "simulate":
            summary = run_simulate(cfg, args.out)
            print(f"final P = {summary['final_P']:.8f}  "
                  f"infidelity = {summary['infidelity']:.3e}  "
                  f"tracked crossings = {summary['n_tracked_crossings']}")
        elif args.command == "design":
            run_design(cfg, args.out)
        elif args.command == "portrait":
            times = [float(v) for v in args.times.split(",")]
            run_portrait(cfg, times, args.out)
        return 0
    except (ConfigError, TrackingDomainError, json.JSONDecodeError,
            FileNotFoundError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except (IntegrationError, ScanResolutionError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


def entry():  # console script
    sys.exit(main())
