"""Figure panels rendered from kerrtrack run files.

Line-style convention throughout: elliptic fixed-point branches are drawn
solid, hyperbolic ones dashed, degenerate samples dotted.  The renderer
never recomputes any physics; populations, stabilities and event times
are taken verbatim from the run files, and each image is written together
with a small JSON metadata sidecar stating exactly what was drawn (used
by the golden tests).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from . import io

STABILITY_STYLE = {"elliptic": "-", "hyperbolic": "--", "degenerate": ":"}
BRANCH_COLOR = {"alpha0": "tab:green", "alphaPi": "tab:blue",
                "pole_P1": "black", "pole_P0": "black"}
TRACKED_COLOR = "tab:red"

SQRT8 = math.sqrt(8.0)


@dataclass
class FigureSpec:
    """What to render from a run directory."""

    run_dir: Path
    panels: list[str] = field(default_factory=lambda: ["tracking"])
    fmt: str = "png"
    times: list[float] | None = None  # portrait snapshot times, in s
    out_dir: Path | None = None

    def output_dir(self) -> Path:
        out = self.out_dir or Path(self.run_dir) / "plots"
        out.mkdir(parents=True, exist_ok=True)
        return out


def _save(fig, path: Path):
    # date-free metadata keeps re-renders byte-stable for svg as well
    meta = {"Date": None} if path.suffix == ".svg" else {}
    fig.savefig(path, dpi=150, metadata=meta)
    plt.close(fig)


def _write_meta(path: Path, payload: dict):
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _stability_segments(s, stability):
    """Contiguous runs of constant stability along a family trace."""
    segments = []
    start = 0
    for i in range(1, len(s) + 1):
        if i == len(s) or stability[i] != stability[start]:
            segments.append({"stability": stability[start],
                             "s_start": float(s[start]),
                             "s_end": float(s[i - 1])})
            start = i
    return segments


def render_tracking_panel(run_dir, out_path=None, fmt="png"):
    """Exact population, target, fixed-point branches and designed detuning.

    Returns (image path, metadata dict); the metadata lists every plotted
    family segment and the tracked-curve style transitions.
    """
    run_dir = Path(run_dir)
    traj = io.read_trajectory(run_dir)
    trace = io.read_fixed_point_trace(run_dir)
    crossings = io.read_crossings(run_dir)
    manifest = io.read_manifest(run_dir)
    tau = manifest["derived"]["tau"]

    out_dir = Path(out_path).parent if out_path else run_dir / "plots"
    out_dir.mkdir(parents=True, exist_ok=True)
    image = Path(out_path) if out_path else out_dir / f"tracking.{fmt}"

    fig, (ax, axd) = plt.subplots(
        2, 1, figsize=(7.0, 6.0), sharex=True,
        gridspec_kw={"height_ratios": [2.2, 1.0]})

    ax.plot(traj["s_over_tau"], traj["P"], color="black", lw=1.6,
            label="exact P")
    ax.plot(traj["s_over_tau"], traj["P_track"], color=TRACKED_COLOR, lw=3.0,
            alpha=0.35, label="target")

    families: dict[int, dict] = {}
    for rec in trace:
        families.setdefault(rec["family"], {"branch": rec["branch"],
                                            "tracked": rec["tracked"],
                                            "s": [], "P": [], "stability": []})
        fam = families[rec["family"]]
        fam["s"].append(rec["s"])
        fam["P"].append(rec["P"])
        fam["stability"].append(rec["stability"])

    meta_families = []
    for fid, fam in sorted(families.items()):
        color = TRACKED_COLOR if fam["tracked"] else BRANCH_COLOR[fam["branch"]]
        segments = _stability_segments(fam["s"], fam["stability"])
        s_arr = np.asarray(fam["s"])
        P_arr = np.asarray(fam["P"])
        for seg in segments:
            sel = (s_arr >= seg["s_start"]) & (s_arr <= seg["s_end"])
            ax.plot(s_arr[sel] / tau, P_arr[sel],
                    STABILITY_STYLE.get(seg["stability"], "-"),
                    color=color, lw=1.8 if fam["tracked"] else 1.2)
        transitions = [seg["s_start"] for seg in segments[1:]]
        meta_families.append({"family": fid, "branch": fam["branch"],
                              "tracked": fam["tracked"], "segments": segments,
                              "transitions": transitions})

    for rec in crossings:
        if rec["involves_tracked"]:
            ax.axvline(rec["s_over_tau"], color="gray", lw=0.8, ls=":")
    ax.set_ylabel("P")
    ax.set_ylim(-0.02, 1.02)
    ax.legend(loc="upper left", fontsize=8)

    axd.plot(traj["s_over_tau"], traj["delta_tilde_track"], color="tab:purple")
    axd.set_xlabel("s / tau")
    axd.set_ylabel("designed detuning")
    fig.tight_layout()
    _save(fig, image)

    tracked_meta = [f for f in meta_families if f["tracked"]]
    exchanges = []
    if tracked_meta:
        # style flips between elliptic and hyperbolic; degenerate samples at
        # the window edges (cone-point approach) are not exchanges
        resolvable = [seg for seg in tracked_meta[0]["segments"]
                      if seg["stability"] != "degenerate"]
        for a, b in zip(resolvable, resolvable[1:]):
            if a["stability"] != b["stability"]:
                exchanges.append(b["s_start"])
    metadata = {
        "panel": "tracking",
        "families": meta_families,
        "tracked_transitions": (tracked_meta[0]["transitions"]
                                if tracked_meta else []),
        "tracked_exchanges": exchanges,
        "tracked_has_dashed_segment": any(
            seg["stability"] == "hyperbolic"
            for f in tracked_meta for seg in f["segments"]),
        "crossing_times": [r["s"] for r in crossings
                           if r["involves_tracked"]],
    }
    _write_meta(image.with_suffix(image.suffix + ".meta.json"), metadata)
    return image, metadata


def drop_surface_mesh(n_p=80, n_phi=96):
    """Parametric mesh of the reduced surface Pi2^2 + Pi3^2 = 8 (1-P)^2 P."""
    P = np.linspace(0.0, 1.0, n_p)[:, None]
    phi = np.linspace(0.0, 2.0 * math.pi, n_phi)[None, :]
    r = SQRT8 * np.sqrt(P) * (1.0 - P)
    return r * np.cos(phi), r * np.sin(phi), P * np.ones_like(phi)


def _surface_coords(P, alpha):
    r = SQRT8 * np.sqrt(P) * (1.0 - P)
    return r * np.cos(alpha), r * np.sin(alpha), P


def render_portrait(run_dir, time, out_path=None, fmt="png"):
    """Drop-surface snapshot with fixed points and separatrices at one time."""
    run_dir = Path(run_dir)
    fps = io.read_portrait_fixed_points(run_dir)
    seps = io.read_portrait_separatrices(run_dir)
    available = sorted({rec["s"] for rec in fps})
    matches = [t for t in available if abs(t - time) <= 1e-9]
    if not matches:
        raise io.RunDataError(
            f"no portrait snapshot at s = {time}; available: {available}")
    t0 = matches[0]
    fps = [rec for rec in fps if rec["s"] == t0]
    seps = [rec for rec in seps if rec["s"] == t0]

    out_dir = Path(out_path).parent if out_path else run_dir / "plots"
    out_dir.mkdir(parents=True, exist_ok=True)
    image = (Path(out_path) if out_path
             else out_dir / f"portrait_s{t0:+.4f}.{fmt}")

    fig = plt.figure(figsize=(6.0, 6.0))
    ax = fig.add_subplot(projection="3d")
    X, Y, Z = drop_surface_mesh()
    ax.plot_surface(X, Y, Z, color="lightsteelblue", alpha=0.25,
                    linewidth=0, antialiased=True)

    markers = []
    for rec in fps:
        alpha = {"alpha0": 0.0, "alphaPi": math.pi}.get(rec["branch"], 0.0)
        x, y, z = _surface_coords(rec["P"], alpha)
        filled = rec["stability"] == "elliptic"
        ax.scatter([x], [y], [z], s=45,
                   marker="o" if filled else "s",
                   facecolors=(BRANCH_COLOR[rec["branch"]] if filled
                               else "white"),
                   edgecolors=BRANCH_COLOR[rec["branch"]], depthshade=False)
        markers.append({"branch": rec["branch"], "P": rec["P"],
                        "stability": rec["stability"],
                        "energy": rec["energy"]})

    owners = sorted({(rec["owner_branch"], rec["owner_P"]) for rec in seps})
    for owner_branch, owner_P in owners:
        pts = [(rec["P"], rec["alpha"]) for rec in seps
               if rec["owner_branch"] == owner_branch
               and rec["owner_P"] == owner_P]
        P_arr = np.array([p for p, _ in pts])
        a_arr = np.array([a for _, a in pts])
        x, y, z = _surface_coords(P_arr, a_arr)
        ax.plot(x, y, z, color="darkred", lw=1.2)

    ax.set_xlabel("Pi2")
    ax.set_ylabel("Pi3")
    ax.set_zlabel("P")
    ax.set_title(f"s = {t0:g}")
    _save(fig, image)

    metadata = {"panel": "portrait", "time_s": t0, "markers": markers,
                "n_separatrices": len(owners)}
    _write_meta(image.with_suffix(image.suffix + ".meta.json"), metadata)
    return image, metadata


def render_detuning_panel(run_dir, out_path=None, fmt="png"):
    """Designed detuning profile, from detuning.csv or the trajectory file."""
    run_dir = Path(run_dir)
    if (run_dir / "detuning.csv").exists():
        data = io.read_detuning(run_dir)
    else:
        data = io.read_trajectory(run_dir)
    out_dir = Path(out_path).parent if out_path else run_dir / "plots"
    out_dir.mkdir(parents=True, exist_ok=True)
    image = Path(out_path) if out_path else out_dir / f"detuning.{fmt}"

    fig, ax = plt.subplots(figsize=(6.0, 3.6))
    ax.plot(data["s_over_tau"], data["delta_tilde_track"],
            color="tab:purple", label="designed detuning")
    ax.plot(data["s_over_tau"], data["omega_tilde"], color="tab:orange",
            lw=1.0, label="pulse")
    ax.set_xlabel("s / tau")
    ax.legend(fontsize=8)
    fig.tight_layout()
    _save(fig, image)
    metadata = {"panel": "detuning",
                "n_samples": int(len(data["s_over_tau"]))}
    _write_meta(image.with_suffix(image.suffix + ".meta.json"), metadata)
    return image, metadata


def render_sweep_heatmap(run_dir, out_path=None, fmt="png"):
    """Infidelity heatmap over (tau, lambda_s_tilde) per branch/compensation."""
    run_dir = Path(run_dir)
    rows = [r for r in io.read_sweep(run_dir) if not r["error"]]
    if not rows:
        raise io.RunDataError("sweep contains no successful cells")
    combos = sorted({(r["branch"], r["compensate_kerr"]) for r in rows})
    out_dir = Path(out_path).parent if out_path else run_dir / "plots"
    out_dir.mkdir(parents=True, exist_ok=True)
    image = Path(out_path) if out_path else out_dir / f"sweep_heatmap.{fmt}"

    fig, axes = plt.subplots(1, len(combos),
                             figsize=(4.0 * len(combos), 3.4), squeeze=False)
    for ax, (branch, comp) in zip(axes[0], combos):
        sub = [r for r in rows if (r["branch"], r["compensate_kerr"])
               == (branch, comp)]
        taus = sorted({r["tau"] for r in sub})
        lams = sorted({r["lambda_s_tilde"] for r in sub})
        grid = np.full((len(lams), len(taus)), np.nan)
        for r in sub:
            grid[lams.index(r["lambda_s_tilde"]), taus.index(r["tau"])] = \
                r["infidelity"]
        pcm = ax.pcolormesh(taus, lams, grid, shading="nearest",
                            cmap="viridis")
        fig.colorbar(pcm, ax=ax, label="infidelity")
        ax.set_xlabel("tau")
        ax.set_ylabel("lambda_s / omega0")
        ax.set_title(f"{branch}, compensation "
                     f"{'on' if comp else 'off'}", fontsize=9)
    fig.tight_layout()
    _save(fig, image)
    metadata = {"panel": "sweep-heatmap", "n_cells": len(rows),
                "combos": [list(c) for c in combos]}
    _write_meta(image.with_suffix(image.suffix + ".meta.json"), metadata)
    return image, metadata


def render(spec: FigureSpec) -> list[Path]:
    """Render every requested panel; returns the image paths."""
    out_dir = spec.output_dir()
    written = []
    for panel in spec.panels:
        if panel == "tracking":
            path, _ = render_tracking_panel(
                spec.run_dir, out_dir / f"tracking.{spec.fmt}", spec.fmt)
            written.append(path)
        elif panel == "portrait":
            times = spec.times
            if times is None:
                fps = io.read_portrait_fixed_points(spec.run_dir)
                times = sorted({rec["s"] for rec in fps})
            for t in times:
                path, _ = render_portrait(
                    spec.run_dir, t,
                    out_dir / f"portrait_s{t:+.4f}.{spec.fmt}", spec.fmt)
                written.append(path)
        elif panel == "detuning":
            path, _ = render_detuning_panel(
                spec.run_dir, out_dir / f"detuning.{spec.fmt}", spec.fmt)
            written.append(path)
        elif panel == "sweep-heatmap":
            path, _ = render_sweep_heatmap(
                spec.run_dir, out_dir / f"sweep_heatmap.{spec.fmt}", spec.fmt)
            written.append(path)
        else:
            raise ValueError(f"unknown panel: {panel!r}")
    return written
