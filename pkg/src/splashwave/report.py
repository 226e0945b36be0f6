"""Figure rendering for run outputs.

Reads the delimited artifacts a run leaves behind (time series, snapshot
files, fit overlays) and renders publication-style matplotlib figures as
PNG files next to them.  Pure post-processing: nothing here feeds back
into the solver.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from . import io

FIG_KW = dict(figsize=(6.4, 4.0), dpi=150)


def _finite(x, y):
    m = np.isfinite(x) & np.isfinite(y)
    return x[m], y[m]


def render_energy(series: dict, out_path: Path) -> Path:
    fig, (ax1, ax2) = plt.subplots(2, 1, sharex=True, **FIG_KW)
    t = series["t"]
    for key, label in (("E_S", "total"), ("E_k", "kinetic"), ("E_p", "potential")):
        ax1.plot(*_finite(t, series[key]), label=label, lw=1.2)
    ax1.set_ylabel("energy")
    ax1.legend(loc="best", fontsize=8)
    es = series["E_S"]
    ok = np.isfinite(es)
    if np.any(ok) and np.any(es[ok] != 0.0):
        ref = es[ok][0]
        drift = np.abs(es[ok] - ref) / max(abs(ref), 1e-300)
        ax2.semilogy(t[ok], np.maximum(drift, 1e-18), lw=1.0, color="crimson")
    ax2.set_ylabel("relative drift")
    ax2.set_xlabel("t")
    fig.tight_layout()
    fig.savefig(out_path)
    plt.close(fig)
    return out_path


def render_diagnostics(series: dict, out_path: Path) -> Path:
    fig, axes = plt.subplots(2, 2, **FIG_KW)
    t = series["t"]
    ax = axes[0, 0]
    ax.semilogy(*_finite(t, series["arc_chord_sup"]), lw=1.0)
    ax.set_title("sup F", fontsize=9)
    ax = axes[0, 1]
    ax.semilogy(*_finite(t, series["max_abs_omega"]), lw=1.0)
    ax.set_title("max |omega|", fontsize=9)
    ax = axes[1, 0]
    for l in range(5):
        ax.plot(*_finite(t, series[f"m_q{l}"]), lw=0.9, label=f"q{l}")
    ax.set_title("margins to marked points", fontsize=9)
    ax.legend(fontsize=7)
    ax = axes[1, 1]
    ax.plot(*_finite(t, series["min_sigma"]), lw=1.0, label="min sigma")
    ax.plot(*_finite(t, series["min_Q2_sigma"]), lw=1.0, label="min Q^2 sigma")
    ax.axhline(0.0, color="k", lw=0.5)
    ax.legend(fontsize=7)
    for row in axes:
        for a in row:
            a.set_xlabel("t", fontsize=8)
            a.tick_params(labelsize=7)
    fig.tight_layout()
    fig.savefig(out_path)
    plt.close(fig)
    return out_path


def render_snapshots(snapshot_paths: list[Path], out_path: Path) -> Path:
    fig, ax = plt.subplots(**FIG_KW)
    cmap = plt.get_cmap("viridis")
    n_files = max(len(snapshot_paths) - 1, 1)
    for i, p in enumerate(snapshot_paths):
        state = io.read_snapshot(p)
        z1, z2 = state.curve.z1, state.curve.z2
        if state.domain == "tilde":
            z1 = np.append(z1, z1[0])
            z2 = np.append(z2, z2[0])
        ax.plot(z1, z2, lw=0.9, color=cmap(i / n_files),
                label=f"t={state.time:.4g}" if len(snapshot_paths) <= 8 else None)
    ax.set_aspect("equal", adjustable="datalim")
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    if len(snapshot_paths) <= 8:
        ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(out_path)
    plt.close(fig)
    return out_path


def render_fit(times, values, fit, out_path: Path, label: str = "series") -> Path:
    fig, ax = plt.subplots(**FIG_KW)
    ax.plot(times, values, "o", ms=2.5, label=label)
    dense = np.linspace(np.min(times), np.max(times), 400)
    ax.plot(dense, fit(dense),
            lw=1.2, color="crimson",
            label=f"{fit.amplitude:.4g} t^{fit.exponent:.4g} + {fit.offset:.3g}")
    ax.set_xlabel("t")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(out_path)
    plt.close(fig)
    return out_path


def render_run(output_dir) -> list[Path]:
    """Render every standard figure for a finished run directory."""
    out = Path(output_dir)
    made = []
    series_path = out / "timeseries.csv"
    if series_path.exists():
        series = io.read_time_series(series_path)
        made.append(render_energy(series, out / "fig_energy.png"))
        made.append(render_diagnostics(series, out / "fig_diagnostics.png"))
    snaps = sorted(out.glob("snapshot_*.csv"))
    if snaps:
        step = max(len(snaps) // 8, 1)
        made.append(render_snapshots(snaps[::step], out / "fig_snapshots.png"))
    return made
