"""Figure rendering for pipeline runs.

One PNG per stage, written next to the CSVs under figures/. matplotlib
is imported lazily and pinned to the Agg backend, so runs work in
headless environments and importing the package never drags in a GUI
toolkit.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np


def _pyplot():
    import matplotlib
    matplotlib.use("Agg", force=True)
    import matplotlib.pyplot as plt
    return plt


def _density_slice(values: np.ndarray) -> np.ndarray:
    # x-z plane through the box midline; packets launched along z show
    # up as a blob moving across the image
    density = np.sum(np.abs(values) ** 2, axis=-1)
    return density[:, values.shape[1] // 2, :]


def _render_synthesize(plt, job):
    columns = job["columns"]
    fig, axes = plt.subplots(1, len(columns),
                             figsize=(4.2 * len(columns), 3.8),
                             squeeze=False)
    L = job["box_length"]
    for ax, (kind, values) in zip(axes[0], columns):
        img = ax.imshow(_density_slice(values).T, origin="lower",
                        extent=(0, L, 0, L), cmap="magma", aspect="equal")
        ax.set_title(f"|{kind}|^2, t = {job['t']:g}")
        ax.set_xlabel("x")
        ax.set_ylabel("z")
        fig.colorbar(img, ax=ax, shrink=0.85)
    return fig


def _render_transform(plt, job):
    modes = job["modes"]
    sel = modes.grid.retained
    kmag = modes.grid.kmag[sel]
    fig, ax = plt.subplots(figsize=(5.5, 3.8))
    ax.plot(kmag, np.abs(modes.amp[0][sel]), ".", ms=4, label="plus slot")
    ax.plot(kmag, np.abs(modes.amp[1][sel]), ".", ms=4, label="minus slot")
    ax.set_xlabel("|k|")
    ax.set_ylabel("|amplitude|")
    ax.set_title("spectrum after transform")
    ax.legend()
    return fig


def _render_evolve(plt, job):
    traj = job["trajectory"]
    dv = (traj.states[0].box_length / traj.states[0].grid_shape[0]) ** 3
    energy = [float(dv * np.sum(np.abs(s.values) ** 2))
              for s in traj.states]
    fig, ax = plt.subplots(figsize=(5.5, 3.8))
    ax.plot(traj.times, energy, "o-", ms=3)
    ax.set_xlabel("t")
    ax.set_ylabel("field energy")
    ax.set_title(f"{traj.scheme} evolution")
    return fig


def _render_observables(plt, job):
    report = job["report"]
    labels = [str(i + 1) for i in range(len(report.per_volume))]
    h = [r.H_local for r in report.per_volume]
    n = [r.N_local for r in report.per_volume]
    edot = [r.Edot for r in report.per_volume]
    ndot = [r.Ndot for r in report.per_volume]
    x = np.arange(len(labels))
    fig, (ax0, ax1) = plt.subplots(1, 2, figsize=(9, 3.8))
    ax0.bar(x - 0.2, h, width=0.4, label="energy")
    ax0.bar(x + 0.2, n, width=0.4, label="number")
    ax0.set_xticks(x, labels)
    ax0.set_xlabel("volume")
    ax0.set_title(f"content per volume, t = {report.time:g}")
    ax0.legend()
    ax1.bar(x - 0.2, edot, width=0.4, label="energy rate")
    ax1.bar(x + 0.2, ndot, width=0.4, label="number rate")
    ax1.set_xticks(x, labels)
    ax1.set_xlabel("volume")
    ax1.set_title("flow rates")
    ax1.legend()
    return fig


def _render_localization(plt, job):
    table = job["table"]
    fig, ax = plt.subplots(figsize=(5.0, 4.2))
    img = ax.imshow(table.overlaps, cmap="viridis", origin="lower")
    ax.set_xlabel("band mode j")
    ax.set_ylabel("band mode i")
    ax.set_title("normalized volume overlaps")
    fig.colorbar(img, ax=ax)
    return fig


def _render_timedomain(plt, job):
    series = job["series"]
    expected = job["expected"]
    keep = min(series.samples.size, 4000)
    t = series.times[:keep]
    fig, ax = plt.subplots(figsize=(6.5, 3.8))
    ax.plot(t, series.samples.real[:keep], lw=1.0, label="windowed result")
    ax.plot(t, expected.real[:keep], "--", lw=1.0,
            label="ideal multiplier")
    ax.set_xlabel("t")
    ax.set_ylabel("Re")
    ax.set_title("time-domain transform vs ideal")
    ax.legend()
    return fig


_RENDERERS = {
    "synthesize": _render_synthesize,
    "transform": _render_transform,
    "evolve": _render_evolve,
    "observables": _render_observables,
    "localization_study": _render_localization,
    "timedomain_demo": _render_timedomain,
}


def render_figures(fig_dir: Path, jobs) -> list[Path]:
    """Write one PNG per (name, job) pair; returns the paths written."""
    if not jobs:
        return []
    plt = _pyplot()
    fig_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for name, job in jobs:
        fig = _RENDERERS[job["kind"]](plt, job)
        fig.tight_layout()
        path = fig_dir / f"{name}.png"
        fig.savefig(path, dpi=110)
        plt.close(fig)
        written.append(path)
    return written
