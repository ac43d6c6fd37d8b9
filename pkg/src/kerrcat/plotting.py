"""Matplotlib renderers for the CLI's report outputs.

Figures are written next to the delimited payload files; they are viewing
aids, never parsed back, so layout tweaks here cannot break reproducibility.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .wigner import WignerGrid

__all__ = [
    "render_wigner_grid",
    "render_variance_curves",
    "render_truncation_scan",
    "render_schedule",
]


def render_wigner_grid(grid: WignerGrid, path, title: str | None = None) -> None:
    fig, ax = plt.subplots(figsize=(6.0, 5.0))
    scale = max(abs(float(grid.values.min())), abs(float(grid.values.max())), 1e-12)
    mesh = ax.pcolormesh(
        np.linspace(grid.x_min, grid.x_max, grid.nx + 1),
        np.linspace(grid.y_min, grid.y_max, grid.ny + 1),
        grid.values,
        cmap="RdBu_r",
        vmin=-scale,
        vmax=scale,
        rasterized=True,
    )
    fig.colorbar(mesh, ax=ax, label="W")
    ax.set_xlabel(r"Re $\gamma$")
    ax.set_ylabel(r"Im $\gamma$")
    ax.set_aspect("equal")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_variance_curves(rows, path, title: str | None = None) -> None:
    taus = [r[0] for r in rows]
    v1 = [r[1] for r in rows]
    v2 = [r[2] for r in rows]
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    ax.plot(taus, v1, color="navy", label=r"$(\Delta X_1)^2$")
    ax.plot(taus, v2, color="deepskyblue", label=r"$(\Delta X_2)^2$")
    ax.axhline(1.0, color="gray", lw=0.8, label="vacuum level")
    ax.set_xlabel(r"$\tau$")
    ax.set_ylabel("quadrature variance")
    ax.set_yscale("log")
    ax.legend()
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_truncation_scan(rows, path) -> None:
    """rows: (alpha, M, kept_probability, fidelity) tuples, possibly many alphas."""
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    alphas = sorted({r[0] for r in rows})
    for a in alphas:
        ms = [r[1] for r in rows if r[0] == a]
        kept = [r[2] for r in rows if r[0] == a]
        ax.plot(ms, kept, marker=".", label=f"alpha = {a:g}")
    ax.set_xlabel("cutoff M")
    ax.set_ylabel("kept probability")
    ax.axhline(0.999, color="gray", lw=0.8, ls="--")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_schedule(sched, path) -> None:
    """Bar chart of per-pulse durations or Rabi frequencies in schedule order."""
    labels = [pl.label for pl in sched.pulses]
    values = np.asarray(sched.per_pulse, dtype=float)
    unit = "duration (us)" if sched.mode == "fixed-rabi" else "Rabi (MHz)"
    values = values * 1e6 if sched.mode == "fixed-rabi" else values / 1e6
    colors = ["tab:blue" if pl.kind == "carrier" else "tab:red" for pl in sched.pulses]
    fig, ax = plt.subplots(figsize=(max(6.0, 0.4 * len(labels)), 4.0))
    ax.bar(range(len(values)), values, color=colors)
    ax.set_xticks(range(len(labels)), labels, rotation=60, fontsize=8)
    ax.set_ylabel(unit)
    ax.set_yscale("log")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
