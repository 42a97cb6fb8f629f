"""Figure emission for sweep curves and survival maps (headless, file-only)."""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .statistics import SurvivalRecord

__all__ = ["save_survival_curves", "save_survival_heatmap"]

# Fixed hashsalt keeps SVG element ids, and with creation dates stripped the
# whole file, reproducible across runs.
plt.rcParams["svg.hashsalt"] = "fanolattice"

_CURVES = (
    ("p_boson", "bosons", "crimson", "-"),
    ("p_fermion", "fermions", "royalblue", "-"),
    ("p_classical", "distinguishable", "black", "-"),
    ("p_entangled", "entangled pair", "royalblue", "--"),
)


def _save(fig, path: str | Path) -> None:
    path = Path(path)
    metadata = {"Date": None} if path.suffix == ".svg" else None
    fig.savefig(path, metadata=metadata, bbox_inches="tight")
    plt.close(fig)


def save_survival_curves(records: Sequence[SurvivalRecord], path: str | Path, x: str = "z") -> None:
    """Line plot of all four survival curves against z or against eps2."""
    if x == "z":
        xs = [r.z for r in records]
        xlabel = "z (mm)"
    elif x == "eps2":
        xs = [r.eps2 for r in records]
        xlabel = "eps2 (1/mm)"
    else:
        raise ValueError(f"x must be 'z' or 'eps2' (got {x!r})")
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for attr, label, color, style in _CURVES:
        ax.plot(xs, [getattr(r, attr) for r in records], style, color=color, label=label, lw=1.6)
    if x == "eps2":
        ax.axvline(records[0].eps1, color="gray", ls=":", lw=1.0, label="eps2 = eps1")
    ax.set_xlabel(xlabel)
    ax.set_ylabel("survival probability")
    ax.set_ylim(-0.02, 1.02)
    r0 = records[0]
    ax.set_title(f"eps1={r0.eps1:g}, kappa={r0.kappa:g} (1/mm)", fontsize=10)
    ax.legend(frameon=False, fontsize=9)
    _save(fig, path)


def save_survival_heatmap(grid: Sequence[Sequence[SurvivalRecord]], path: str | Path, stat: str = "boson") -> None:
    """Heatmap of one statistics over the (kappa*z, detuning/kappa) plane.

    ``grid`` is indexed [i_z][i_eps2] as returned by ``survival_map``.
    """
    if stat not in ("boson", "fermion", "classical", "entangled"):
        raise ValueError(f"unknown statistics {stat!r}")
    r0 = grid[0][0]
    kappa, eps1 = r0.kappa, r0.eps1
    kz = [row[0].z * kappa for row in grid]
    detuning = [(r.eps2 - eps1) / kappa for r in grid[0]]
    values = [[getattr(r, f"p_{stat}") for r in row] for row in grid]
    fig, ax = plt.subplots(figsize=(5.4, 4.4))
    # rasterized: dense meshes would otherwise emit one vector patch per cell
    mesh = ax.pcolormesh(
        detuning, kz, values, shading="nearest", vmin=0.0, vmax=1.0, cmap="inferno", rasterized=True
    )
    fig.colorbar(mesh, ax=ax, label="survival probability")
    ax.set_xlabel("(eps2 - eps1) / kappa")
    ax.set_ylabel("kappa * z")
    ax.set_title(f"{stat} pair survival", fontsize=10)
    _save(fig, path)
