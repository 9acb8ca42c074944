"""Figure rendering for the report path (PNG files next to the dumps).

Uses the Agg backend; nothing here opens a window.  Figures are a
convenience view of the delimited dumps and are not part of the
determinism contract.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def trace_figure(trace, path):
    fig, ax = plt.subplots(figsize=(6, 4))
    deltas = trace.deltas
    ax.semilogy(range(1, len(deltas) + 1), np.maximum(deltas, 1e-300),
                marker="o")
    ax.set_xlabel("iteration")
    ax.set_ylabel("sup-norm delta")
    ax.set_title(f"Picard trace ({trace.status})")
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)
    return path


def field_slices_figure(flow, path):
    """Midplane slices of the four flow components at the final time."""
    g = flow.grid
    it = g.shape[0] - 1
    k3 = g.shape[3] // 2
    fig, axes = plt.subplots(2, 2, figsize=(9, 7))
    extent = (g.axes[0][0], g.axes[0][-1], g.axes[1][0], g.axes[1][-1])
    for ax, (name, arr) in zip(axes.ravel(), flow.components().items()):
        im = ax.imshow(arr[it, :, :, k3].T, origin="lower", extent=extent,
                       aspect="auto")
        ax.set_title(f"{name}  (t={g.times[it]:.3g}, x3 mid)")
        fig.colorbar(im, ax=ax, shrink=0.85)
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)
    return path


def residual_figure(report, path):
    """Midplane slices of the continuity and first momentum residuals."""
    fig, axes = plt.subplots(1, 2, figsize=(10, 4))
    for ax, (name, arr) in zip(
            axes, (("continuity", report.continuity),
                   ("momentum1", report.momentum[0]))):
        mid = arr.shape[-1] // 2
        it = arr.shape[0] - 1
        im = ax.imshow(arr[it, :, :, mid].T, origin="lower", aspect="auto")
        ax.set_title(f"{name} residual (interior)")
        fig.colorbar(im, ax=ax, shrink=0.85)
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)
    return path


def certification_figure(records, path):
    fig, ax = plt.subplots(figsize=(6, 4))
    mags = [np.linalg.norm(r.xi) for r in records]
    ax.loglog(mags, [max(r.eta_residual, 1e-300) for r in records], ".",
              label="null-family residual")
    ax.loglog(mags, [max(r.particular_residual, 1e-300) for r in records],
              "x", label="particular residual")
    ax.set_xlabel("|xi|")
    ax.set_ylabel("relative residual")
    ax.legend()
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)
    return path


def partition_figure(result, path):
    """x1-x2 footprint of the partition pieces (x3 collapsed)."""
    fig, ax = plt.subplots(figsize=(6, 6))
    for box, rep in zip(result.domain.boxes, result.reports):
        color = "tab:green" if rep.all_ok else "tab:red"
        rect = plt.Rectangle((box.lo[0], box.lo[1]),
                             box.hi[0] - box.lo[0], box.hi[1] - box.lo[1],
                             fill=False, edgecolor=color, linewidth=1.5)
        ax.add_patch(rect)
    ax.autoscale_view()
    ax.set_xlabel("x1")
    ax.set_ylabel("x2")
    ax.set_title("partition pieces (green = closing inequalities pass)")
    ax.set_aspect("equal")
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)
    return path
