"""Figure rendering for the report path: overlaid reconstruction curves."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def render_curves(grid, target, reconstructions: dict, out_path, title=None):
    """One overlaid plot of the target and every method's reconstruction."""
    fig, ax = plt.subplots(figsize=(8, 5))
    ax.plot(grid, target, "k-", lw=2, label="target")
    for label, curve in reconstructions.items():
        ax.plot(grid, curve, lw=1, alpha=0.8, label=label)
    ax.set_xlabel("t")
    ax.set_ylabel("f(t)")
    ax.set_ylim(min(-0.5, float(min(target)) - 0.5), max(1.5, float(max(target)) + 0.5))
    if title:
        ax.set_title(title)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(Path(out_path), dpi=150)
    plt.close(fig)


def render_method_panels(grid, target, reconstructions: dict, out_path, title=None):
    """One subplot per method, target overlaid in each."""
    n = len(reconstructions)
    ncols = min(3, max(1, n))
    nrows = (n + ncols - 1) // ncols
    fig, axes = plt.subplots(nrows, ncols, figsize=(4 * ncols, 3 * nrows),
                             squeeze=False)
    for ax, (label, curve) in zip(axes.ravel(), reconstructions.items()):
        ax.plot(grid, target, "k-", lw=1.5)
        ax.plot(grid, curve, "C1-", lw=1)
        ax.set_title(label, fontsize=9)
        ax.set_ylim(-0.5, 1.5)
    for ax in axes.ravel()[n:]:
        ax.axis("off")
    if title:
        fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(Path(out_path), dpi=150)
    plt.close(fig)


def render_phase_diagram(table: dict, out_path, title=None):
    """Heat map of recovery probability over the (m, s) grid."""
    import numpy as np

    fig, ax = plt.subplots(figsize=(7, 5))
    prob = np.asarray(table["probability"], dtype=float)
    im = ax.imshow(prob, origin="lower", aspect="auto", vmin=0.0, vmax=1.0,
                   extent=(min(table["m"]), max(table["m"]),
                           min(table["s"]), max(table["s"])))
    fig.colorbar(im, ax=ax, label="recovery probability")
    ax.set_xlabel("m (samples)")
    ax.set_ylabel("s (weighted sparsity budget)")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(Path(out_path), dpi=150)
    plt.close(fig)
