"""Convergence figures rendered next to the delimited output."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be pinned first)

__all__ = ["render_trace_figures"]

_PANELS = (("tol", "log"), ("psnr", "linear"), ("ssim", "linear"))


def render_trace_figures(traces: dict[str, dict[str, list[float]]], out_dir, stem: str = "") -> list[Path]:
    """One PNG per metric (tol/psnr/ssim vs iteration), all solvers overlaid.

    ``traces`` maps a line label to a parsed trace (read_trace_csv layout).
    Returns the written paths.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for column, scale in _PANELS:
        fig, ax = plt.subplots(figsize=(6.4, 4.2))
        for label, trace in traces.items():
            ax.plot(trace["iter"], trace[column], label=label, linewidth=1.4)
        ax.set_xlabel("iteration")
        ax.set_ylabel(column)
        ax.set_yscale(scale)
        ax.grid(True, which="both", alpha=0.3)
        ax.legend(fontsize=8)
        fig.tight_layout()
        path = out_dir / f"{stem}{column}.png"
        fig.savefig(path, dpi=150)
        plt.close(fig)
        written.append(path)
    return written
