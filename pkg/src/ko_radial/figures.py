"""Render the solution and functional profiles to PNG files.

Purely presentational: the CSV is the data interface, the figures are a
quick visual check written next to the report (same stem, suffixes
``_solution.png`` and ``_functionals.png``).  Disabled with
``output.figures = off``.
"""

from __future__ import annotations

from pathlib import Path
from typing import Optional

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)
import numpy as np  # noqa: E402

from .solver import SolutionPair  # noqa: E402
from .transforms import IntegralProfile  # noqa: E402

__all__ = ["render_figures"]


def _masked_line(ax, r, partial, label, **kw):
    vals = np.where(partial.mask, partial.values, np.nan)
    ax.plot(r, vals, label=label, **kw)


def render_figures(
    report_path: str,
    profile: IntegralProfile,
    sol: Optional[SolutionPair] = None,
) -> list:
    """Write the figure files and return their paths (solution fig only
    when a solve is available)."""
    stem = Path(report_path).with_suffix("")
    written = []
    r = profile.grid.nodes

    if sol is not None:
        fig, ax = plt.subplots(figsize=(6.0, 4.0))
        ax.plot(r, sol.u.values, label="u", color="tab:blue")
        ax.plot(r, sol.v.values, label="v", color="tab:orange")
        ax.plot(r, sol.du.values, "--", label="u'", color="tab:blue", alpha=0.6)
        ax.plot(r, sol.dv.values, "--", label="v'", color="tab:orange", alpha=0.6)
        ax.set_xlabel("r")
        ax.set_title("radial solution pair")
        ax.legend(loc="best", fontsize=8)
        ax.grid(True, alpha=0.3)
        path = f"{stem}_solution.png"
        fig.savefig(path, dpi=130, bbox_inches="tight")
        plt.close(fig)
        written.append(path)

    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.plot(r, profile.p1_tab.values, label="P1")
    ax.plot(r, profile.p2_tab.values, label="P2")
    ax.plot(r, profile.plower.values, label="P_lower")
    ax.plot(r, profile.qlower.values, label="Q_lower")
    _masked_line(ax, r, profile.pbar1, "Pbar1", linestyle="--")
    _masked_line(ax, r, profile.pbar2, "Pbar2", linestyle="--")
    _masked_line(ax, r, profile.zinv_bound, "Zinv(P1+P2)", linestyle=":")
    ax.set_xlabel("r")
    ax.set_title("growth functionals")
    ax.legend(loc="best", fontsize=8)
    ax.grid(True, alpha=0.3)
    path = f"{stem}_functionals.png"
    fig.savefig(path, dpi=130, bbox_inches="tight")
    plt.close(fig)
    written.append(path)
    return written
