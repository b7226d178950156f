"""Figures written next to the delimited reports."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .data import Dataset, FactorColumn, factor_cell_means  # noqa: E402


def interaction_plot(ds: Dataset, response: str, effect: str, across: str, path, title: str | None = None):
    """Cell means of ``response`` against levels of ``across``, one line per
    level of ``effect``. A numeric ``across`` gives a scatter instead, coloured
    by ``effect`` when it is a factor."""
    fig, ax = plt.subplots(figsize=(6, 4))
    y = ds.numeric(response)
    x_col, y_col = ds[effect], ds[across]
    if isinstance(x_col, FactorColumn) and isinstance(y_col, FactorColumn):
        cm = factor_cell_means(ds, response, [effect, across])
        pos = np.arange(y_col.n_levels)
        for i, level in enumerate(x_col.levels):
            ax.plot(pos, cm.means[i], marker="o", label=f"{effect} = {level}")
        # unweighted average over the across-levels: what the main effect compares
        for i, level in enumerate(x_col.levels):
            ax.axhline(np.nanmean(cm.means[i]), ls=":", lw=0.8, color=f"C{i}")
        ax.set_xticks(pos, y_col.levels)
    else:
        xs = ds.numeric(across) if not isinstance(y_col, FactorColumn) else y_col.codes
        if isinstance(x_col, FactorColumn):
            for i, level in enumerate(x_col.levels):
                sel = x_col.codes == i
                ax.scatter(xs[sel], y[sel], s=12, label=f"{effect} = {level}")
        else:
            sc = ax.scatter(xs, y, c=x_col.values, s=12, cmap="viridis")
            fig.colorbar(sc, ax=ax, label=effect)
    ax.set_xlabel(across)
    ax.set_ylabel(response)
    if ax.get_legend_handles_labels()[0]:
        ax.legend(frameon=False, fontsize="small")
    ax.set_title(title or f"{response} by {effect} and {across}")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
