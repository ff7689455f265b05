"""Optional SVG rendering of command tables (needs matplotlib)."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from nhgauss.config import RunConfig
from nhgauss.csvio import Table


def _grid(table: Table):
    x = np.array(table.column(table.header[0]), dtype=float)
    y = np.array(table.column(table.header[1]), dtype=float)
    xs, ys = np.unique(x), np.unique(y)
    z = np.array([np.nan if v is None else v for v in table.column(table.header[2])], dtype=float)
    return xs, ys, z.reshape(len(xs), len(ys))


def plot_table(table: Table, cfg: RunConfig, path: Path) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(5, 3.6))
    if cfg.command in ("sweep", "wigner"):
        xs, ys, z = _grid(table)
        mesh = ax.pcolormesh(xs, ys, z.T, shading="auto")
        fig.colorbar(mesh, ax=ax, label=table.header[2])
        ax.set_xlabel(table.header[0])
        ax.set_ylabel(table.header[1])
    elif cfg.command in ("spectrum", "evolve"):
        x = np.array(table.column(table.header[0]), dtype=float)
        for name in table.header[1:]:
            if name.startswith("V_"):
                continue
            ax.plot(x, np.array(table.column(name), dtype=float), label=name)
        ax.set_xlabel(table.header[0])
        ax.legend(fontsize="small")
    else:
        plt.close(fig)
        return
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
