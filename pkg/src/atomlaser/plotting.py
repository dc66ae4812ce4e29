"""Optional SVG line plots of scenario curves (needs matplotlib)."""
from __future__ import annotations

from pathlib import Path

import numpy as np


def plot_series(series: dict, path, title: str = "") -> Path:
    """Plot the real part of every series against time in ms and save as SVG."""
    try:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError as exc:  # pragma: no cover - depends on environment
        raise RuntimeError("plotting needs matplotlib (pip install matplotlib)") from exc

    path = Path(path)
    # fixed metadata keeps the SVG reproducible
    plt.rcParams["svg.hashsalt"] = "atomlaser"
    fig, ax = plt.subplots(figsize=(6, 4))
    for label, s in series.items():
        if s.is_complex:
            continue
        ax.plot(s.t * 1e3, np.real(s.value), label=label)
    ax.set_xlabel("t (ms)")
    ax.set_ylabel("cavity population")
    if title:
        ax.set_title(title)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return path
