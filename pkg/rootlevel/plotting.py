"""Curvas de ocupación por iteración (#G_h, #G_a y |C_a|)."""

import logging
from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from rootlevel.models.metrics import IterationMetrics  # noqa: E402

logger = logging.getLogger(__name__)


def plot_occupancy(metrics: Sequence[IterationMetrics], path) -> Path:
    """
    Dibuja las curvas de ocupación en ``path`` (PNG).

    G_h debe crecer y estabilizarse mientras G_a y C_a decaen hacia la terminación.
    """
    path = Path(path)
    iters = [m.iteration for m in metrics]
    fig, (ax_grid, ax_front) = plt.subplots(1, 2, figsize=(10, 4))

    ax_grid.plot(iters, [m.gh_cubes for m in metrics], label="G_h")
    ax_grid.plot(iters, [m.ga_cubes for m in metrics], label="G_a")
    ax_grid.set_xlabel("iteración")
    ax_grid.set_ylabel("cubos ocupados")
    ax_grid.legend()

    ax_front.plot(iters, [m.c_active for m in metrics], label="|C_a|")
    ax_front.plot(iters, [m.c_static for m in metrics], label="|C_s|")
    ax_front.set_xlabel("iteración")
    ax_front.set_ylabel("vóxeles de contorno")
    ax_front.set_yscale("symlog")
    ax_front.legend()

    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    logger.debug("Curvas de ocupación en %s", path)
    return path
