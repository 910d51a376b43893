"""Optional line charts derived from the persisted tables."""

from fractions import Fraction
from pathlib import Path
from typing import Any

import numpy as np
import pandas as pd

from ..core.logger import get_logger

logger = get_logger(__name__)


def _pyplot() -> Any:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def _save(fig: Any, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=150)
    _pyplot().close(fig)
    logger.debug("plot written", extra={"path": str(path)})
    return path


def _to_float(value: str) -> float:
    return float(Fraction(value)) if "/" in value else float(value)


def plot_rates(covering: pd.DataFrame, path: Path) -> Path:
    """log(cov)/|F_n| against n, shaded between the lower and upper counts, one curve per system."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6, 4), constrained_layout=True)
    for system, group in covering.groupby("system", sort=True):
        n = group["n"].astype(int).to_numpy()
        size = group["folner_size"].astype(float).to_numpy()
        lower = np.log(group["cov_lower"].astype(float).to_numpy()) / size
        upper = np.log(group["cov_upper"].astype(float).to_numpy()) / size
        ax.plot(n, upper, marker="o", label=str(system))
        ax.fill_between(n, lower, upper, alpha=0.2)
    ax.set_xlabel("n")
    ax.set_ylabel("log cov / |F_n|")
    ax.grid(True, alpha=0.3)
    ax.legend(loc="best", fontsize=8)
    return _save(fig, path)


def plot_smb(smb: pd.DataFrame, path: Path) -> Path:
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6, 4), constrained_layout=True)
    for system, group in smb.groupby("system", sort=True):
        n = group["n"].astype(int).to_numpy()
        ax.plot(n, group["mean"].astype(float).to_numpy(), marker="o", label=str(system))
        reference = group["reference"]
        if (reference != "").all():
            ax.plot(n, reference.astype(float).to_numpy(), linestyle="--", color="gray")
    ax.set_xlabel("n")
    ax.set_ylabel("mean -log mu(cell) / |F_n|")
    ax.grid(True, alpha=0.3)
    ax.legend(loc="best", fontsize=8)
    return _save(fig, path)


def plot_ball_masses(grid: pd.DataFrame, path: Path) -> Path:
    """Measured fiber ball masses against exp(-|F|/8K^2) on a log scale."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6, 4), constrained_layout=True)
    for K, group in grid.groupby("K", sort=True):
        sizes = group["size"].astype(int).to_numpy()
        masses = np.array([max(_to_float(v), 1e-300) for v in group["mass"]])
        ax.scatter(sizes, masses, s=10, label=f"K={K} measured")
        bounds = group.drop_duplicates("size")
        ax.plot(bounds["size"].astype(int).to_numpy(), bounds["bound"].astype(float).to_numpy(), linestyle="--")
    ax.set_yscale("log")
    ax.set_xlabel("|F|")
    ax.set_ylabel("fiber ball mass")
    ax.grid(True, alpha=0.3)
    ax.legend(loc="best", fontsize=8)
    return _save(fig, path)
