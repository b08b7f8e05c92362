"""Static SVG line plots (no display needed, byte-stable across runs)."""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

_RC = {
    "svg.hashsalt": "nullspace-interp",
    "svg.fonttype": "none",
    "path.simplify": False,
}

COLORS = {"a": "tab:green", "b": "black", "modified": "magenta", "extra": "tab:blue"}


def _save(fig, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, format="svg", metadata={"Date": None, "Creator": None})
    plt.close(fig)
    return path


def plot_lines(path, x, series: Sequence[tuple[str, np.ndarray, str]], xlabel: str = "domain",
               ylabel: str = "", title: str = "") -> Path:
    """One axes, one line per ``(label, values, color)``."""
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(6.4, 4.0))
        for label, values, color in series:
            ax.plot(x, values, label=label, color=color, linewidth=1.2)
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        if title:
            ax.set_title(title)
        ax.legend(loc="best", fontsize="small")
        if x is not None and len(x) > 1 and x[0] > x[-1]:
            ax.invert_xaxis()
        fig.tight_layout()
        return _save(fig, path)


def plot_nullspace(path, domain, comparison, label_a: str, label_b: str, title: str = "") -> Path:
    """``beta_a``, ``beta_b`` and ``beta_a + v`` overlaid."""
    x = domain if domain is not None else np.arange(comparison.v.size)
    gamma = "inf" if comparison.gamma_is_inf else f"{comparison.gamma:.3g}"
    series = [
        (label_b, comparison.beta_b.beta, COLORS["b"]),
        (label_a, comparison.beta_a.beta, COLORS["a"]),
        (f"{label_a} + v (gamma={gamma})", comparison.modified, COLORS["modified"]),
    ]
    return plot_lines(path, x, series, ylabel="coefficient", title=title)


def plot_rows(path, domain, X: np.ndarray, title: str = "", ylabel: str = "") -> Path:
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(6.4, 4.0))
        x = domain if domain is not None else np.arange(X.shape[1])
        for row in X:
            ax.plot(x, row, linewidth=0.6)
        if x[0] > x[-1]:
            ax.invert_xaxis()
        ax.set_ylabel(ylabel)
        if title:
            ax.set_title(title)
        fig.tight_layout()
        return _save(fig, path)


def plot_snr(path, domain, profile) -> Path:
    with plt.rc_context(_RC):
        fig, axes = plt.subplots(3, 1, figsize=(6.4, 7.0), sharex=True)
        x = domain
        axes[0].plot(x, profile.snr_db, color="tab:blue")
        axes[0].set_ylabel("SNR [dB]")
        axes[1].semilogy(x, profile.noise_power, color="tab:red")
        axes[1].set_ylabel("noise power")
        axes[2].plot(x, profile.column_mean, color="black", label="mean")
        axes[2].plot(x, profile.column_std, color="tab:orange", label="std")
        axes[2].legend(fontsize="small")
        if x[0] > x[-1]:
            axes[2].invert_xaxis()
        fig.tight_layout()
        return _save(fig, path)


def plot_cv(path, cv) -> Path:
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(6.4, 4.0))
        g = np.asarray(cv.grid, dtype=float)
        ax.errorbar(g, cv.mean_curve, yerr=cv.std_curve, fmt="o-", markersize=3, linewidth=1)
        ax.axvline(float(cv.chosen_min), color="tab:green", linestyle="--", label="min")
        ax.axvline(float(cv.chosen_1se), color="magenta", linestyle=":", label="one-se")
        if cv.method in ("ridge", "fused-lasso", "lasso"):
            ax.set_xscale("log")
        ax.set_xlabel(cv.method)
        ax.set_ylabel("CV RMSE")
        ax.legend(fontsize="small")
        fig.tight_layout()
        return _save(fig, path)


def plot_predictions(path, y, yhat, title: str = "") -> Path:
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(4.5, 4.5))
        ax.scatter(y, yhat, s=10)
        lo, hi = float(min(np.min(y), np.min(yhat))), float(max(np.max(y), np.max(yhat)))
        ax.plot([lo, hi], [lo, hi], color="black", linewidth=0.8)
        ax.set_xlabel("observed")
        ax.set_ylabel("predicted")
        if title:
            ax.set_title(title)
        fig.tight_layout()
        return _save(fig, path)
