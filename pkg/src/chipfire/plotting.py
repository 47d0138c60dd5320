"""Figures for CLI reports, rendered headless to image files."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
from matplotlib.ticker import MaxNLocator  # noqa: E402

from .engine import StepTrace  # noqa: E402


def _save(fig, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=120, bbox_inches="tight")
    plt.close(fig)
    return path


def plot_spacetime(tr: StepTrace, path, title: str = "") -> Path:
    """Chips per vertex over time, with firing vertices marked."""
    states = tr.states
    fig, ax = plt.subplots(figsize=(max(4, 0.4 * len(states[0]) + 2), max(3, 0.3 * len(states) + 1)))
    im = ax.imshow(states, aspect="auto", cmap="viridis", interpolation="nearest")
    for t, fs in enumerate(tr.firing_sets):
        for v in fs:
            ax.plot(v, t, marker="o", ms=4, mfc="none", mec="white")
    ax.xaxis.set_major_locator(MaxNLocator(integer=True))
    ax.yaxis.set_major_locator(MaxNLocator(integer=True))
    ax.set_xlabel("vertex")
    ax.set_ylabel("step")
    ax.set_title(title or "chips (circles mark firing vertices)")
    fig.colorbar(im, ax=ax, label="chips")
    return _save(fig, Path(path))


def plot_period_histogram(periods: dict, path, title: str = "", expected=None) -> Path:
    """Bar chart of start counts per detected period."""
    keys = sorted(int(p) for p in periods)
    counts = [periods[p] if p in periods else periods[str(p)] for p in keys]
    fig, ax = plt.subplots(figsize=(5, 3.5))
    colors = ["tab:blue" if expected is None or p in expected else "tab:red" for p in keys]
    ax.bar([str(p) for p in keys], counts, color=colors)
    ax.set_yscale("log")
    ax.set_xlabel("period")
    ax.set_ylabel("starts")
    ax.set_title(title or "period distribution")
    return _save(fig, Path(path))


def plot_check_counts(rows: list[dict], path, title: str = "") -> Path:
    """Hypothesis occurrences and violations per check."""
    names = [r["check"] for r in rows]
    fig, ax = plt.subplots(figsize=(6, 0.4 * len(rows) + 1.5))
    y = range(len(rows))
    ax.barh(y, [max(r["hypothesis_count"], 1) for r in rows], label="hypothesis met", color="tab:blue")
    ax.barh(y, [r["violation_count"] for r in rows], label="violations", color="tab:red")
    ax.set_yticks(list(y), names)
    ax.set_xscale("log")
    ax.legend(loc="lower right")
    ax.set_title(title or "lemma checks")
    return _save(fig, Path(path))
