"""Figure rendering for CLI reports.

Every figure-producing command writes the underlying data as CSV/JSON too;
the PNGs here are conveniences rendered alongside, on the Agg backend.
"""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

_META = {"Software": "combclt"}


def save_histogram_figure(rows, path, title: str, overlay_normal: bool = True) -> None:
    """Histogram of standardized samples with the standard normal density."""
    lefts = np.array([r[0] for r in rows])
    rights = np.array([r[1] for r in rows])
    counts = np.array([r[2] for r in rows], dtype=float)
    widths = rights - lefts
    total = counts.sum()
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    if total > 0:
        ax.bar(lefts, counts / (total * widths), width=widths, align="edge",
               color="#4878cf", edgecolor="white", linewidth=0.3,
               label="samples")
    if overlay_normal:
        xs = np.linspace(lefts[0], rights[-1], 400)
        ax.plot(xs, np.exp(-xs ** 2 / 2) / math.sqrt(2 * math.pi), "k--",
                linewidth=1.2, label="N(0, 1)")
    ax.set_xlabel("standardized value")
    ax.set_ylabel("density")
    ax.set_title(title)
    ax.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(path, dpi=150, metadata=_META)
    plt.close(fig)


def save_decay_figure(levels, path, title: str) -> None:
    """Per-level maxima of a difference statistic on a log scale."""
    ps = [p for p, m, _ in levels]
    ms = [m for _, m, _ in levels]
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.plot(ps, ms, "o-", color="#4878cf")
    ax.set_yscale("symlog", linthresh=0.5)
    ax.set_xlabel("Gromov product level")
    ax.set_ylabel("max difference")
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150, metadata=_META)
    plt.close(fig)


def save_deviation_figure(rows, k_fitted, path, title: str) -> None:
    """Per-length deviation summary of the generating-set comparison."""
    ns = [r[0] for r in rows]
    means = [r[2] for r in rows]
    dev95 = [r[3] for r in rows]
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.plot(ns, means, "o-", label="mean deviation")
    ax.plot(ns, dev95, "s-", label="max over middle 95%")
    if k_fitted is not None:
        xs = np.linspace(min(ns), max(ns), 100)
        ax.plot(xs, k_fitted * np.sqrt(xs), "k--", linewidth=1.0,
                label=f"K sqrt(n), K = {k_fitted:.3f}")
    ax.set_xlabel("word length n")
    ax.set_ylabel("|n - lambda12 |g|_2|")
    ax.set_title(title)
    ax.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(path, dpi=150, metadata=_META)
    plt.close(fig)


def save_growth_figure(samples, lam, path, title: str) -> None:
    """Accepted-word counts against the fitted exponential rate."""
    ns = np.array([n for n, _ in samples], dtype=float)
    logs = np.array([math.log(c) for _, c in samples])
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.plot(ns, logs, "o", label="log count")
    ax.plot(ns, ns * math.log(lam) + logs[0] - ns[0] * math.log(lam), "k--",
            label=f"slope log({lam:.4g})")
    ax.set_xlabel("n")
    ax.set_ylabel("log #accepted words")
    ax.set_title(title)
    ax.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(path, dpi=150, metadata=_META)
    plt.close(fig)
