"""Curve data for the two bundled figures, as CSV rows and rendered PNGs.

Figure 1: attainability of a candidate as a function of its approval
share, one curve per beta. Figure 2: per-candidate AU score against beta
for scenario B at alpha = 1.
"""

from __future__ import annotations

import math
from typing import Sequence

from .core import Scenario
from .heuristics import DEFAULT_EPSILON, ModelParams, au_score

FIGURE1_HEADER = ["beta", "share", "value"]
FIGURE2_HEADER = ["beta", "candidate", "value"]

FIGURE1_BETAS: tuple[float, ...] = (1.0, 8.0, 32.0)


def attainability_from_share(share: float, m: int, beta: float, k: int = 1) -> float:
    """Attainability expressed directly in terms of the approval share."""
    return math.atan(beta * (share - 1.0 / (m * k))) / math.pi + 0.5


def figure1_rows(
    betas: Sequence[float] = FIGURE1_BETAS,
    m: int = 5,
    steps: int = 20,
) -> list[tuple[float, float, float]]:
    """(beta, share, attainability) over an even share grid covering [0, 1]."""
    rows = []
    for beta in betas:
        for i in range(steps + 1):
            share = i / steps
            rows.append((beta, share, attainability_from_share(share, m, beta)))
    return rows


def figure2_rows(
    scenario: Scenario,
    alpha: float = 1.0,
    betas: Sequence[float] = tuple(range(1, 33)),
    winners: int = 1,
    missing: int = 0,
    epsilon: float = DEFAULT_EPSILON,
) -> list[tuple[float, str, float]]:
    """(beta, candidate, AU score) for every candidate across the beta grid."""
    cond = scenario.condition(winners=winners, missing=missing)
    rows = []
    for beta in betas:
        params = ModelParams(alpha=alpha, beta=beta, epsilon=epsilon)
        for c in cond.candidates:
            rows.append((beta, c, au_score(c, cond, params)))
    return rows


def _use_agg():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def render_figure1(rows: list[tuple[float, float, float]], path, m: int = 5) -> None:
    plt = _use_agg()
    fig, ax = plt.subplots(figsize=(5, 3.5))
    betas = sorted({r[0] for r in rows})
    for beta in betas:
        pts = [(share, v) for b, share, v in rows if b == beta]
        ax.plot([p[0] for p in pts], [p[1] for p in pts], label=f"beta={beta:g}")
    ax.axhline(0.5, color="grey", lw=0.6, ls="--")
    ax.axvline(1.0 / m, color="grey", lw=0.6, ls="--")
    ax.set_xlabel("approval share s/r")
    ax.set_ylabel("attainability")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_figure2(rows: list[tuple[float, str, float]], path) -> None:
    plt = _use_agg()
    fig, ax = plt.subplots(figsize=(5, 3.5))
    candidates = sorted({r[1] for r in rows})
    for c in candidates:
        pts = [(beta, v) for beta, cand, v in rows if cand == c]
        ax.semilogy([p[0] for p in pts], [p[1] for p in pts], label=c)
    ax.set_xlabel("beta")
    ax.set_ylabel("AU score")
    ax.legend(ncol=len(candidates), fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_accuracy_report(report, path) -> None:
    """Grouped bar chart of mean accuracy with sd whiskers per model."""
    plt = _use_agg()
    fig, ax = plt.subplots(figsize=(6, 3.5))
    models = type(report).MODELS
    ks = report.winner_counts
    width = 0.8 / len(models)
    for mi, model in enumerate(models):
        xs, ys, errs = [], [], []
        for ki, k in enumerate(ks):
            cell = report.cells.get((model, k))
            if cell and cell["n"]:
                xs.append(ki + mi * width)
                ys.append(cell["mean"])
                errs.append(cell["sd"])
        ax.bar(xs, ys, width=width, yerr=errs, capsize=2, label=model.display_name)
    ax.set_xticks([i + 0.4 - width / 2 for i in range(len(ks))])
    ax.set_xticklabels([f"{k} winner" for k in ks])
    ax.set_ylabel("mean LOO accuracy")
    ax.set_ylim(0, 1.05)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
