"""Matplotlib renderers for the report paths (headless, file output only)."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .analytics import AnalyticResult  # noqa: E402
from .sim import MonteCarloSummary  # noqa: E402


def fig_analytic_pmf(result: AnalyticResult, path: Path) -> Path:
    """Access-count distribution from the closed form."""
    fig, ax = plt.subplots(figsize=(6, 4))
    xs = sorted(result.access_pmf)
    ax.vlines(xs, 0, [result.access_pmf[x] for x in xs], lw=2)
    if result.pr_terminal > 0:
        ax.vlines([result.n - result.s], 0, [result.pr_terminal],
                  lw=2, color="tab:red", label="failure (charged full cost)")
        ax.legend()
    ax.set_xlabel("storage nodes accessed")
    ax.set_ylabel("probability")
    ax.set_title(f"n-s={result.n - result.s}, k={result.k_hat}, p={result.p}: "
                 f"mean {result.avg_accesses:.1f}")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return Path(path)


def fig_simulation_vs_analytic(summary: MonteCarloSummary,
                               analytic: AnalyticResult | None,
                               path: Path) -> Path:
    """Empirical access histogram, optionally overlaid with the closed form."""
    fig, ax = plt.subplots(figsize=(6, 4))
    xs = sorted(summary.histogram)
    freqs = [summary.histogram[x] / summary.trials for x in xs]
    ax.bar(xs, freqs, width=1.6, label=f"simulation ({summary.trials} runs)")
    if analytic is not None:
        axs = sorted(analytic.access_pmf)
        ax.plot(axs, [analytic.access_pmf[x] for x in axs], "k.-", ms=4,
                lw=1, label="closed form")
    ax.set_xlabel("storage nodes accessed")
    ax.set_ylabel("fraction of runs")
    ax.set_title(f"n={summary.n}, k={summary.k_hat}, p={summary.p_byz}")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return Path(path)


def fig_bench_breakdown(rows: list[dict], path: Path) -> Path:
    """Stacked per-phase decode-time bars, grouped by (algorithm, p)."""
    fig, ax = plt.subplots(figsize=(7, 4))
    labels = [f"{r['algorithm']}\np={r['p']}" for r in rows]
    x = range(len(rows))
    bottom = [0.0] * len(rows)
    for phase_name, color in (("elp_s", "tab:blue"), ("chien_s", "tab:orange"),
                              ("inv_mat_s", "tab:green")):
        vals = [r[phase_name] for r in rows]
        ax.bar(x, vals, bottom=bottom, label=phase_name[:-2], color=color)
        bottom = [b + v for b, v in zip(bottom, vals)]
    ax.set_xticks(list(x))
    ax.set_xticklabels(labels, fontsize=8)
    ax.set_ylabel("mean decode time (s)")
    ax.set_yscale("log")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return Path(path)
