"""Figures for benchmark reports."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .bench import budget, fitted_constant  # noqa: E402


def plot_bench(rows, path, title="Valuation queries per run") -> None:
    """Queries against m (one line per n) next to the fitted budget curve."""
    fig, (ax, ax2) = plt.subplots(1, 2, figsize=(9, 3.6))
    c = fitted_constant(rows)
    for n in sorted({r["n"] for r in rows}):
        pts = sorted((r["m"], r["query_count"], r["budget_ratio"]) for r in rows if r["n"] == n)
        ms = [p[0] for p in pts]
        line = ax.plot(ms, [p[1] for p in pts], "o-", label=f"n={n}")[0]
        ax.plot(ms, [c * budget(n, m) for m in ms], ":", color=line.get_color(), lw=1)
        ax2.plot(ms, [p[2] for p in pts], "o-", color=line.get_color(), label=f"n={n}")
        if "naive_query_count" in rows[0]:
            ax.plot(ms, [r["naive_query_count"] for r in sorted(rows, key=lambda r: r["m"]) if r["n"] == n],
                    "s--", color=line.get_color(), alpha=0.6, label=f"n={n} explicit graph")
    ax.set_xscale("log", base=2)
    ax.set_yscale("log")
    ax.set_xlabel("goods m")
    ax.set_ylabel("valuation queries")
    ax.set_title(title)
    ax.legend(fontsize=7, frameon=False)
    ax2.axhline(c, color="grey", lw=0.8, ls="--")
    ax2.set_xscale("log", base=2)
    ax2.set_xlabel("goods m")
    ax2.set_ylabel("queries / ((m+n) m (log2 m + 2))")
    ax2.set_ylim(bottom=0)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
