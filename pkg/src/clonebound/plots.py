"""Figure rendering for sweep output (headless, straight to file)."""

from __future__ import annotations

from matplotlib.figure import Figure


def render_sweep_figure(values, bounds, regimes, param: str, path: str) -> None:
    """Line plot of the bound along the swept parameter, regimes marked."""
    fig = Figure(figsize=(6.4, 4.2))
    ax = fig.subplots()
    ax.plot(values, bounds, color="tab:blue", lw=1.4, zorder=1)
    for regime, color, marker in (
        ("restricted", "tab:blue", "o"),
        ("saturated", "tab:red", "s"),
        ("mixed", "tab:orange", "^"),
    ):
        xs = [v for v, r in zip(values, regimes) if r == regime]
        ys = [b for b, r in zip(bounds, regimes) if r == regime]
        if xs:
            ax.scatter(xs, ys, s=18, color=color, marker=marker, label=regime, zorder=2)
    ax.set_xlabel(param)
    ax.set_ylabel("global-fidelity upper bound")
    ax.set_ylim(min(0.49, min(bounds) - 0.02), 1.02)
    ax.grid(alpha=0.3)
    ax.legend(loc="best", fontsize=9)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
