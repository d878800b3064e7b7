"""Figure rendering for the report path.

Each CLI command can drop a matplotlib figure next to its delimited output.
Rendering is headless (Agg) and file-format follows the path suffix.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .model import AllocationProblem, AllocationResult
from .solver import CrossingReport, ReferenceBetaResult, SweepResult


def _finish(fig, path) -> None:
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_allocation(problem: AllocationProblem, result: AllocationResult, path) -> None:
    """Grouped bars: demand next to allocated amount for every agent."""
    names = list(problem.names)
    demand = [a.demand for a in problem.agents]
    alloc = [result.allocations[n] for n in names]
    x = np.arange(len(names))
    fig, ax = plt.subplots(figsize=(8, 4.5))
    ax.bar(x - 0.2, demand, width=0.4, label="demand", color="#888888")
    ax.bar(x + 0.2, alloc, width=0.4, label="allocation", color="#2a6fb0")
    ax.set_xticks(x)
    ax.set_xticklabels(names, rotation=30, ha="right")
    ax.set_ylabel("quantity (1000 t)")
    ax.set_title(f"allocation vs demand at beta = {result.beta:g}")
    ax.legend()
    _finish(fig, path)


def render_sweep(sweep: SweepResult, demands, path) -> None:
    """Allocation curves over beta, with dashed demand levels, plus the objective."""
    fig, (ax_top, ax_bot) = plt.subplots(
        2, 1, figsize=(8, 7), sharex=True, height_ratios=[2, 1]
    )
    for name, values in sweep.curves.items():
        (line,) = ax_top.plot(sweep.betas, values, label=name)
        level = demands.get(name) if demands else None
        if level:
            ax_top.axhline(level, color=line.get_color(), linestyle=":", linewidth=0.8)
    ax_top.set_ylabel("allocation (1000 t)")
    ax_top.legend(fontsize=8, ncols=2)
    ax_bot.plot(sweep.betas, sweep.objective, color="#333333")
    ax_bot.set_xlabel("beta")
    ax_bot.set_ylabel("sum of squared gaps")
    _finish(fig, path)


def render_objective(sweep: SweepResult, ref: ReferenceBetaResult, path) -> None:
    """Objective curve over the bracket with the minimizer marked."""
    fig, ax = plt.subplots(figsize=(8, 4.5))
    ax.plot(sweep.betas, sweep.objective, color="#333333")
    ax.axvline(ref.beta_star, color="#b03030", linestyle="--", linewidth=1.0)
    ax.annotate(
        f"beta* = {ref.beta_star:.4f}",
        xy=(ref.beta_star, ref.y_min),
        xytext=(5, 10),
        textcoords="offset points",
        color="#b03030",
    )
    ax.set_xlabel("beta")
    ax.set_ylabel("sum of squared gaps")
    _finish(fig, path)


def render_crossings(
    sweep: SweepResult, demands, report: CrossingReport, path
) -> None:
    """Allocation curves with demand levels and markers at each crossing root."""
    fig, ax = plt.subplots(figsize=(8, 5))
    for name, values in sweep.curves.items():
        (line,) = ax.plot(sweep.betas, values, label=name)
        level = demands.get(name) if demands else None
        if level:
            ax.axhline(level, color=line.get_color(), linestyle=":", linewidth=0.8)
        for root in report.roots.get(name, ()):
            ax.plot([root.beta], [level if level else 0.0], "o", color=line.get_color(), markersize=4)
    ax.set_xlabel("beta")
    ax.set_ylabel("allocation (1000 t)")
    ax.legend(fontsize=8, ncols=2)
    _finish(fig, path)


def render_divide(players, result: AllocationResult, path) -> None:
    """Bar chart of each player's share of the divided good."""
    names = [name for name, _, _ in players]
    shares = [result.allocations[n] for n in names]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.bar(names, shares, color="#2a6fb0")
    ax.set_ylabel("share")
    ax.set_title(f"division at beta = {result.beta:g}")
    _finish(fig, path)
