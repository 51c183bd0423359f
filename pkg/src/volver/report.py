"""Run-report figures rendered next to the delimited outputs."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt


def render_figures(report, decisions, threshold, out_dir) -> list:
    """Write template-win and similarity-decision figures under
    ``out_dir/figures``; returns the paths written."""
    figures_dir = Path(out_dir) / "figures"
    figures_dir.mkdir(parents=True, exist_ok=True)
    written = []

    fig, ax = plt.subplots(figsize=(6, 3.2))
    wins = dict(sorted(report.template_wins.items()))
    ax.bar(list(wins), list(wins.values()), color="#4878a8")
    ax.set_ylabel("volumes won")
    ax.set_title("Template cascade wins")
    if report.failures:
        ax.bar(["(failed)"], [len(report.failures)], color="#b04a4a")
    fig.tight_layout()
    path = figures_dir / "template_wins.png"
    fig.savefig(path, dpi=120)
    plt.close(fig)
    written.append(path)

    fig, ax = plt.subplots(figsize=(6, 3.2))
    if decisions:
        names = [float(d.name_score) for d in decisions]
        acronyms = [float(d.acronym_score) for d in decisions]
        colors = ["#3a8c3f" if d.accepted else "#b04a4a" for d in decisions]
        ax.scatter(names, acronyms, c=colors, s=36)
        ax.axvline(float(threshold), ls="--", lw=0.8, color="gray")
        ax.axhline(float(threshold), ls="--", lw=0.8, color="gray")
    ax.set_xlim(-0.05, 1.05)
    ax.set_ylim(-0.05, 1.05)
    ax.set_xlabel("name similarity")
    ax.set_ylabel("acronym similarity")
    ax.set_title("Workshop relation decisions")
    fig.tight_layout()
    path = figures_dir / "relation_decisions.png"
    fig.savefig(path, dpi=120)
    plt.close(fig)
    written.append(path)
    return written
