"""Matplotlib figures for run reports."""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def profile_figure(states, path):
    """``P, u, s, q`` against radius at the first, middle and last record."""
    picks = [states[0], states[len(states) // 2], states[-1]] if len(states) > 2 else states
    fig, axes = plt.subplots(2, 2, figsize=(9, 6), sharex=True)
    for ax, name in zip(axes.flat, ("P", "u", "s", "q")):
        for st in picks:
            ax.plot(st.r, getattr(st, name), label=f"t={st.t:g}")
        ax.set_ylabel(name)
    for ax in axes[1]:
        ax.set_xlabel("r")
    axes[0, 0].legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def energy_figure(report, path):
    """``E0(t)`` and ``D0(t)`` on a log scale."""
    fig, ax = plt.subplots(figsize=(6, 4))
    t = report.t
    for name in ("E0", "D0"):
        y = report.series(name)
        if (y > 0).any():
            ax.plot(t, y, label=name)
    ax.set_xlabel("t")
    if ax.lines:
        ax.set_yscale("log")
        ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
