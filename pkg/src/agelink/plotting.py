"""Figure rendering for sweep and minimization runs.

matplotlib is imported lazily and forced onto the Agg backend so the CLI
works on headless machines.  Divergent points are masked, not drawn as
infinities.
"""

from __future__ import annotations

import math

_AXIS_LABEL = {
    "rate": "rate R (bps/Hz)",
    "snr_db": "average SNR (dB)",
    "max_tx": "retransmission cap M",
    "n_antennas": "receive antennas N",
}

_LOG_SCALE_METRICS = {"eta", "eta_p", "avg_aoi", "avg_paoi"}


def _pyplot():
    import matplotlib

    matplotlib.use("Agg", force=False)
    import matplotlib.pyplot as plt

    return plt


def render_sweep_figure(rows, variable: str, outputs, path: str) -> None:
    """One panel per requested metric, divergent rows masked out."""
    plt = _pyplot()
    outputs = [o for o in outputs if o != "p"] or ["eta"]
    fig, axes = plt.subplots(
        len(outputs), 1, sharex=True,
        figsize=(6.5, 2.2 * len(outputs) + 0.8), squeeze=False,
    )
    xs = [r.value for r in rows]
    for ax, name in zip(axes[:, 0], outputs):
        ys = [getattr(r, name) for r in rows]
        shown = [(x, y) for x, y in zip(xs, ys) if math.isfinite(y)]
        if shown:
            ax.plot([x for x, _ in shown], [y for _, y in shown],
                    marker="o", markersize=3, linewidth=1.2)
            if name in _LOG_SCALE_METRICS and min(y for _, y in shown) > 0:
                ax.set_yscale("log")
        hidden = [x for x, y in zip(xs, ys) if not math.isfinite(y)]
        for x in hidden:
            ax.axvline(x, color="tab:red", alpha=0.15, linewidth=3)
        ax.set_ylabel(name)
        ax.grid(True, alpha=0.3)
    axes[-1, 0].set_xlabel(_AXIS_LABEL.get(variable, variable))
    fig.suptitle("parameter sweep" + (" (divergent region shaded)" if any(
        not math.isfinite(getattr(r, o)) for r in rows for o in outputs) else ""))
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_minimize_figure(xs, ys, argmin: float, min_value: float,
                           objective: str, variable: str, path: str) -> None:
    """Objective curve over the bracket with the located minimum marked."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6.5, 4.0))
    shown = [(x, y) for x, y in zip(xs, ys) if math.isfinite(y)]
    if shown:
        ax.plot([x for x, _ in shown], [y for _, y in shown], linewidth=1.2)
        if min(y for _, y in shown) > 0:
            ax.set_yscale("log")
    ax.axvline(argmin, color="tab:orange", linestyle="--", linewidth=1.0)
    ax.plot([argmin], [min_value], marker="*", markersize=12,
            color="tab:orange", zorder=5)
    ax.annotate(f"min {objective} = {min_value:.4g}\nat {argmin:.4g}",
                xy=(argmin, min_value), xytext=(10, 12),
                textcoords="offset points", fontsize=9)
    ax.set_xlabel(_AXIS_LABEL.get(variable, variable))
    ax.set_ylabel(objective)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
