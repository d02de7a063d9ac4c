"""Matplotlib rendering for figure data.

Every renderer takes the rows already written to CSV, so a PNG never shows
anything the CSV next to it does not contain.
"""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

RC = {
    "font.size": 10,
    "axes.labelsize": 10,
    "axes.titlesize": 10,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "figure.dpi": 100,
    "savefig.dpi": 150,
    "savefig.bbox": "tight",
}

PLAYER_COLORS = {"A": "tab:red", "B": "tab:blue"}


def new(ncols=1, width=4.5, height=3.2):
    with plt.rc_context(RC):
        fig, axes = plt.subplots(1, ncols, figsize=(width * ncols, height), squeeze=False)
    return fig, axes[0]


def save(fig, path):
    with plt.rc_context(RC):
        fig.savefig(path)
    plt.close(fig)
    return path


def equilibrium_shares(path, v, share):
    fig, (ax,) = new()
    ax.bar(v, share, width=0.8 / len(v), color="0.4")
    ax.set_xlabel("valuation")
    ax.set_ylabel("share of resources")
    return save(fig, path)


def initial_histogram(path, rows):
    fig, (ax,) = new()
    for pl in ("A", "B"):
        sel = [r for r in rows if r[0] == pl]
        if not sel:
            continue
        left = np.array([r[1] for r in sel])
        right = np.array([r[2] for r in sel])
        counts = np.array([r[3] for r in sel])
        ax.bar(left, counts, width=(right - left) * 0.45, align="edge",
               alpha=0.7, label=pl, color=PLAYER_COLORS[pl])
    ax.set_xlabel("allocation")
    ax.set_ylabel("battlefield-strategies")
    ax.legend(frameon=False)
    return save(fig, path)


def strategies_by_snapshot(path, rows, iterations):
    fig, axes = new(ncols=len(iterations))
    for ax, it in zip(axes, iterations):
        for pl in ("A", "B"):
            sel = sorted((r[3], r[4]) for r in rows if r[0] == it and r[1] == pl)
            if sel:
                v, x = zip(*sel)
                ax.plot(v, x, "o-", ms=3, color=PLAYER_COLORS[pl], label=pl)
        ax.set_title(f"t = {it}")
        ax.set_xlabel("own valuation")
    axes[0].set_ylabel("average best allocation")
    axes[0].legend(frameon=False)
    return save(fig, path)


def versus_series(path, rows, ylabel="score difference vs equilibrium"):
    fig, (ax,) = new(width=6)
    for pl in ("A", "B"):
        sel = [(r[0], r[2]) for r in rows if r[1] == pl]
        if sel:
            t, d = zip(*sel)
            ax.plot(t, d, lw=1, color=PLAYER_COLORS[pl], label=pl)
    ax.axhline(0, color="0.5", lw=0.6)
    ax.set_xlabel("iteration")
    ax.set_ylabel(ylabel)
    ax.legend(frameon=False)
    return save(fig, path)


def strategy_with_fit(path, rows, xlabel, fitted=True):
    fig, (ax,) = new()
    for pl in ("A", "B"):
        sel = sorted((r[1], r[2], r[3]) for r in rows if r[0] == pl)
        if not sel:
            continue
        x, y, f = (np.array(c, dtype=float) for c in zip(*sel))
        ax.plot(x, y, "o", ms=4, color=PLAYER_COLORS[pl], label=pl)
        if fitted and np.isfinite(f).any():
            ax.plot(x, f, "-", lw=1, color=PLAYER_COLORS[pl])
    ax.set_xlabel(xlabel)
    ax.set_ylabel("average best allocation")
    ax.legend(frameon=False)
    return save(fig, path)


def strategies_by_index(path, rows, r_value):
    fig, (ax,) = new()
    h = [r[0] for r in rows]
    ax.plot(h, [r[3] for r in rows], "o-", ms=3, color=PLAYER_COLORS["A"], label="A")
    ax.plot(h, [r[4] for r in rows], "o-", ms=3, color=PLAYER_COLORS["B"], label="B")
    ax.set_xlabel("battlefield")
    ax.set_ylabel("average best allocation")
    title = f"Pearson r = {r_value:.3f}" if r_value is not None else "Pearson r undefined"
    ax.set_title(title)
    ax.legend(frameon=False)
    return save(fig, path)
