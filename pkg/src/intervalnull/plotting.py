"""Matplotlib figures: forest plot and Q-value curve.

SVG output is byte-stable for fixed input: the id salt is pinned and the
date metadata is dropped.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
from matplotlib.ticker import FixedFormatter, FixedLocator, NullLocator  # noqa: E402

from intervalnull.dist import std_normal_pdf  # noqa: E402
from intervalnull.inference import q_value  # noqa: E402

STYLE = {
    "svg.hashsalt": "intervalnull",
    "svg.fonttype": "none",
    "font.size": 9,
    "axes.spines.top": False,
    "axes.spines.right": False,
}
SVG_METADATA = {"Date": None}
OR_TICKS = (0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 1, 2, 5, 10, 20, 50, 100)


def _save(fig, path):
    fmt = str(path).rsplit(".", 1)[-1].lower()
    kwargs = {"metadata": SVG_METADATA} if fmt == "svg" else {}
    fig.savefig(path, format=fmt, **kwargs)
    plt.close(fig)


def forest_figure(rows, path, title="Forest plot"):
    """Boxes and whiskers per study, a diamond for the pooled row, log OR axis."""
    with plt.rc_context(STYLE):
        n = len(rows)
        fig, ax = plt.subplots(figsize=(6.5, 0.45 * n + 1.2))
        ys = list(range(n, 0, -1))
        for y, r in zip(ys, rows):
            if r.combined:
                xs = [r.lo, r.odds_ratio, r.hi, r.odds_ratio]
                ax.fill(xs, [y, y + 0.25, y, y - 0.25], color="0.15")
            else:
                ax.plot([r.lo, r.hi], [y, y], color="0.15", lw=1)
                ax.plot([r.odds_ratio], [y], marker="s", ms=6, color="0.15", ls="none")
        ax.axvline(1.0, color="0.5", lw=0.8, ls="--")
        ax.set_xscale("log")
        lo = min(r.lo for r in rows)
        hi = max(r.hi for r in rows)
        ax.set_xlim(lo / 1.3, hi * 1.3)
        ticks = [t for t in OR_TICKS if lo / 1.3 <= t <= hi * 1.3]
        ax.xaxis.set_major_locator(FixedLocator(ticks))
        ax.xaxis.set_major_formatter(FixedFormatter([f"{t:g}" for t in ticks]))
        ax.xaxis.set_minor_locator(NullLocator())
        ax.set_ylim(0.3, n + 0.7)
        ax.set_yticks(ys)
        ax.set_yticklabels(
            [f"{r.label}   {r.odds_ratio:.3f} ({r.lo:.3f}, {r.hi:.3f})" for r in rows]
        )
        ax.set_xlabel("odds ratio (log scale)")
        ax.set_title(title, loc="left")
        fig.tight_layout()
        _save(fig, path)


def qcurve_data(lik, interval, points: int = 201):
    """``(mu_grid, q_values, q_at_upper_limit)`` over ``estimate +/- 4 se``."""
    grid = np.linspace(lik.estimate - 4.0 * lik.se, lik.estimate + 4.0 * lik.se, points)
    values = np.array([q_value(lik, interval, float(m)) for m in grid])
    return grid, values, q_value(lik, interval, interval.upper())


def qcurve_figure(lik, interval, path, points: int = 201):
    """Two panels: the shaded tails making up the Q value, and Q as a function of mu*."""
    grid, values, marked = qcurve_data(lik, interval, points)
    mu = interval.upper()
    d = abs(lik.estimate - interval.theta0)
    t0, se = interval.theta0, lik.se

    with plt.rc_context(STYLE):
        fig, (left, right) = plt.subplots(1, 2, figsize=(9, 3.4))

        x = np.linspace(mu - 5 * se, mu + 5 * se, 801)
        dens = np.array([std_normal_pdf((v - mu) / se) / se for v in x])
        left.plot(x, dens, color="0.15", lw=1)
        for mask in (x <= t0 - d, x >= t0 + d):
            left.fill_between(x[mask], dens[mask], color="0.65")
        if interval.epsilon > 0:
            left.axvspan(interval.lower(), interval.upper(), color="0.9", zorder=0)
        left.axvline(t0 - d, color="0.4", lw=0.6, ls=":")
        left.axvline(t0 + d, color="0.4", lw=0.6, ls=":")
        left.set_xlabel("estimate under mu* = theta0 + eps")
        left.set_title(f"Q value = shaded area = {marked:.4f}", loc="left")
        left.set_yticks([])
        left.set_ylim(bottom=0)

        right.plot(grid, values, color="0.15", lw=1)
        right.plot([mu], [marked], marker="o", color="C3", ls="none")
        right.annotate(f"q({mu:g}) = {marked:.4f}", (mu, marked), textcoords="offset points", xytext=(6, 6))
        if interval.epsilon > 0:
            right.axvspan(interval.lower(), interval.upper(), color="0.9", zorder=0)
        right.set_xlabel("mu*")
        right.set_ylabel("q(mu*)")
        right.set_ylim(0, 1.02)
        fig.tight_layout()
        _save(fig, path)
    return marked

