"""PNG figures for the CLI reports (Agg backend, fixed style)."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

STYLE = {
    "figure.figsize": (6.4, 3.6),
    "figure.dpi": 100,
    "font.size": 9,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "legend.frameon": False,
    "lines.linewidth": 1.6,
    "svg.hashsalt": "fiscast",
}
COLORS = {"actual": "0.15", "baseline": "#c0392b", "proposed": "#2471a3", "trend": "#2471a3", "cycle": "#7f8c8d"}
# Strip the Software/creation-time chunks so identical data give identical bytes.
_META = {"Software": None}


def _save(fig, path):
    path = Path(path)
    fig.savefig(path, metadata=_META)
    plt.close(fig)
    return path


def forecast_figure(rows, path, title=""):
    """Actual, baseline and proposed values from plot-data rows."""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        years = [r["year"] for r in rows]
        for key in ("actual", "baseline", "proposed"):
            pts = [(y, r[key]) for y, r in zip(years, rows) if r.get(key) is not None]
            if pts:
                xs, ys = zip(*pts)
                ax.plot(xs, ys, marker="o", ms=3, color=COLORS[key], label=key)
        ax.set_xticks(years)
        ax.set_xlabel("year")
        ax.set_title(title, loc="left")
        ax.legend()
        fig.tight_layout()
        return _save(fig, path)


def decomposition_figure(series, trend, cycle, path, title=""):
    with plt.rc_context(STYLE):
        fig, (top, bottom) = plt.subplots(2, 1, sharex=True, figsize=(6.4, 4.8))
        years = series.years
        top.plot(years, series.values, color=COLORS["actual"], label=series.name)
        top.plot(years, trend, color=COLORS["trend"], ls="--", label="trend")
        top.legend()
        bottom.bar(years, cycle, color=COLORS["cycle"], width=0.7)
        bottom.axhline(0.0, color="0.3", lw=0.8)
        bottom.set_ylabel("cycle")
        bottom.set_xlabel("year")
        top.set_title(title, loc="left")
        fig.tight_layout()
        return _save(fig, path)
