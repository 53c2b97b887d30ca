"""Figure renderers for amdiqkd scan results.

Four desk-scale figure kinds:

- fig2: rate vs distance, with/without advantage distillation, PLOB
  overlay, optimal-b scatter on a twin axis.
- fig3: rate vs distance, one curve pair per pulse count N.
- fig4: rate vs distance, one curve pair per misalignment setting,
  plus the optimal-b scatter.
- fig5: heat map of the AD rate over the (e_d_z, E_hom) error grid,
  with marker shapes encoding the optimal block size.

Output is deterministic: fixed style, no timestamps, image metadata
stripped, so re-rendering the same CSV reproduces the file byte for
byte.
"""
from __future__ import annotations

import math
import warnings

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
from matplotlib.lines import Line2D

from .csvdata import DataError, FigureSpec, group_by, load_rows, positive_pairs

# block size -> marker: hollow circle for b=1, triangle for b=2,
# five-pointed star for b=3, solid circle for b=4
B_MARKERS = {1: ("o", "none"), 2: ("^", "full"), 3: ("*", "full"), 4: ("o", "full")}

_STYLE = {
    "figure.figsize": (6.4, 4.2),
    "figure.dpi": 120,
    "savefig.dpi": 120,
    "font.size": 9,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "svg.hashsalt": "amdiqkd-figures",
}


def _strip_metadata(path: str) -> dict:
    if path.endswith(".svg"):
        return {"Date": None, "Creator": None}
    if path.endswith(".png"):
        return {"Software": None}
    return {}


def _save(fig, spec: FigureSpec) -> None:
    fig.savefig(spec.output_path, metadata=_strip_metadata(spec.output_path))
    plt.close(fig)


def _rate_axes(ax, spec: FigureSpec) -> None:
    ax.set_xlabel("distance (km)")
    ax.set_ylabel("secret key rate (bit/pulse)")
    if spec.log_y:
        ax.set_yscale("log")
    if spec.title:
        ax.set_title(spec.title)


def _plot_pair(ax, rows, label_suffix="", color_ad="tab:blue", color_no="tab:red"):
    """One with-AD / without-AD curve pair; returns True if AD drew."""
    x_ad, y_ad = positive_pairs(rows, "L_km", "rate_ad")
    x_no, y_no = positive_pairs(rows, "L_km", "rate_no_ad")
    drew_ad = bool(x_ad)
    if drew_ad:
        ax.plot(x_ad, y_ad, "-", color=color_ad, label=f"with AD{label_suffix}")
    else:
        warnings.warn(f"no positive AD rates{label_suffix or ''}; AD curve omitted")
    if x_no:
        ax.plot(x_no, y_no, ":", color=color_no, label=f"without AD{label_suffix}")
    return drew_ad


def _plot_plob(ax, rows) -> None:
    x, y = positive_pairs(rows, "L_km", "plob")
    if x:
        ax.plot(x, y, "--", color="black", label="PLOB bound")


def _plot_b_scatter(ax, rows) -> None:
    twin = ax.twinx()
    xs = [r["L_km"] for r in rows if r["rate_ad"] > 0.0]
    bs = [r["b_opt"] for r in rows if r["rate_ad"] > 0.0]
    twin.scatter(xs, bs, s=12, color="tab:pink", label="optimal b")
    twin.set_ylabel("optimal block size b")
    twin.set_ylim(0.5, 4.5)
    twin.set_yticks([1, 2, 3, 4])


def render_fig2(spec: FigureSpec) -> None:
    rows = load_rows(spec.csv_paths[0])
    fig, ax = plt.subplots()
    _plot_pair(ax, rows)
    if spec.show_plob:
        _plot_plob(ax, rows)
    if spec.show_b:
        _plot_b_scatter(ax, rows)
    _rate_axes(ax, spec)
    ax.legend(loc="upper right")
    _save(fig, spec)


def render_fig3(spec: FigureSpec) -> None:
    rows = [r for p in spec.csv_paths for r in load_rows(p)]
    fig, ax = plt.subplots()
    cycle = ("tab:blue", "tab:orange", "tab:green", "tab:purple")
    for i, (n_val, sub) in enumerate(group_by(rows, "N")):
        color = cycle[i % len(cycle)]
        _plot_pair(ax, sub, label_suffix=f" (N=1e{math.log10(n_val):.0f})",
                   color_ad=color, color_no=color)
    _rate_axes(ax, spec)
    ax.legend(loc="upper right", fontsize=7)
    _save(fig, spec)


def render_fig4(spec: FigureSpec) -> None:
    rows = [r for p in spec.csv_paths for r in load_rows(p)]
    fig, ax = plt.subplots()
    cycle = ("tab:blue", "tab:orange", "tab:green", "tab:purple")
    for i, (err, sub) in enumerate(group_by(rows, "e_d_z")):
        color = cycle[i % len(cycle)]
        _plot_pair(ax, sub, label_suffix=f" ({100 * err:g}% errors)",
                   color_ad=color, color_no=color)
    if spec.show_b:
        _plot_b_scatter(ax, rows)
    _rate_axes(ax, spec)
    ax.legend(loc="upper right", fontsize=7)
    _save(fig, spec)


def render_fig5(spec: FigureSpec) -> None:
    rows = load_rows(spec.csv_paths[0])
    e_vals = sorted({r["e_d_z"] for r in rows})
    h_vals = sorted({r["E_hom"] for r in rows})
    grid = [[float("nan")] * len(e_vals) for _ in h_vals]
    for r in rows:
        i = h_vals.index(r["E_hom"])
        j = e_vals.index(r["e_d_z"])
        grid[i][j] = math.log10(r["rate_ad"]) if r["rate_ad"] > 0.0 else float("nan")

    fig, ax = plt.subplots()
    mesh = ax.pcolormesh(
        [100 * v for v in e_vals], [100 * v for v in h_vals], grid,
        shading="nearest", cmap="viridis",
    )
    fig.colorbar(mesh, ax=ax, label="log10 AD rate (bit/pulse)")
    if spec.show_b:
        for r in rows:
            if r["rate_ad"] <= 0.0:
                continue
            marker, fill = B_MARKERS.get(int(r["b_opt"]), ("x", "full"))
            face = "none" if fill == "none" else "white"
            ax.plot(
                100 * r["e_d_z"], 100 * r["E_hom"], marker,
                markersize=5, markerfacecolor=face, markeredgecolor="white",
            )
        handles = [
            Line2D([], [], linestyle="", marker=m, markerfacecolor="none" if f == "none" else "gray",
                   markeredgecolor="gray", label=f"b={b}")
            for b, (m, f) in B_MARKERS.items()
        ]
        ax.legend(handles=handles, loc="upper right", fontsize=7)
    ax.set_xlabel("Z misalignment e_d_z (%)")
    ax.set_ylabel("X interference error E_hom (%)")
    if spec.title:
        ax.set_title(spec.title)
    _save(fig, spec)


_RENDERERS = {
    "fig2": render_fig2,
    "fig3": render_fig3,
    "fig4": render_fig4,
    "fig5": render_fig5,
}


def render(spec: FigureSpec) -> None:
    """Render one figure spec to its output image, deterministically."""
    with plt.rc_context(_STYLE):
        _RENDERERS[spec.kind](spec)
