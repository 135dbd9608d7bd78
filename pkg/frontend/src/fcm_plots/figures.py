"""Figure rendering: one renderer per harness table, deterministic bytes.

Renderers are pure functions of the parsed table: fixed style, fixed panel
layout, explicit legend placement, no timestamps (the SVG date field is
stripped and its id hash salted with a constant), so rendering the same CSV
twice produces byte-identical files.  Data is plotted in CSV row order,
never sorted or rescaled.
"""

import os
from dataclasses import dataclass

import numpy as np
from matplotlib import rc_context
from matplotlib.figure import Figure

from .csvio import CsvFormatError, load_table

__all__ = ["FIGURES", "FIGURE_EXPERIMENTS", "FigureSpec", "render"]

FIGURES = ("fig1", "fig2", "fig3", "fig4", "sir")

FIGURE_EXPERIMENTS = {
    "fig1": "eig-fit",
    "fig2": "mse-vs-nt",
    "fig3": "bound-tightness",
    "fig4": "histograms",
    "sir": "sir-scan",
}

_SCALES = ("", "log", "linear")

_RC = {
    "svg.hashsalt": "fcm-plots",
    "figure.autolayout": True,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "font.size": 9.0,
    "lines.linewidth": 1.2,
    "lines.markersize": 3.5,
}


@dataclass(frozen=True)
class FigureSpec:
    """What to render: source table, figure kind, target file, axis scales.

    Empty scale strings keep each figure's default (log y for the MSE
    figures, linear elsewhere).
    """

    figure: str
    csv_path: str
    out_path: str
    yscale: str = ""
    xscale: str = ""

    def __post_init__(self):
        if self.figure not in FIGURES:
            raise ValueError("figure must be one of %s" % (FIGURES,))
        if self.yscale not in _SCALES or self.xscale not in _SCALES:
            raise ValueError("axis scales must be 'log' or 'linear'")


def _render_eig_fit(table):
    fig = Figure(figsize=(6.4, 4.4))
    ax = fig.add_subplot()
    for n in np.unique(table["N"]).astype(int):
        sel = table["N"] == n
        ax.plot(table["fdts"][sel], table["lambda_numeric"][sel],
                marker="o", label="N=%d numeric" % n)
        ax.plot(table["fdts"][sel], table["lambda_fit"][sel],
                ls="--", label="N=%d fit" % n)
    ax.set_xlabel("$f_d T_s$")
    ax.set_ylabel("largest TCM eigenvalue")
    ax.legend(loc="lower left", fontsize=7)
    return fig


def _render_mse_vs_nt(table):
    fig = Figure(figsize=(6.4, 4.4))
    ax = fig.add_subplot()
    modes = sorted(set(table["mode"]))
    label = "empirical (%s)" % modes[0] if len(modes) == 1 else "empirical"
    ax.plot(table["N_t"], table["avgmse_empirical"], marker="o", label=label)
    ax.plot(table["N_t"], table["avgmse_lb"], ls="--", marker="s",
            label="lower bound")
    ax.set_yscale("log")
    ax.set_xlabel("$N_t$")
    ax.set_ylabel("average MSE")
    ax.legend(loc="upper right")
    return fig


def _render_bound_tightness(table):
    fig = Figure(figsize=(6.4, 4.4))
    ax = fig.add_subplot()
    ax.plot(table["N_t"], table["avgmse_mean_over_pilots"], marker="o",
            label="mean MSE over pilots")
    ax.plot(table["N_t"], table["lb_pilot_free"], ls="--", marker="s",
            label="pilot-free bound")
    ax.plot(table["N_t"], table["lb_insightful"], ls=":", marker="^",
            label="closed-form bound")
    ax.set_yscale("log")
    ax.set_xlabel("$N_t$")
    ax.set_ylabel("average MSE")
    ax.legend(loc="upper right")
    return fig


def _render_histograms(table):
    gammas = np.unique(table["gamma_db"])
    fds = np.unique(table["f_d_hz"])
    fig = Figure(figsize=(2.9 * len(fds), 2.3 * len(gammas)))
    axs = fig.subplots(len(gammas), len(fds), squeeze=False)
    for i, g in enumerate(gammas):
        for j, f in enumerate(fds):
            ax = axs[i][j]
            sel = (table["gamma_db"] == g) & (table["f_d_hz"] == f)
            if sel.any():
                ax.hist(table["avgmse"][sel], bins=40, color="C0")
            ax.set_title("gamma=%g dB, f_d=%g Hz" % (g, f), fontsize=8)
            ax.tick_params(labelsize=7)
    for j in range(len(fds)):
        axs[-1][j].set_xlabel("average MSE", fontsize=8)
    for i in range(len(gammas)):
        axs[i][0].set_ylabel("count", fontsize=8)
    return fig


def _render_sir(table):
    fig = Figure(figsize=(6.4, 4.4))
    ax = fig.add_subplot()
    ax.plot(table["fdts"], table["sir_db"], marker="o")
    ax.set_xlabel("$f_d T_s$")
    ax.set_ylabel("SIR (dB)")
    return fig


_RENDERERS = {
    "fig1": _render_eig_fit,
    "fig2": _render_mse_vs_nt,
    "fig3": _render_bound_tightness,
    "fig4": _render_histograms,
    "sir": _render_sir,
}


def _save(fig, out_path):
    ext = os.path.splitext(out_path)[1].lower()
    if ext == ".png":
        fig.savefig(out_path, format="png", dpi=150)
    elif ext == ".svg":
        fig.savefig(out_path, format="svg", metadata={"Date": None})
    else:
        raise ValueError("output must end in .png or .svg, got %r" % out_path)


def render(spec):
    """Render one FigureSpec to its output file; returns the Figure."""
    table = load_table(spec.csv_path, FIGURE_EXPERIMENTS[spec.figure])
    with rc_context(_RC):
        fig = _RENDERERS[spec.figure](table)
        for ax in fig.get_axes():
            if spec.yscale:
                ax.set_yscale(spec.yscale)
            if spec.xscale:
                ax.set_xscale(spec.xscale)
        _save(fig, spec.out_path)
    return fig
