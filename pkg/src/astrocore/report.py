"""Artifact writers: delimited tables and SVG figures.

CSV cells are formatted with one fixed rule so equal results always
serialize to equal bytes. Figures render through the Agg backend with a
pinned hash salt and no embedded timestamp, so re-running an experiment
rewrites identical files.
"""

from __future__ import annotations

from pathlib import Path
from typing import Iterable, Sequence

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "astrocore"

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)
import numpy as np  # noqa: E402

from .astro import AstroTrace  # noqa: E402

__all__ = [
    "format_cell",
    "write_csv",
    "save_figure",
    "selfrepair_figure",
    "clusters_figure",
    "synthesize_figure",
    "faults_figure",
    "reliability_figure",
    "area_figure",
    "power_figure",
    "pwl_figure",
]


def format_cell(value) -> str:
    """One canonical text form per value so rewrites are byte-identical."""
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return "%.10g" % float(value)
    return str(value)


def write_csv(path: str | Path, header: Sequence[str],
              rows: Iterable[Sequence]) -> None:
    lines = [",".join(header)]
    lines.extend(",".join(format_cell(c) for c in row) for row in rows)
    Path(path).write_text("\n".join(lines) + "\n")


def save_figure(fig, path: str | Path) -> None:
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def _rebin(time_s: np.ndarray, values: np.ndarray,
           bin_s: float) -> tuple[np.ndarray, np.ndarray]:
    """Average fine windows into coarse bins for readable rate plots."""
    window = time_s[1] - time_s[0] if len(time_s) > 1 else bin_s
    per = max(1, int(round(bin_s / window)))
    n = (len(values) // per) * per
    t = time_s[per - 1:n:per]
    v = values[:n].reshape(-1, per).mean(axis=1)
    return t, v


def selfrepair_figure(repaired: AstroTrace, frozen: AstroTrace,
                      fault_time_s: float, bin_s: float = 5.0):
    fig, (ax_pr, ax_rate) = plt.subplots(2, 1, figsize=(7, 6), sharex=True)
    ax_pr.plot(repaired.time_s, repaired.pr, label="astrocyte feedback")
    ax_pr.plot(frozen.time_s, frozen.pr, label="frozen at pr0")
    ax_pr.axvline(fault_time_s, color="gray", linestyle=":", label="fault")
    ax_pr.set_ylabel("release probability")
    ax_pr.legend(loc="upper left", fontsize=8)

    for trace, label in ((repaired, "astrocyte feedback"),
                         (frozen, "frozen at pr0")):
        t, v = _rebin(trace.time_s, trace.out_rate_hz, bin_s)
        ax_rate.plot(t, v, marker="o", markersize=3, label=label)
    ax_rate.axvline(fault_time_s, color="gray", linestyle=":")
    ax_rate.set_xlabel("time (s)")
    ax_rate.set_ylabel(f"readout rate (Hz, {bin_s:g} s bins)")
    ax_rate.legend(loc="upper right", fontsize=8)
    fig.suptitle("Self-repair after losing half the input")
    fig.tight_layout()
    return fig


def clusters_figure(rows: Sequence[tuple]):
    """rows: (model, params, kind, clusters, expected, match)."""
    models = sorted({r[0] for r in rows})
    kinds = sorted({r[2] for r in rows})
    by = {(r[0], r[2]): r[3] for r in rows}
    x = np.arange(len(models))
    width = 0.8 / len(kinds)
    fig, ax = plt.subplots(figsize=(7, 4))
    for i, kind in enumerate(kinds):
        ax.bar(x + (i - (len(kinds) - 1) / 2) * width,
               [by[m, kind] for m in models], width, label=kind)
    ax.set_yscale("log")
    ax.set_xticks(x, models, rotation=30, ha="right")
    ax.set_ylabel("cores required")
    ax.legend()
    fig.suptitle("Cores per benchmark model")
    fig.tight_layout()
    return fig


def synthesize_figure(rows: Sequence[tuple]):
    """rows: (cluster, layer, iteration, a_min, astro_count)."""
    fig, ax = plt.subplots(figsize=(6, 4))
    bands = sorted({(r[0], r[1]) for r in rows})
    for cluster, layer in bands:
        pts = [(r[2], r[3]) for r in rows
               if r[0] == cluster and r[1] == layer]
        pts.sort()
        ax.plot([p[0] for p in pts], [p[1] for p in pts], marker="o",
                label=f"cluster {cluster}, source layer {layer}")
    ax.set_xlabel("astrocytes inserted")
    ax.set_ylabel("worst single-fault accuracy")
    ax.set_ylim(0, 1.05)
    ax.legend(fontsize=8)
    fig.suptitle("Greedy insertion progress")
    fig.tight_layout()
    return fig


def faults_figure(rows: Sequence[tuple]):
    """rows: (error_rate_pct, variant, seed, accuracy)."""
    variants = sorted({r[1] for r in rows})
    fig, ax = plt.subplots(figsize=(6, 4))
    for variant in variants:
        rates = sorted({r[0] for r in rows if r[1] == variant})
        means = [np.mean([r[3] for r in rows
                          if r[0] == rate and r[1] == variant])
                 for rate in rates]
        ax.plot(rates, means, marker="o", label=variant)
    ax.set_xlabel("parameter error rate (%)")
    ax.set_ylabel("mean accuracy")
    ax.set_ylim(0, 1.05)
    ax.legend()
    fig.suptitle("Accuracy under random parameter faults")
    fig.tight_layout()
    return fig


def reliability_figure(disturb: Sequence[tuple], heating: Sequence[tuple],
                       pmf: Sequence[tuple], mechanisms: Sequence[tuple]):
    """Point lists: (x, value) per panel; mechanisms: (name, mttf_hours)."""
    fig, axes = plt.subplots(2, 2, figsize=(8, 6))
    ax = axes[0, 0]
    ax.semilogy([p[0] for p in disturb], [p[1] for p in disturb], marker="o")
    ax.set_xlabel("read voltage (V)")
    ax.set_ylabel("disturb MTTF (h)")

    ax = axes[0, 1]
    ax.plot([p[0] for p in heating], [p[1] for p in heating], marker="o")
    ax.set_xlabel("stress time (s)")
    ax.set_ylabel("cell temperature (K)")

    ax = axes[1, 0]
    ax.bar([int(p[0]) for p in pmf], [p[1] for p in pmf])
    ax.set_xlabel("failures in interval")
    ax.set_ylabel("probability")

    ax = axes[1, 1]
    names = [m[0] for m in mechanisms]
    ax.bar(names, [m[1] for m in mechanisms])
    ax.set_yscale("log")
    ax.set_ylabel("MTTF (h)")
    ax.tick_params(axis="x", rotation=20)

    fig.suptitle("Memory fault mechanisms")
    fig.tight_layout()
    return fig


def _grouped_bars(ax, rows, value_index, kind):
    sub = [r for r in rows if r[2] == kind]
    models = list(dict.fromkeys(r[0] for r in sub))
    techniques = list(dict.fromkeys(r[1] for r in sub))
    x = np.arange(len(models))
    width = 0.8 / len(techniques)
    for i, tech in enumerate(techniques):
        vals = [next(r[value_index] for r in sub
                     if r[0] == m and r[1] == tech) for m in models]
        ax.bar(x + (i - (len(techniques) - 1) / 2) * width, vals, width,
               label=tech)
    ax.set_yscale("log")
    ax.set_xticks(x, models, rotation=30, ha="right")
    ax.set_title(kind)
    ax.legend(fontsize=8)


def area_figure(rows: Sequence[tuple]):
    """rows: (model, technique, core, clusters, area, normalized)."""
    fig, axes = plt.subplots(1, 2, figsize=(10, 4), sharey=True)
    for ax, kind in zip(axes, ("ubrain", "crossbar")):
        _grouped_bars(ax, rows, 5, kind)
    axes[0].set_ylabel("area (normalized)")
    fig.suptitle("Fault-tolerance area cost by technique")
    fig.tight_layout()
    return fig


def power_figure(rows: Sequence[tuple], savings: Sequence[tuple]):
    """rows: (model, technique, core, clusters, watts);
    savings: (astro_used, watts, savings_w, fraction)."""
    fig, (ax_p, ax_s) = plt.subplots(1, 2, figsize=(10, 4))
    _grouped_bars(ax_p, rows, 4, "ubrain")
    ax_p.set_ylabel("power (W)")

    ax_s.plot([s[0] for s in savings], [100.0 * s[3] for s in savings],
              marker="o")
    ax_s.set_xlabel("astrocytes in use on one core")
    ax_s.set_ylabel("power saved by disabling the rest (%)")
    fig.suptitle("Power by technique and astrocyte gating")
    fig.tight_layout()
    return fig


def pwl_figure(trace: Sequence[tuple], errors: Sequence[tuple]):
    """trace: (time_s, pr_float, pr_fixed, abs_dev); errors:
    (segments, table_max_error, pr_deviation)."""
    fig, (ax_t, ax_e) = plt.subplots(1, 2, figsize=(10, 4))
    t = [r[0] for r in trace]
    ax_t.plot(t, [r[1] for r in trace], label="float reference")
    ax_t.plot(t, [r[2] for r in trace], linestyle="--",
              label="42-bit fixed + PWL")
    ax_t.set_xlabel("time (s)")
    ax_t.set_ylabel("release probability")
    ax_t.legend(fontsize=8)

    segs = [r[0] for r in errors]
    ax_e.loglog(segs, [r[1] for r in errors], marker="o",
                label="decay-table error")
    ax_e.loglog(segs, [r[2] for r in errors], marker="s",
                label="trace pr deviation")
    ax_e.set_xlabel("PWL segments")
    ax_e.set_ylabel("max abs error")
    ax_e.legend(fontsize=8)
    fig.suptitle("Quantized datapath vs float reference")
    fig.tight_layout()
    return fig
