"""Figure rendering over validated artifact tables.

Each figure kind maps one artifact file to one image; render_all walks
the documented set, emitting a "no data" panel for absent inputs so the
figure set is always complete.  Captions embed the manifest hash of the
source file and are mirrored into a sidecar captions.json.
"""

import json
import os
from dataclasses import dataclass, field

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .schema import SchemaError, manifest_hash, read_report, read_table

STYLE = {
    "figure.figsize": (6.4, 4.0),
    "figure.dpi": 110,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "font.size": 9,
}

FIGURE_KINDS = (
    "norm-series", "a2-curve", "shape-error", "smoothing-budget",
    "persistence-fan", "commutator-ratios",
)

KIND_SOURCES = {
    "norm-series": "norm_series.csv",
    "a2-curve": "a2_scan.csv",
    "shape-error": "shape_error.csv",
    "smoothing-budget": "smoothing_budget.csv",
    "persistence-fan": "persistence_report.json",
    "commutator-ratios": "commutator_ratios.csv",
}


@dataclass
class FigureSpec:
    kind: str
    source: str                   # path to the input artifact
    out_path: str
    log_y: bool = False
    image_format: str = "png"
    caption_extra: str = ""


def _caption(spec, source_hash):
    base = os.path.basename(spec.source)
    text = "%s | source %s sha256:%s" % (spec.kind, base, source_hash[:16])
    if spec.caption_extra:
        text += " | " + spec.caption_extra
    return text


def _finish(fig, spec, caption):
    fig.tight_layout(rect=(0.0, 0.06, 1.0, 1.0))
    fig.text(0.01, 0.01, caption, fontsize=6, family="monospace")
    fig.savefig(spec.out_path, format=spec.image_format,
                metadata={"Software": "bolab-figures"})
    plt.close(fig)


def _no_data_figure(spec, reason):
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        ax.set_axis_off()
        ax.text(0.5, 0.5, "no data\n%s" % reason, ha="center",
                va="center", fontsize=14, color="0.4",
                transform=ax.transAxes)
        caption = "%s | no data: %s" % (spec.kind, reason)
        _finish(fig, spec, caption)
    return caption


def _plot_norm_series(ax, rows):
    pairs = sorted({(row["s"], row["r"]) for row in rows})
    for s, r in pairs:
        series = [(row["t"], row["combined"]) for row in rows
                  if (row["s"], row["r"]) == (s, r)]
        series.sort()
        ax.plot([p[0] for p in series], [p[1] for p in series],
                marker=".", label="s=%g r=%g" % (s, r))
    ax.set_xlabel("t")
    ax.set_ylabel("Z norm")
    ax.legend(loc="best")


def _plot_a2_curve(ax, rows):
    for kind in sorted({row["weight_kind"] for row in rows}):
        sub = [row for row in rows if row["weight_kind"] == kind]
        betas = sorted({row["beta"] for row in sub})
        finals, divergent = [], []
        for beta in betas:
            levels = [row for row in sub if row["beta"] == beta]
            levels.sort(key=lambda row: row["level"])
            top = levels[-1]
            finite = top["classification"] == "finite" \
                and np.isfinite(top["constant"])
            finals.append(top["constant"] if finite else np.nan)
            if not finite:
                divergent.append(beta)
        ax.plot(betas, finals, marker="o", label=kind)
        for beta in divergent:
            ax.axvline(beta, color="0.7", linestyle=":", linewidth=0.8)
    ax.axvline(-0.5, color="k", linestyle="--", linewidth=0.8)
    ax.axvline(0.5, color="k", linestyle="--", linewidth=0.8)
    ax.set_xlabel("beta")
    ax.set_ylabel("A2 constant")
    ax.legend(loc="best")


def _plot_shape_error(ax, rows):
    rows = sorted(rows, key=lambda row: row["n"])
    ax.loglog([row["n"] for row in rows],
              [row["shape_error"] for row in rows], marker="s")
    ax.set_xlabel("n")
    ax.set_ylabel("relative shape error")


def _plot_smoothing_budget(ax, rows):
    combos = sorted({(row["theta"], row["variant"]) for row in rows})
    for theta, variant in combos:
        sub = [row for row in rows
               if (row["theta"], row["variant"]) == (theta, variant)]
        sub.sort(key=lambda row: row["cap_scale"])
        ax.plot([row["cap_scale"] for row in sub],
                [row["value"] for row in sub], marker="o",
                label="theta=%g %s" % (theta, variant))
    ax.set_xscale("log", base=2)
    ax.set_xlabel("cap scale N")
    ax.set_ylabel("budget")
    ax.legend(loc="best")


def _plot_persistence_fan(ax, report):
    for entry in report["entries"]:
        norms = entry["norms_sq"]
        levels = list(range(len(norms)))
        ax.plot(levels, norms, marker="o",
                label="r=%g (%s)" % (entry["r"], entry["verdict"]))
    ax.set_yscale("log")
    ax.set_xlabel("ladder level")
    ax.set_ylabel("weighted norm squared")
    ax.set_title("family: %s" % report.get("family", "?"), fontsize=9)
    ax.legend(loc="best")


def _plot_commutator_ratios(ax, rows):
    rows = sorted(rows, key=lambda row: row["inequality"])
    names = [row["inequality"] for row in rows]
    ax.bar(names, [row["max_ratio"] for row in rows], label="max",
           color="C0", alpha=0.8)
    ax.bar(names, [row["mean_ratio"] for row in rows], label="mean",
           color="C1", alpha=0.8, width=0.5)
    ax.set_ylabel("ratio")
    ax.legend(loc="best")


def render(spec):
    """Render a single figure; returns the caption string."""
    if spec.kind not in FIGURE_KINDS:
        raise SchemaError("unknown figure kind %r" % spec.kind)
    if not os.path.exists(spec.source):
        return _no_data_figure(spec, "%s absent"
                               % os.path.basename(spec.source))
    if spec.kind == "persistence-fan":
        data = read_report(spec.source)
        empty = not data["entries"]
    else:
        data = read_table(spec.source)
        empty = not data
    if empty:
        return _no_data_figure(spec, "empty series")
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        if spec.kind == "norm-series":
            _plot_norm_series(ax, data)
        elif spec.kind == "a2-curve":
            _plot_a2_curve(ax, data)
        elif spec.kind == "shape-error":
            _plot_shape_error(ax, data)
        elif spec.kind == "smoothing-budget":
            _plot_smoothing_budget(ax, data)
        elif spec.kind == "persistence-fan":
            _plot_persistence_fan(ax, data)
        else:
            _plot_commutator_ratios(ax, data)
        if spec.log_y and spec.kind != "persistence-fan":
            ax.set_yscale("log")
        source_hash = manifest_hash(os.path.dirname(spec.source) or ".",
                                    os.path.basename(spec.source))
        caption = _caption(spec, source_hash)
        _finish(fig, spec, caption)
    return caption


def render_all(in_dir, out_dir, image_format="png"):
    """Render the documented figure set; absent inputs yield "no data"
    panels.  Writes captions.json alongside the images and returns the
    caption map."""
    os.makedirs(out_dir, exist_ok=True)
    captions = {}
    for kind in FIGURE_KINDS:
        source = os.path.join(in_dir, KIND_SOURCES[kind])
        out_name = kind.replace("-", "_") + "." + image_format
        spec = FigureSpec(kind, source, os.path.join(out_dir, out_name),
                          image_format=image_format)
        captions[out_name] = render(spec)
    sidecar = os.path.join(out_dir, "captions.json")
    with open(sidecar, "w") as fh:
        json.dump(captions, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return captions
