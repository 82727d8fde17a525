"""Overlay and four-panel figure rendering.

Every figure call writes the image plus a machine-readable JSON sidecar
at <out>.json describing what was drawn (panel count, curve labels, dead
zone line, verdict), so downstream checks never have to parse pixels.
"""

from __future__ import annotations

import json
import warnings

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def _write_sidecar(out, payload):
    with open(f"{out}.json", "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def _distinct_references(traces):
    groups = []
    for frame in traces:
        r = frame.column("r")
        t = frame.column("t")
        for gt, gr, _ in groups:
            if gr.shape == r.shape and np.array_equal(gr, r) and np.array_equal(gt, t):
                break
        else:
            groups.append((t, r, frame.label()))
    return groups


def plot_overlay(traces, out):
    """One axes, alpha vs t per trace labeled by mu, reference dashed."""
    if not traces:
        raise ValueError("overlay needs at least one trace")
    refs = _distinct_references(traces)
    if len(refs) > 1:
        warnings.warn(
            "reference signals differ between traces; drawing each of them",
            stacklevel=2,
        )
    fig, ax = plt.subplots(figsize=(8.0, 4.5))
    labels = []
    for frame in traces:
        label = frame.label()
        ax.plot(frame.column("t"), frame.column("alpha"), label=label)
        labels.append(label)
    for i, (t, r, src) in enumerate(refs):
        name = "reference" if len(refs) == 1 else f"reference ({src})"
        ax.plot(t, r, "k--", linewidth=1.0, label=name, alpha=0.7 if i else 1.0)
    ax.set_xlabel("t [s]")
    ax.set_ylabel("alpha [rad]")
    ax.set_title("Closed-loop step response by c.g. position")
    ax.legend(loc="best")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(out)
    plt.close(fig)
    payload = {
        "figure": "overlay",
        "panels": 1,
        "curves": labels,
        "references": len(refs),
        "out": str(out),
    }
    _write_sidecar(out, payload)
    return payload


_PANEL_CURVES = (
    ("response", ("alpha", "alpha_m")),
    ("gains", ("Kz1", "Kz2", "Kr")),
    ("controls", ("u_bl", "u_ad", "u")),
    ("error", ("e_norm",)),
)


def plot_four_panel(trace, out):
    """Stacked panels: response, adaptive gains, control split, error norm.

    The error panel carries a horizontal dead-zone line when the trace
    header provides the width.  Non-finite tail samples (foreign files;
    the simulator itself never records them) are cut off, and a verdict
    other than Completed goes into the title.
    """
    used = ["t"] + [c for _, cols in _PANEL_CURVES for c in cols]
    block = np.column_stack([trace.column(c) for c in used])
    finite = np.all(np.isfinite(block), axis=1)
    n = int(np.argmax(~finite)) if not finite.all() else block.shape[0]
    if n == 0:
        raise ValueError("no finite samples to plot")
    t = trace.column("t")[:n]

    fig, axes = plt.subplots(4, 1, sharex=True, figsize=(8.0, 9.0))
    for ax, (panel, cols) in zip(axes, _PANEL_CURVES):
        for name in cols:
            style = "--" if name == "alpha_m" else "-"
            ax.plot(t, trace.column(name)[:n], style, label=name)
        ax.set_ylabel(panel)
        ax.grid(True, alpha=0.3)
    eps = trace.eps
    if eps is not None:
        axes[3].axhline(eps, color="r", linestyle="--", linewidth=1.0,
                        label="dead zone")
    for ax in axes:
        ax.legend(loc="upper right", fontsize=8)
    axes[-1].set_xlabel("t [s]")
    title = f"Adaptive augmentation run, {trace.label()}"
    if trace.verdict != "Completed":
        title += f" [{trace.verdict}]"
    fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(out)
    plt.close(fig)
    payload = {
        "figure": "four_panel",
        "panels": 4,
        "curves": {panel: list(cols) for panel, cols in _PANEL_CURVES},
        "eps_line": eps,
        "verdict": trace.verdict,
        "samples": n,
        "out": str(out),
    }
    _write_sidecar(out, payload)
    return payload
