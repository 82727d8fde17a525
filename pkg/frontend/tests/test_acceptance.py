"""End-to-end checks: the two figure products exist and probe correctly.

Verification is file existence plus the JSON sidecar, never pixels.
"""

import json
import subprocess
import sys


def run_plots(*args):
    cmd = [sys.executable, "-m", "mracplots.cli", *map(str, args)]
    return subprocess.run(cmd, capture_output=True, text=True)


def probe(out):
    with open(f"{out}.json", encoding="utf-8") as fh:
        return json.load(fh)


def test_four_panel_figure_with_dead_zone_line(traces, tmp_path):
    out = tmp_path / "run.png"
    res = run_plots("panels", traces["adaptive_default"], "--out", out)
    assert res.returncode == 0, res.stderr
    assert out.exists() and out.stat().st_size > 0
    meta = probe(out)
    assert meta["panels"] == 4
    assert meta["eps_line"] == 0.05


def test_overlay_of_three_baseline_runs(traces, tmp_path):
    out = tmp_path / "cg.png"
    res = run_plots(
        "overlay",
        traces["baseline_mu0"],
        traces["baseline_mu0.5"],
        traces["baseline_mu1"],
        "--out", out,
    )
    assert res.returncode == 0, res.stderr
    assert out.exists() and out.stat().st_size > 0
    meta = probe(out)
    assert meta["panels"] == 1
    assert meta["curves"] == ["mu=0", "mu=0.5", "mu=1"]
    assert meta["references"] == 1
