"""Fixture traces generated through the simulator's public CLI.

This package only ever sees trace CSV files, so the fixtures produce
them exactly the way a user would.
"""

import subprocess
import sys

import pytest


def make_trace(path, *sets):
    cmd = [sys.executable, "-m", "mraclab.cli"]
    for item in sets:
        cmd += ["--set", item]
    cmd += ["simulate", "--out", str(path)]
    res = subprocess.run(cmd, capture_output=True, text=True)
    assert res.returncode in (0, 3), res.stderr
    return path


SHORT = ("scenario.t_end=4", "scenario.steps=0.5:0.1", "scenario.stride=20")


@pytest.fixture(scope="session")
def traces(tmp_path_factory):
    d = tmp_path_factory.mktemp("traces")
    out = {}
    for mu in ("0", "0.5", "1"):
        out[f"baseline_mu{mu}"] = make_trace(
            d / f"baseline_mu{mu}.csv",
            f"plant.mu={mu}", "mrac.enabled=false", *SHORT,
        )
    out["adaptive_default"] = make_trace(d / "adaptive_default.csv")
    out["diverged"] = make_trace(
        d / "diverged.csv",
        "mrac.gamma_z=1000000", "scenario.steps=1:0.5", "scenario.t_end=8",
    )
    out["other_reference"] = make_trace(
        d / "other_reference.csv",
        "plant.mu=0", "mrac.enabled=false",
        "scenario.t_end=4", "scenario.steps=0.5:0.15", "scenario.stride=20",
    )
    return out
