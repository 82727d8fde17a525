"""Shared fixtures plus a per-criterion acceptance summary.

Tests marked @pytest.mark.acceptance("<slug>") get one PASS/FAIL line
each in the terminal summary, so the acceptance verdict is readable
without digging through the pytest report.
"""

import numpy as np
import pytest

from mraclab.baseline import design_baseline
from mraclab.mrac import build_mrac, build_transform
from mraclab.plant import plant_matrices
from mraclab.sim import Scenario, run_scenario

_SLUGS = {}


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "acceptance(slug): one named acceptance criterion"
    )


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("acceptance")
        if mark is not None:
            _SLUGS[item.nodeid] = mark.args[0]


def pytest_terminal_summary(terminalreporter):
    if not _SLUGS:
        return
    passed = {
        rep.nodeid
        for rep in terminalreporter.stats.get("passed", [])
        if getattr(rep, "when", None) == "call"
    }
    failed = set()
    for key in ("failed", "error"):
        for rep in terminalreporter.stats.get(key, []):
            failed.add(getattr(rep, "nodeid", None))
    terminalreporter.write_sep("-", "acceptance criteria")
    for nodeid, slug in _SLUGS.items():
        ok = nodeid in passed and nodeid not in failed
        terminalreporter.write_line(f"[ACCEPTANCE] {slug}: {'PASS' if ok else 'FAIL'}")


@pytest.fixture(scope="session")
def canonical_designs():
    """Default baseline and adaptive designs used across acceptance runs."""
    fwd = plant_matrices(0.0)
    bd = design_baseline(fwd.A, fwd.B, np.diag([1.0, 0.01]), 1.0)
    tz = build_transform((bd.A_d[0, 0], bd.A_d[0, 1]))
    md = build_mrac(bd, tz)
    return bd, tz, md


@pytest.fixture(scope="session")
def default_traces(canonical_designs):
    """The three default 30 s runs shared by the response criteria."""
    bd, _tz, md = canonical_designs
    return {
        "mu0": run_scenario(Scenario(mu=0.0), bd, md),
        "mu1_adaptive": run_scenario(Scenario(mu=1.0), bd, md),
        "mu1_baseline": run_scenario(Scenario(mu=1.0, mrac_enabled=False), bd, md),
    }
