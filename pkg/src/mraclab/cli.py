"""Command-line surface: design inspection, scenario runs, parameter sweeps.

Configuration is a flat key = value namespace merged from built-in
defaults, an optional config file, and repeated --set overrides.  Trace
CSVs carry the full config echo plus the derived design quantities in
#-prefixed header lines, so any printed design value can be re-derived
from a trace file alone.  All numbers are written with 9 significant
digits.

Exit codes: 0 ok, 2 config or design error, 3 divergence.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from itertools import product

import numpy as np

from .baseline import design_baseline
from .mrac import build_mrac, build_transform, ideal_gains
from .numerics import MraclabError, eig2
from .plant import A_FWD, B_FWD, plant_matrices
from .sim import Scenario, compute_metrics, run_scenario

MAX_SWEEP_COMBOS = 100_000

# Key order here is the echo order in trace headers and reports.
DEFAULTS = {
    "plant.mu": 1.0,
    "baseline.qw_alpha": 1.0,
    "baseline.qw_q": 0.01,
    "baseline.rw": 1.0,
    "baseline.ki": "auto",
    "mrac.enabled": True,
    "mrac.gamma_z": 50.0,
    "mrac.gamma_r": 50.0,
    "mrac.eps": 0.05,
    "mrac.kz_bound": 10.0,
    "mrac.kr_bound": 10.0,
    "scenario.dt": 0.001,
    "scenario.t_end": 30.0,
    "scenario.steps": "1:0.1; 6:0; 11:0.15; 16:0; 21:0.1",
    "scenario.noise_std": 0.0,
    "scenario.seed": 0,
    "scenario.stride": 10,
}

_KEY_KINDS = {
    "plant.mu": "float",
    "baseline.qw_alpha": "float",
    "baseline.qw_q": "float",
    "baseline.rw": "float",
    "baseline.ki": "ki",
    "mrac.enabled": "bool",
    "mrac.gamma_z": "float",
    "mrac.gamma_r": "float",
    "mrac.eps": "float",
    "mrac.kz_bound": "float",
    "mrac.kr_bound": "float",
    "scenario.dt": "float",
    "scenario.t_end": "float",
    "scenario.steps": "str",
    "scenario.noise_std": "float",
    "scenario.seed": "int",
    "scenario.stride": "int",
}

_TRUE_WORDS = {"true", "1", "on", "yes"}
_FALSE_WORDS = {"false", "0", "off", "no"}


class ConfigError(MraclabError):
    """Unknown key, unparseable value, or malformed grid."""


def fmt9(value):
    """Render a config or output value; floats get 9 significant digits."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.9g}"
    return str(value)


def _coerce(key, raw):
    if key not in _KEY_KINDS:
        raise ConfigError(f"unknown config key '{key}'")
    if not isinstance(raw, str):
        return raw
    kind = _KEY_KINDS[key]
    raw = raw.strip()
    try:
        if kind == "float":
            return float(raw)
        if kind == "int":
            return int(raw)
        if kind == "bool":
            low = raw.lower()
            if low in _TRUE_WORDS:
                return True
            if low in _FALSE_WORDS:
                return False
            raise ValueError(raw)
        if kind == "ki":
            return "auto" if raw.lower() == "auto" else float(raw)
        return raw
    except ValueError as exc:
        raise ConfigError(f"bad value for {key}: {raw!r}") from exc


def parse_steps(text):
    """'1:0.1; 6:0' -> ((1.0, 0.1), (6.0, 0.0)); empty string -> ()."""
    text = text.strip()
    if not text:
        return ()
    steps = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        try:
            ts, amp = chunk.split(":")
            steps.append((float(ts), float(amp)))
        except ValueError as exc:
            raise ConfigError(f"bad step entry {chunk!r}") from exc
    return tuple(steps)


def load_config(path=None, overrides=()):
    """Merge defaults, an optional config file, and --set overrides."""
    cfg = dict(DEFAULTS)
    if path is not None:
        try:
            with open(path, encoding="utf-8") as fh:
                lines = fh.readlines()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        for lineno, line in enumerate(lines, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key = value")
            key, _, raw = line.partition("=")
            cfg[key.strip()] = _coerce(key.strip(), raw)
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"--set needs key=value, got {item!r}")
        key, _, raw = item.partition("=")
        cfg[key.strip()] = _coerce(key.strip(), raw)
    return cfg


def make_designs(cfg):
    """Baseline and MRAC designs from a config mapping."""
    Qw = np.diag([cfg["baseline.qw_alpha"], cfg["baseline.qw_q"]])
    ki = None if cfg["baseline.ki"] == "auto" else float(cfg["baseline.ki"])
    bd = design_baseline(A_FWD, B_FWD, Qw, cfg["baseline.rw"], ki=ki)
    tz = build_transform((bd.A_d[0, 0], bd.A_d[0, 1]))
    md = build_mrac(
        bd,
        tz,
        gamma_z=cfg["mrac.gamma_z"],
        gamma_r=cfg["mrac.gamma_r"],
        eps=cfg["mrac.eps"],
        kz_bound=cfg["mrac.kz_bound"],
        kr_bound=cfg["mrac.kr_bound"],
    )
    return bd, md


def make_scenario(cfg):
    return Scenario(
        mu=cfg["plant.mu"],
        dt=cfg["scenario.dt"],
        t_end=cfg["scenario.t_end"],
        ref_steps=parse_steps(cfg["scenario.steps"]),
        noise_std=cfg["scenario.noise_std"],
        seed=cfg["scenario.seed"],
        mrac_enabled=cfg["mrac.enabled"],
        sample_stride=cfg["scenario.stride"],
    )


def _fmt_matrix(M):
    rows = ["[" + ", ".join(fmt9(float(v)) for v in row) + "]" for row in np.atleast_2d(M)]
    return "[" + ", ".join(rows) + "]"


def _fmt_complex(c):
    return f"{c.real:.9g}{c.imag:+.9g}j"


def _report(lines):
    width = max(len(k) for k, _ in lines) + 2
    return "\n".join(f"{k:<{width}}{v}" for k, v in lines)


def cmd_design(cfg):
    bd, md = make_designs(cfg)
    tz = build_transform((bd.A_d[0, 0], bd.A_d[0, 1]))
    A_cl = bd.closed_loop()
    dc = (bd.C @ np.linalg.solve(-A_cl, bd.B0)).item() * bd.F
    mu = cfg["plant.mu"]
    pm = plant_matrices(mu)
    kz_star, kr_star, lam = ideal_gains(
        md,
        (tz.T @ pm.A @ tz.T_inv, tz.T @ pm.B[:, 0]),
        (bd.K @ tz.T_inv, bd.F),
    )
    ev = eig2(A_cl)
    lines = [
        ("K", " ".join(fmt9(float(v)) for v in bd.K[0])),
        ("F", fmt9(bd.F)),
        ("ki", fmt9(bd.ki)),
        ("dc_gain_check", f"{dc:.9f}"),
        ("eig_closed_loop", " ".join(_fmt_complex(c) for c in ev)),
        ("T", _fmt_matrix(tz.T)),
        ("A_m_z", _fmt_matrix(md.A_m_z)),
        ("B_m_z", _fmt_matrix(md.B_m_z)),
        ("B0_z", _fmt_matrix(md.B0_z)),
        ("P", _fmt_matrix(md.P)),
        ("mu", fmt9(mu)),
        ("lambda", fmt9(lam)),
        ("Kz_star", " ".join(fmt9(float(v)) for v in np.asarray(kz_star).reshape(2))),
        ("Kr_star", fmt9(float(kr_star))),
    ]
    print(_report(lines))
    return 0


def _verdict_text(trace):
    if trace.verdict == "Completed":
        return "Completed"
    return f"Diverged({fmt9(trace.t_div)})"


def write_trace_csv(path, cfg, bd, md, trace):
    lines = ["# mraclab trace"]
    for key in DEFAULTS:
        lines.append(f"# config.{key} = {fmt9(cfg[key])}")
    lines.append(f"# derived.K = {' '.join(fmt9(float(v)) for v in bd.K[0])}")
    lines.append(f"# derived.F = {fmt9(bd.F)}")
    lines.append(f"# derived.ki = {fmt9(bd.ki)}")
    lines.append(f"# derived.P = {' '.join(fmt9(float(v)) for v in md.P.flatten())}")
    lines.append(f"# verdict = {_verdict_text(trace)}")
    lines.append("t,r,alpha,q,alpha_m,u_bl,u_ad,u,e_norm,Kz1,Kz2,Kr,V_proxy")
    for row in trace.data:
        lines.append(",".join(f"{v:.9g}" for v in row))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def _metrics_lines(metrics):
    lines = [
        ("verdict", metrics.verdict),
        ("ise", fmt9(metrics.ise)),
        ("max_e_norm", fmt9(metrics.max_e_norm)),
        ("final_Kz1", fmt9(metrics.final_gains[0])),
        ("final_Kz2", fmt9(metrics.final_gains[1])),
        ("final_Kr", fmt9(metrics.final_gains[2])),
    ]
    for i, seg in enumerate(metrics.segments, 1):
        prefix = f"segment{i}"
        lines.append((f"{prefix}.window", f"{fmt9(seg.t_start)}..{fmt9(seg.t_end)}"))
        lines.append((f"{prefix}.target", fmt9(seg.target)))
        if seg.overshoot_pct is not None:
            lines.append((f"{prefix}.overshoot_pct", fmt9(seg.overshoot_pct)))
        value = "unsettled" if seg.settling_time is None else fmt9(seg.settling_time)
        lines.append((f"{prefix}.settling_time", value))
    return lines


def cmd_simulate(cfg, out_path):
    bd, md = make_designs(cfg)
    sc = make_scenario(cfg)
    trace = run_scenario(sc, bd, md)
    try:
        write_trace_csv(out_path, cfg, bd, md, trace)
    except OSError as exc:
        print(f"cannot write trace {out_path}: {exc}", file=sys.stderr)
        return 2
    if trace.verdict != "Completed":
        print(_report([("verdict", _verdict_text(trace))]))
        return 3
    print(_report(_metrics_lines(compute_metrics(trace))))
    return 0


def parse_grid(items):
    """Repeated --grid key=v1,v2,... into an ordered (key, values) list."""
    grid = []
    for item in items:
        if "=" not in item:
            raise ConfigError(f"--grid needs key=v1,v2,..., got {item!r}")
        key, _, raw = item.partition("=")
        key = key.strip()
        values = [v for v in (part.strip() for part in raw.split(",")) if v]
        if not values:
            raise ConfigError(f"--grid {key} lists no values")
        grid.append((key, [_coerce(key, v) for v in values]))
    if not grid:
        raise ConfigError("sweep needs at least one --grid axis")
    total = 1
    for _, values in grid:
        total *= len(values)
    if total > MAX_SWEEP_COMBOS:
        raise ConfigError(f"grid has {total} combinations, limit {MAX_SWEEP_COMBOS}")
    return grid


def _sweep_cell(args):
    cfg, keys, combo = args
    cell = dict(cfg)
    cell.update(zip(keys, combo))
    bd, md = make_designs(cell)
    trace = run_scenario(make_scenario(cell), bd, md)
    if trace.verdict != "Completed":
        return _verdict_text(trace), "nan", "nan", "nan"
    metrics = compute_metrics(trace)
    final = metrics.segments[-1].overshoot_pct if metrics.segments else None
    return (
        "Completed",
        "nan" if final is None else fmt9(final),
        fmt9(metrics.ise),
        fmt9(metrics.max_e_norm),
    )


def cmd_sweep(cfg, grid_items, out_path, jobs):
    grid = parse_grid(grid_items)
    keys = [key for key, _ in grid]
    combos = list(product(*(values for _, values in grid)))
    # Validate every cell's design and scenario before any run starts.
    for combo in combos:
        cell = dict(cfg)
        cell.update(zip(keys, combo))
        make_designs(cell)
        make_scenario(cell)
    tasks = [(cfg, keys, combo) for combo in combos]
    jobs = jobs or os.cpu_count() or 1
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_sweep_cell, tasks))
    else:
        results = [_sweep_cell(task) for task in tasks]
    lines = [",".join(keys) + ",verdict,overshoot_pct,ise,max_e_norm"]
    for combo, row in zip(combos, results):
        cells = [fmt9(v) for v in combo]
        lines.append(",".join(cells + list(row)))
    try:
        with open(out_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")
    except OSError as exc:
        print(f"cannot write summary {out_path}: {exc}", file=sys.stderr)
        return 2
    print(f"{len(combos)} combinations -> {out_path}")
    return 0


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="mraclab",
        description="Adaptive-augmentation flight control simulation laboratory",
    )
    parser.add_argument("--config", help="flat key = value config file")
    parser.add_argument(
        "--set",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="override one config value (repeatable)",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("design", help="print the derived design quantities")
    p_sim = sub.add_parser("simulate", help="run one scenario and write its trace")
    p_sim.add_argument("--out", default="trace.csv", help="trace CSV path")
    p_sweep = sub.add_parser("sweep", help="run a config grid and summarize")
    p_sweep.add_argument(
        "--grid",
        action="append",
        default=[],
        metavar="KEY=V1,V2,...",
        help="one grid axis (repeatable)",
    )
    p_sweep.add_argument("--out", default="sweep.csv", help="summary CSV path")
    p_sweep.add_argument("--jobs", type=int, default=None, help="worker processes")
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config, args.set)
        if args.command == "design":
            return cmd_design(cfg)
        if args.command == "simulate":
            return cmd_simulate(cfg, args.out)
        return cmd_sweep(cfg, args.grid, args.out, args.jobs)
    except (MraclabError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
