"""Scenario runner: plant, baseline law, reference model, and adaptation
coupled into one fixed-step ODE system, plus trace metrics.

The integration state is a flat 10-vector
    [alpha, q, x_ref1, x_ref2, xi, z_m1, z_m2, Kz1, Kz2, Kr]
advanced by classical RK4.  Adaptive gains ride inside the RK4 vector
rather than being side-stepped, which keeps the whole loop at one
consistent order; the projection box is enforced by clamping after each
full step because the clamp derivative is discontinuous.

The derivative closure works in unpacked scalars for speed.  Sampled
trace rows are recomputed through the public module operations instead,
and a property test holds the two paths together.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import hypot, isfinite

import numpy as np

from .baseline import BaselineState, baseline_aux_deriv, baseline_control
from .mrac import AdaptiveGains, adaptive_control, build_transform, update_derivs
from .numerics import MraclabError, rk4_step
from .plant import PlantState, plant_matrices

DEFAULT_STEPS = ((1.0, 0.1), (6.0, 0.0), (11.0, 0.15), (16.0, 0.0), (21.0, 0.1))

# Any state component beyond this magnitude ends the run with a
# Diverged verdict; destabilizing tunings are data, not crashes.
DIVERGE_LIMIT = 1e6

COLUMNS = (
    "t",
    "r",
    "alpha",
    "q",
    "alpha_m",
    "u_bl",
    "u_ad",
    "u",
    "e_norm",
    "Kz1",
    "Kz2",
    "Kr",
    "V_proxy",
)


class EmptyTrace(MraclabError):
    """Metrics requested from a trace with no records."""


@dataclass(frozen=True)
class Scenario:
    """Everything that varies between runs; designs are passed separately.

    b_simplified is a test hook that replaces the simulated plant's B
    with the design B0, making the nominal closed loop exactly equal to
    the reference model.
    """

    mu: float
    dt: float = 0.001
    t_end: float = 30.0
    ref_steps: tuple = DEFAULT_STEPS
    noise_std: float = 0.0
    seed: int = 0
    mrac_enabled: bool = True
    sample_stride: int = 10
    b_simplified: bool = False

    def __post_init__(self):
        if self.dt <= 0.0:
            raise ValueError("dt must be positive")
        if self.t_end <= 0.0:
            raise ValueError("t_end must be positive")
        if self.noise_std < 0.0:
            raise ValueError("noise_std must be nonnegative")
        if self.sample_stride < 1:
            raise ValueError("sample_stride must be at least 1")
        last = -1.0
        for ts, _amp in self.ref_steps:
            if ts <= last:
                raise ValueError("step times must be strictly increasing")
            if not 0.0 <= ts <= self.t_end:
                raise ValueError(f"step time {ts} outside [0, t_end]")
            last = ts


@dataclass(frozen=True)
class SimState:
    """Typed view of one integration state, for tests and debugging."""

    x: PlantState
    baseline: BaselineState
    z_m: np.ndarray
    gains: AdaptiveGains


@dataclass(frozen=True)
class SimTrace:
    scenario: Scenario
    verdict: str
    t_div: float | None
    data: np.ndarray
    final_state: SimState | None = None

    def column(self, name):
        return self.data[:, COLUMNS.index(name)]


@dataclass(frozen=True)
class SegmentMetrics:
    t_start: float
    t_end: float
    target: float
    overshoot_pct: float | None
    settling_time: float | None


@dataclass(frozen=True)
class Metrics:
    segments: tuple
    ise: float
    final_gains: tuple
    max_e_norm: float
    verdict: str


def reference_signal(steps, t):
    """Piecewise-constant reference: amplitude of the latest step <= t."""
    r = 0.0
    for ts, amp in steps:
        if t >= ts:
            r = amp
    return r


def _signal_row(sc, bd, md, tz, t, s, na, nq):
    """One trace record, computed through the public module operations."""
    r = reference_signal(sc.ref_steps, t)
    xm = PlantState(alpha=s[0] + na, q=s[1] + nq)
    bs = BaselineState(x_ref=s[2:4], xi=s[4])
    u_bl = baseline_control(bd, xm, bs, r)
    z = tz.T @ np.array([xm.alpha, xm.q])
    if sc.mrac_enabled:
        u_ad = adaptive_control(AdaptiveGains(K_z=s[7:9], K_r=s[9]), z, r)
    else:
        u_ad = 0.0
    e = z - s[5:7]
    e_norm = hypot(e[0], e[1])
    v_proxy = 0.5 * float(e @ md.P @ e)
    return (
        t,
        r,
        s[0],
        s[1],
        s[5],
        u_bl,
        u_ad,
        u_bl + u_ad,
        e_norm,
        s[7],
        s[8],
        s[9],
        v_proxy,
    )


def run_scenario(sc, bd, md):
    """Integrate the coupled loop and return the sampled SimTrace.

    The measured state (true state plus one noise draw per step, held
    across the RK4 substages) feeds every controller path; the plant
    itself advances with the exact interpolated (A, B).  Gains are
    clamped into the projection box after each full step.  A non-finite
    or oversized state ends the run early with verdict Diverged.
    """
    pm = plant_matrices(sc.mu)
    tz = build_transform((bd.A_d[0, 0], bd.A_d[0, 1]))

    ap11, ap12 = pm.A[0]
    ap21, ap22 = pm.A[1]
    if sc.b_simplified:
        bp1, bp2 = bd.B0[:, 0]
    else:
        bp1, bp2 = pm.B[:, 0]
    kc1, kc2 = bd.K[0]
    fc = bd.F
    kic = bd.ki
    ulim = bd.u_limit
    A_cl = bd.closed_loop()
    am11, am12 = A_cl[0]
    am21, am22 = A_cl[1]
    bf2 = bd.B0[1, 0] * fc
    t21, t22 = tz.T[1]
    az21, az22 = md.A_m_z[1]
    bm2 = md.B_m_z[1]
    pb = md.P @ md.B0_z
    pb1, pb2 = pb
    gz = md.gamma_z * md.sgn_lambda
    gr = md.gamma_r * md.sgn_lambda
    eps = md.eps
    kzb = md.kz_bound
    krb = md.kr_bound
    enabled = sc.mrac_enabled
    steps = sc.ref_steps

    na = 0.0
    nq = 0.0

    def deriv(t, s):
        x0, x1, xr0, xr1, xi, zm0, zm1, kz1, kz2, kr = s
        r = 0.0
        for ts, amp in steps:
            if t >= ts:
                r = amp
        xm0 = x0 + na
        xm1 = x1 + nq
        u_bl = -(kc1 * xm0 + kc2 * xm1) + fc * r + kic * xi
        z0 = xm0
        z1 = t21 * xm0 + t22 * xm1
        e0 = z0 - zm0
        e1 = z1 - zm1
        if enabled:
            u_ad = -(kz1 * z0 + kz2 * z1) + kr * r
        else:
            u_ad = 0.0
        u = u_bl + u_ad
        if abs(u) > ulim:
            dxi = 0.0  # anti-windup: hold the integral while saturated
        else:
            dxi = xm0 - xr0
        if enabled and hypot(e0, e1) > eps:
            se = e0 * pb1 + e1 * pb2
            dk1 = gz * se * z0
            if abs(kz1) >= kzb and kz1 * dk1 > 0.0:
                dk1 = 0.0
            dk2 = gz * se * z1
            if abs(kz2) >= kzb and kz2 * dk2 > 0.0:
                dk2 = 0.0
            dkr = -gr * se * r
            if abs(kr) >= krb and kr * dkr > 0.0:
                dkr = 0.0
        else:
            dk1 = 0.0
            dk2 = 0.0
            dkr = 0.0
        return np.array(
            [
                ap11 * x0 + ap12 * x1 + bp1 * u,
                ap21 * x0 + ap22 * x1 + bp2 * u,
                am11 * xr0 + am12 * xr1,
                am21 * xr0 + am22 * xr1 + bf2 * r,
                dxi,
                zm1,
                az21 * zm0 + az22 * zm1 + bm2 * r,
                dk1,
                dk2,
                dkr,
            ]
        )

    rng = np.random.default_rng(sc.seed)
    noisy = sc.noise_std > 0.0
    n_steps = int(round(sc.t_end / sc.dt))
    stride = sc.sample_stride
    dt = sc.dt
    s = np.zeros(10)
    rows = []
    verdict = "Completed"
    t_div = None
    for k in range(n_steps + 1):
        t = k * dt
        if noisy:
            na, nq = rng.normal(0.0, sc.noise_std, 2)
        if k % stride == 0:
            rows.append(_signal_row(sc, bd, md, tz, t, s, na, nq))
        if k == n_steps:
            break
        s = rk4_step(deriv, t, s, dt)
        if s[7] > kzb:
            s[7] = kzb
        elif s[7] < -kzb:
            s[7] = -kzb
        if s[8] > kzb:
            s[8] = kzb
        elif s[8] < -kzb:
            s[8] = -kzb
        if s[9] > krb:
            s[9] = krb
        elif s[9] < -krb:
            s[9] = -krb
        if not all(isfinite(v) for v in s) or max(abs(v) for v in s) > DIVERGE_LIMIT:
            verdict = "Diverged"
            t_div = (k + 1) * dt
            break
    final = SimState(
        x=PlantState(alpha=s[0], q=s[1]),
        baseline=BaselineState(x_ref=np.array(s[2:4]), xi=s[4]),
        z_m=np.array(s[5:7]),
        gains=AdaptiveGains(K_z=np.array(s[7:9]), K_r=s[9]),
    )
    return SimTrace(
        scenario=sc, verdict=verdict, t_div=t_div, data=np.array(rows),
        final_state=final,
    )


def compute_metrics(tr):
    """Per-segment overshoot and settling, whole-run ISE and error peak.

    Segments start at each reference step time and end at the next one
    (or t_end).  Overshoot is only defined for nonzero targets; settling
    is the first time after which |alpha - target| <= 0.02 |target|
    holds to the segment end, reported in seconds after the step time,
    or None when the segment never settles (always for zero targets).
    """
    if tr.data.shape[0] == 0:
        raise EmptyTrace("trace has no records")
    if tr.verdict != "Completed":
        raise ValueError("metrics are defined for Completed traces only")
    t = tr.column("t")
    alpha = tr.column("alpha")
    r = tr.column("r")
    sc = tr.scenario
    dt_sample = sc.dt * sc.sample_stride
    segments = []
    times = [ts for ts, _ in sc.ref_steps]
    bounds = times[1:] + [sc.t_end]
    for (ts, target), te in zip(sc.ref_steps, bounds):
        m = (t >= ts) & (t <= te)
        a_seg = alpha[m]
        t_seg = t[m]
        overshoot = None
        settling = None
        if target != 0.0 and a_seg.size:
            peak = float(np.max((a_seg - target) * np.sign(target)))
            overshoot = max(0.0, peak / abs(target) * 100.0)
            inside = np.abs(a_seg - target) <= 0.02 * abs(target)
            j = a_seg.size
            while j > 0 and inside[j - 1]:
                j -= 1
            if j < a_seg.size:
                settling = float(t_seg[j] - ts)
        segments.append(
            SegmentMetrics(
                t_start=float(ts),
                t_end=float(te),
                target=float(target),
                overshoot_pct=overshoot,
                settling_time=settling,
            )
        )
    ise = float(np.sum((alpha - r) ** 2) * dt_sample)
    last = tr.data[-1]
    return Metrics(
        segments=tuple(segments),
        ise=ise,
        final_gains=(
            float(last[COLUMNS.index("Kz1")]),
            float(last[COLUMNS.index("Kz2")]),
            float(last[COLUMNS.index("Kr")]),
        ),
        max_e_norm=float(np.max(tr.column("e_norm"))),
        verdict=tr.verdict,
    )
