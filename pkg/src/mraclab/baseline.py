"""Baseline flight control law: LQ state feedback, feedforward, integral trim.

The gain K comes from a Riccati design on the forward-c.g. model with a
simplified input matrix B0 (lift contribution of the control surface
zeroed, moment row kept).  F scales the reference for unit DC gain, and
an integral term acts on the deviation between the measured output and
the output of a live filter carrying the nominal closed-loop response,
so the trim only works when the plant drifts away from the design model.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .numerics import MraclabError, is_hurwitz, solve_care

# Auto-selection candidates for the integral gain, tried in this order.
KI_CANDIDATES = (2.0, -2.0)

DC_GAIN_MIN = 1e-9
DC_GAIN_TOL = 1e-10


class SingularDcGain(MraclabError):
    """The designed loop has (numerically) zero DC gain; F is undefined."""


class UnstableAugmentedLoop(MraclabError):
    """No admissible integral gain keeps the integral-augmented loop stable."""


@dataclass(frozen=True)
class BaselineDesign:
    """Frozen result of design_baseline; all downstream code reads from here.

    u_limit is an anti-windup hook: the simulator freezes the integral
    state while |u| exceeds it.  The default (inf) never engages.
    """

    K: np.ndarray
    F: float
    ki: float
    A_d: np.ndarray
    B0: np.ndarray
    C: np.ndarray
    u_limit: float = math.inf

    def closed_loop(self):
        """Design-model closed loop A_d - B0 K (the reference dynamics)."""
        return self.A_d - self.B0 @ self.K


@dataclass
class BaselineState:
    """Per-run controller memory: nominal-response filter and integral."""

    x_ref: np.ndarray
    xi: float


def _augmented(A_m, B0, C, ki):
    # states (x, xi): d(xi)/dt = C x, u gains ki * xi through B0
    top = np.hstack([A_m, ki * B0])
    bottom = np.hstack([C, np.zeros((1, 1))])
    return np.vstack([top, bottom])


def design_baseline(A_fwd, B_fwd, Qw, Rw, ki=None, u_limit=math.inf):
    """Design the baseline law on (A_fwd, B0) and validate every invariant.

    Rw is the scalar control weight.  ki=None auto-selects the first
    value in KI_CANDIDATES that keeps the 3x3 integral-augmented design
    loop Hurwitz; an explicit ki is checked the same way.
    """
    A_fwd = np.asarray(A_fwd, dtype=float)
    B_fwd = np.asarray(B_fwd, dtype=float)
    Qw = np.asarray(Qw, dtype=float)
    Rw = float(Rw)
    if Rw <= 0.0:
        raise ValueError("control weight Rw must be positive")
    B0 = B_fwd.copy()
    B0[0, 0] = 0.0
    C = np.array([[1.0, 0.0]])

    P_lqr = solve_care(A_fwd, B0, Qw, np.array([[Rw]]))
    K = (B0.T @ P_lqr) / Rw
    A_m = A_fwd - B0 @ K

    dc = (C @ np.linalg.solve(-A_m, B0)).item()
    if abs(dc) < DC_GAIN_MIN:
        raise SingularDcGain(f"DC gain {dc:.3e} too small to invert")
    F = 1.0 / dc
    if abs(dc * F - 1.0) > DC_GAIN_TOL:
        raise SingularDcGain("unit-DC-gain check failed after scaling")

    if ki is None:
        for cand in KI_CANDIDATES:
            if is_hurwitz(_augmented(A_m, B0, C, cand)):
                ki = cand
                break
        else:
            raise UnstableAugmentedLoop(
                f"no candidate in {KI_CANDIDATES} stabilizes the integral loop"
            )
    else:
        ki = float(ki)
        if not is_hurwitz(_augmented(A_m, B0, C, ki)):
            raise UnstableAugmentedLoop(f"ki={ki} leaves the augmented loop unstable")

    return BaselineDesign(
        K=K, F=F, ki=ki, A_d=A_fwd, B0=B0, C=C, u_limit=float(u_limit)
    )


def baseline_control(d, x, s, r):
    """u_bl = -K x + F r + ki * xi."""
    return float(-(d.K[0, 0] * x.alpha + d.K[0, 1] * x.q) + d.F * r + d.ki * s.xi)


def baseline_aux_deriv(d, x, s, r):
    """Derivatives of the nominal-response filter and the integral state.

    The filter replays the design closed loop, d(x_ref)/dt =
    (A_d - B0 K) x_ref + B0 F r, so it tracks arbitrary references; the
    integral state accumulates C x - C x_ref.
    """
    dx_ref = d.closed_loop() @ s.x_ref + d.B0[:, 0] * (d.F * r)
    dxi = x.alpha - float(s.x_ref[0])
    return BaselineState(x_ref=dx_ref, xi=dxi)
