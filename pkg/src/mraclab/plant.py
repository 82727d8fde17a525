"""Linearized pitch-axis dynamics as a function of center-of-gravity position.

Two published operating points (most forward and most aft c.g.) anchor
an entrywise affine interpolation; the scalar position mu in [0, 1]
selects the blend.  State is x = [alpha, q] (angle of attack, pitch
rate), input is elevator deflection, output is alpha.  Radians
throughout.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .numerics import MraclabError

A_FWD = np.array([[-1.453, 0.9672], [5.181, -1.639]])
B_FWD = np.array([[0.4467], [34.79]])
A_AFT = np.array([[-1.45, 0.9673], [15.08, -1.414]])
B_AFT = np.array([[0.4461], [31.77]])
C_OUT = np.array([[1.0, 0.0]])


class OutOfRange(MraclabError):
    """c.g. position outside the modeled [0, 1] envelope."""


@dataclass(frozen=True)
class PlantModel:
    """The (A, B, C) triple actually simulated at c.g. position mu."""

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    mu: float


@dataclass(frozen=True)
class PlantState:
    alpha: float
    q: float


def plant_matrices(mu):
    """Interpolated plant at c.g. position mu (0 = forward, 1 = aft).

    Endpoints reproduce the stored corner models bit for bit.
    """
    mu = float(mu)
    if not 0.0 <= mu <= 1.0:
        raise OutOfRange(f"c.g. position {mu} outside [0, 1]")
    w = 1.0 - mu
    A = w * A_FWD + mu * A_AFT
    B = w * B_FWD + mu * B_AFT
    return PlantModel(A=A, B=B, C=C_OUT, mu=mu)


def plant_deriv(m, x, u):
    """State derivative A x + B u as a PlantState."""
    dx = m.A @ np.array([x.alpha, x.q]) + m.B[:, 0] * float(u)
    return PlantState(alpha=float(dx[0]), q=float(dx[1]))
