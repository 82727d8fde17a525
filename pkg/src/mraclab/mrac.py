"""Adaptive augmentation: companion-form reference model and update laws.

The measured state is mapped by z = T x into (alpha, alpha-dot)
coordinates, where the design closed loop becomes a companion-form
reference model and the plant's uncertainty collapses into its second
row plus a scalar input-effectiveness factor.  Adaptive gains are driven
by Lyapunov update laws, gated by a dead zone on the model-following
error norm and kept inside a box by a boundary-clamp projection.

T is always built from the design model's first row, never from true
plant derivatives: alpha-dot is not a sensor.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .numerics import MraclabError, solve_lyapunov

COMPANION_TOL = 1e-10
A12_MIN = 1e-12
B2_MIN = 1e-12


class SingularTransform(MraclabError):
    """First-row coefficient a12 too small to build an invertible T."""


class CompanionFormViolation(MraclabError):
    """Transformed reference model lost its [0, 1] top-row structure."""


class DegenerateInput(MraclabError):
    """A moment-row input entry needed for ideal gains is (near) zero."""


class ZeroRate(MraclabError):
    """Lyapunov value undefined at zero adaptation rate."""


@dataclass(frozen=True)
class ZTransform:
    """z = T x with T = [[1, 0], [a11, a12]], plus its exact inverse."""

    T: np.ndarray
    T_inv: np.ndarray


@dataclass(frozen=True)
class MracDesign:
    """Reference model, Lyapunov matrix, and adaptation tuning, all in z."""

    A_m_z: np.ndarray
    B_m_z: np.ndarray
    B0_z: np.ndarray
    P: np.ndarray
    Q_lyap: np.ndarray
    gamma_z: float
    gamma_r: float
    sgn_lambda: float
    eps: float
    kz_bound: float
    kr_bound: float


@dataclass
class AdaptiveGains:
    """K_z feeds back the z state, K_r scales the reference."""

    K_z: np.ndarray
    K_r: float


def build_transform(a_row):
    """ZTransform from the design model's first row (a11, a12)."""
    a11, a12 = (float(v) for v in a_row)
    if abs(a12) < A12_MIN:
        raise SingularTransform(f"a12={a12} leaves T singular")
    T = np.array([[1.0, 0.0], [a11, a12]])
    T_inv = np.array([[1.0, 0.0], [-a11 / a12, 1.0 / a12]])
    return ZTransform(T=T, T_inv=T_inv)


def build_mrac(
    d,
    t,
    Q_lyap=None,
    gamma_z=50.0,
    gamma_r=50.0,
    eps=0.05,
    kz_bound=10.0,
    kr_bound=10.0,
):
    """Assemble the MracDesign for baseline design d and transform t.

    A_m_z = T (A_d - B0 K) T^-1 must come out companion (top row [0, 1],
    first input entry 0); P solves the Lyapunov equation against Q_lyap
    (identity when omitted).  The input-effectiveness sign is fixed
    positive: both corner plants push the moment row the same way.
    """
    if eps <= 0.0:
        raise ValueError("dead-zone level eps must be positive")
    if gamma_z < 0.0 or gamma_r < 0.0:
        raise ValueError("adaptation rates must be nonnegative")
    if kz_bound <= 0.0 or kr_bound <= 0.0:
        raise ValueError("projection bounds must be positive")
    Q_lyap = np.eye(2) if Q_lyap is None else np.asarray(Q_lyap, dtype=float)
    A_m_z = t.T @ d.closed_loop() @ t.T_inv
    B0_z = t.T @ d.B0[:, 0]
    B_m_z = B0_z * d.F
    if (
        abs(A_m_z[0, 0]) > COMPANION_TOL
        or abs(A_m_z[0, 1] - 1.0) > COMPANION_TOL
        or abs(B0_z[0]) > COMPANION_TOL
    ):
        raise CompanionFormViolation(
            f"top row {A_m_z[0]} / input head {B0_z[0]} not companion"
        )
    P = solve_lyapunov(A_m_z, Q_lyap)
    return MracDesign(
        A_m_z=A_m_z,
        B_m_z=B_m_z,
        B0_z=B0_z,
        P=P,
        Q_lyap=Q_lyap,
        gamma_z=float(gamma_z),
        gamma_r=float(gamma_r),
        sgn_lambda=1.0,
        eps=float(eps),
        kz_bound=float(kz_bound),
        kr_bound=float(kr_bound),
    )


def ideal_gains(m, plant_z, total_baseline_z):
    """Ideal adaptive gains and input effectiveness for a z-space plant.

    plant_z is (A_true_z, B_true_z); total_baseline_z is the baseline
    law expressed in z, (K_bl_z, F_bl).  Matching lives entirely in the
    moment row: lambda scales the input channel, the total gains place
    that row onto the reference model, and the adaptive ideals are the
    totals minus what the baseline already contributes.
    """
    A_true_z, B_true_z = plant_z
    A_true_z = np.asarray(A_true_z, dtype=float)
    b2_true = float(np.asarray(B_true_z, dtype=float).reshape(2)[1])
    K_bl_z, F_bl = total_baseline_z
    K_bl_z = np.asarray(K_bl_z, dtype=float).reshape(2)
    b2_nom = float(m.B0_z[1])
    if abs(b2_true) < B2_MIN or abs(b2_nom) < B2_MIN:
        raise DegenerateInput("moment-row input entry below tolerance")
    lam = b2_true / b2_nom
    K_z_tot = (A_true_z[1] - m.A_m_z[1]) / (lam * b2_nom)
    K_r_tot = float(m.B_m_z[1]) / (lam * b2_nom)
    return K_z_tot - K_bl_z, K_r_tot - float(F_bl), lam


def adaptive_control(g, z, r):
    """u_ad = -K_z z + K_r r."""
    return float(-(g.K_z[0] * z[0] + g.K_z[1] * z[1]) + g.K_r * r)


def project(value, raw_deriv, bound):
    """Boundary-clamp projection onto the box [-bound, bound].

    A component sitting at (or past) the boundary with an outward-
    pointing derivative is zeroed; everything else passes through.
    Accepts a scalar or a vector, returning the same shape.
    """
    if bound <= 0.0:
        raise ValueError("projection bound must be positive")
    if np.ndim(value) == 0:
        v = float(value)
        dr = float(raw_deriv)
        return 0.0 if (abs(v) >= bound and v * dr > 0.0) else dr
    v = np.asarray(value, dtype=float)
    dr = np.array(raw_deriv, dtype=float)
    dr[(np.abs(v) >= bound) & (v * dr > 0.0)] = 0.0
    return dr


def update_derivs(m, g, e, z, r):
    """Gain derivatives under dead zone and projection.

    Inside the dead zone (||e|| <= eps) both derivatives are exactly
    zero.  Outside, the scalar s = e' P B0_z drives
    dK_z = gamma_z sgn(lambda) s z' and dK_r = -gamma_r sgn(lambda) s r,
    each clamped by the projection against the current gains.
    """
    if np.hypot(e[0], e[1]) <= m.eps:
        return AdaptiveGains(K_z=np.zeros(2), K_r=0.0)
    s = float(e @ (m.P @ m.B0_z))
    raw_z = m.gamma_z * m.sgn_lambda * s * np.asarray(z, dtype=float)
    raw_r = -m.gamma_r * m.sgn_lambda * s * float(r)
    return AdaptiveGains(
        K_z=project(g.K_z, raw_z, m.kz_bound),
        K_r=project(g.K_r, raw_r, m.kr_bound),
    )


def lyapunov_value(m, e, dKz, dKr, lam):
    """V = (e'Pe + |lambda|/gamma_z dKz dKz' + |lambda|/gamma_r dKr^2) / 2.

    Diagnostic only; dKz and dKr are deviations from the ideal gains,
    which only test code can know.
    """
    if m.gamma_z == 0.0 or m.gamma_r == 0.0:
        raise ZeroRate("Lyapunov value undefined for zero adaptation rate")
    e = np.asarray(e, dtype=float)
    dKz = np.asarray(dKz, dtype=float).reshape(2)
    quad = float(e @ m.P @ e)
    return 0.5 * (
        quad
        + abs(lam) / m.gamma_z * float(dKz @ dKz)
        + abs(lam) / m.gamma_r * float(dKr) ** 2
    )
