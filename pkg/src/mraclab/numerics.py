"""Dense linear-algebra utilities for small (at most 4x4) real systems.

Everything downstream runs in 2 to 4 dimensional state spaces, so the
solvers here trade generality for checkable simplicity: the Lyapunov
equation is vectorized into an n^2 x n^2 linear system, and the Riccati
equation is solved by Newton-Kleinman iteration over repeated Lyapunov
solves.  All matrices are numpy float64 arrays; operations validate
dimensions on entry.
"""

from __future__ import annotations

import cmath

import numpy as np

# Residual and symmetry tolerances shared by the solvers and their tests.
LYAP_RES = 1e-10
CARE_RES = 1e-8
SYM_TOL = 1e-12

MAX_DIM = 4

_NK_MAX_ITER = 60
_NK_GAIN_TOL = 1e-13


class MraclabError(Exception):
    """Base class for every error this package raises deliberately."""


class NotHurwitz(MraclabError):
    """A matrix required to be Hurwitz has an eigenvalue with Re >= 0."""


class SingularSystem(MraclabError):
    """A linear solve hit a (numerically) singular coefficient matrix."""


class NoStabilizingSolution(MraclabError):
    """The Riccati iteration could not produce a stabilizing solution."""


def _as_square(A, name="A"):
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"{name} must be square, got shape {A.shape}")
    if A.shape[0] > MAX_DIM:
        raise ValueError(f"{name} exceeds the {MAX_DIM}x{MAX_DIM} limit")
    return A


def _check_spd(M, name):
    if np.abs(M - M.T).max() > SYM_TOL:
        raise ValueError(f"{name} must be symmetric")
    # n <= 4, so a direct symmetric eigensolve is the cheapest reliable test
    if np.linalg.eigvalsh(M).min() <= 0.0:
        raise ValueError(f"{name} must be positive-definite")


def eig2(A):
    """Eigenvalues of a 2x2 matrix, closed form.

    Returns the two roots of lambda^2 - tr(A) lambda + det(A) as complex
    numbers, the '+' branch of the quadratic formula first.
    """
    A = _as_square(A)
    if A.shape != (2, 2):
        raise ValueError(f"eig2 needs a 2x2 matrix, got {A.shape}")
    tr = A[0, 0] + A[1, 1]
    det = A[0, 0] * A[1, 1] - A[0, 1] * A[1, 0]
    root = cmath.sqrt(complex(tr * tr - 4.0 * det, 0.0))
    return (tr + root) / 2.0, (tr - root) / 2.0


def is_hurwitz(A):
    """True iff every eigenvalue of A has a strictly negative real part.

    The 2x2 case uses the trace/determinant criterion so no iterative
    eigensolve is involved on the hot design path.
    """
    A = _as_square(A)
    n = A.shape[0]
    if n == 1:
        return bool(A[0, 0] < 0.0)
    if n == 2:
        tr = A[0, 0] + A[1, 1]
        det = A[0, 0] * A[1, 1] - A[0, 1] * A[1, 0]
        return bool(tr < 0.0 and det > 0.0)
    return bool(np.all(np.linalg.eigvals(A).real < 0.0))


def solve_lyapunov(A_m, Q):
    """Solve A_m' P + P A_m = -Q for symmetric positive-definite P.

    A_m must be Hurwitz and Q symmetric positive-definite.  The equation
    is vectorized column-wise into the Kronecker-sum system
    (I (x) A_m' + A_m' (x) I) vec(P) = -vec(Q) and solved by Gaussian
    elimination with partial pivoting.  The result is symmetrized and
    the residual checked against LYAP_RES, scaled up when the data or
    the solution itself is large.
    """
    A_m = _as_square(A_m, "A_m")
    Q = _as_square(Q, "Q")
    if A_m.shape != Q.shape:
        raise ValueError("A_m and Q must have the same shape")
    _check_spd(Q, "Q")
    if not is_hurwitz(A_m):
        raise NotHurwitz("A_m has an eigenvalue with nonnegative real part")
    n = A_m.shape[0]
    eye = np.eye(n)
    M = np.kron(eye, A_m.T) + np.kron(A_m.T, eye)
    try:
        p = np.linalg.solve(M, -Q.flatten(order="F"))
    except np.linalg.LinAlgError as exc:
        raise SingularSystem(f"Lyapunov system is singular: {exc}") from exc
    P = p.reshape((n, n), order="F")
    P = 0.5 * (P + P.T)
    res = np.abs(A_m.T @ P + P @ A_m + Q).max()
    # relative gate: near-marginal A_m inflates P and the roundoff with it
    if res > LYAP_RES * max(1.0, np.abs(Q).max(), np.abs(A_m.T @ P).max()):
        raise SingularSystem(f"Lyapunov residual {res:.3e} exceeds {LYAP_RES}")
    return P


def _bass_gain(A, B):
    """Lyapunov-based stabilizing start: shift A by beta > ||A|| so that
    -(A + beta I) is stable, solve (A+bI) X + X (A+bI)' = 2 B B', and
    take K = B' X^-1.  X is invertible exactly when (A, B) is
    controllable; otherwise returns None.
    """
    n = A.shape[0]
    beta = float(np.linalg.norm(A, ord=2)) + 0.5
    M = A + beta * np.eye(n)
    eye = np.eye(n)
    L = np.kron(eye, M) + np.kron(M, eye)
    try:
        x = np.linalg.solve(L, (2.0 * B @ B.T).flatten(order="F"))
        X = x.reshape((n, n), order="F")
        X = 0.5 * (X + X.T)
        K = np.linalg.solve(X, B).T
    except np.linalg.LinAlgError:
        return None
    if np.all(np.isfinite(K)) and is_hurwitz(A - B @ K):
        return K
    return None


def _stabilizing_gain(A, B):
    """Find any K0 with A - B K0 Hurwitz, or None.

    The Lyapunov-shift construction covers every controllable pair.  For
    stabilizable-but-uncontrollable systems it degenerates, so a scan of
    sparse gain patterns (scaled unit rows plus the all-ones row, both
    signs) backs it up.
    """
    n = A.shape[0]
    m = B.shape[1]
    if is_hurwitz(A):
        return np.zeros((m, n))
    K0 = _bass_gain(A, B)
    if K0 is not None:
        return K0
    patterns = [row for row in np.eye(n)]
    patterns.append(np.ones(n))
    for c in (0.1, 0.2, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0, 500.0):
        for pat in patterns:
            for sgn in (1.0, -1.0):
                K0 = np.tile(sgn * c * pat, (m, 1))
                if is_hurwitz(A - B @ K0):
                    return K0
    return None


def solve_care(A, B, Qw, Rw):
    """Stabilizing solution of A'P + PA - P B Rw^-1 B' P + Qw = 0.

    Newton-Kleinman iteration: starting from a stabilizing gain, each
    step solves one Lyapunov equation and re-derives the gain, which
    converges quadratically to the stabilizing Riccati solution.  The
    final P must meet the CARE_RES residual bound and close the loop
    Hurwitz, else NoStabilizingSolution is raised.  B identically zero
    is rejected outright.
    """
    A = _as_square(A)
    B = np.asarray(B, dtype=float)
    if B.ndim != 2 or B.shape[0] != A.shape[0]:
        raise ValueError(f"B shape {B.shape} does not conform to A {A.shape}")
    Qw = _as_square(Qw, "Qw")
    Rw = _as_square(Rw, "Rw")
    _check_spd(Qw, "Qw")
    _check_spd(Rw, "Rw")
    if not np.any(B):
        raise NoStabilizingSolution("B is zero: nothing to stabilize with")
    Rinv = np.linalg.inv(Rw)
    K = _stabilizing_gain(A, B)
    if K is None:
        raise NoStabilizingSolution("no stabilizing initial gain found")
    P = None
    for _ in range(_NK_MAX_ITER):
        Qk = Qw + K.T @ Rw @ K
        Qk = 0.5 * (Qk + Qk.T)
        try:
            P = solve_lyapunov(A - B @ K, Qk)
        except (NotHurwitz, SingularSystem) as exc:
            raise NoStabilizingSolution(f"iteration lost stability: {exc}") from exc
        K_new = Rinv @ B.T @ P
        delta = np.abs(K_new - K).max()
        K = K_new
        if delta <= _NK_GAIN_TOL * max(1.0, np.abs(K).max()):
            break
    res = np.abs(A.T @ P + P @ A - P @ B @ Rinv @ B.T @ P + Qw).max()
    scale = max(1.0, np.abs(A.T @ P).max(), np.abs(Qw).max())
    if res > CARE_RES * scale:
        raise NoStabilizingSolution(f"residual {res:.3e} exceeds {CARE_RES}")
    if not is_hurwitz(A - B @ Rinv @ B.T @ P):
        raise NoStabilizingSolution("closed loop from converged P is not Hurwitz")
    return P


def rk4_step(f, t, s, h):
    """One classical 4th-order Runge-Kutta step of size h from (t, s)."""
    if h <= 0.0:
        raise ValueError("step size must be positive")
    k1 = f(t, s)
    k2 = f(t + 0.5 * h, s + 0.5 * h * k1)
    k3 = f(t + 0.5 * h, s + 0.5 * h * k2)
    k4 = f(t + h, s + h * k3)
    return s + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
