"""Solver unit tests with independent oracles.

Hand-derivable cases are frozen as literals; randomized properties use
seeded generators so a failure is always reproducible.  scipy appears
only here, as a cross-check oracle, never in the package itself.
"""

import numpy as np
import pytest
import scipy.linalg

from mraclab.numerics import (
    CARE_RES,
    LYAP_RES,
    SYM_TOL,
    NoStabilizingSolution,
    NotHurwitz,
    eig2,
    is_hurwitz,
    rk4_step,
    solve_care,
    solve_lyapunov,
)
from mraclab.plant import A_FWD, B_FWD


def random_stable(rng, n=2):
    # A = M - (rho(M) + 1) I is always Hurwitz: shifting by more than
    # the spectral radius pushes every eigenvalue left of -1 + rho - rho.
    M = rng.standard_normal((n, n))
    rho = np.abs(np.linalg.eigvals(M)).max()
    return M - (rho + 1.0) * np.eye(n)


class TestEig2:
    def test_negative_identity(self):
        lo, hi = eig2(-np.eye(2))
        assert lo == -1.0 and hi == -1.0

    def test_factorable_polynomial(self):
        # lambda^2 + 3 lambda + 2 = (lambda + 1)(lambda + 2); the '+'
        # branch of the quadratic formula comes first
        roots = eig2(np.array([[0.0, 1.0], [-2.0, -3.0]]))
        assert roots[0] == pytest.approx(-1.0, abs=1e-14)
        assert roots[1] == pytest.approx(-2.0, abs=1e-14)

    def test_forward_plant_is_open_loop_unstable(self):
        # det(A_fwd) < 0 forces one real root in the right half plane
        det = A_FWD[0, 0] * A_FWD[1, 1] - A_FWD[0, 1] * A_FWD[1, 0]
        assert det < 0.0
        roots = eig2(A_FWD)
        assert max(r.real for r in roots) > 0.0
        assert min(r.real for r in roots) < 0.0

    def test_vieta_on_random_matrices(self):
        rng = np.random.default_rng(2024)
        for _ in range(100):
            A = rng.standard_normal((2, 2)) * 10.0
            r1, r2 = eig2(A)
            tr = A[0, 0] + A[1, 1]
            det = A[0, 0] * A[1, 1] - A[0, 1] * A[1, 0]
            assert abs((r1 + r2).real - tr) <= 1e-12 * max(1.0, abs(tr))
            assert abs((r1 * r2).real - det) <= 1e-12 * max(1.0, abs(det))
            assert abs((r1 + r2).imag) <= 1e-12
            assert abs((r1 * r2).imag) <= 1e-12

    def test_rejects_wrong_shape(self):
        with pytest.raises(ValueError):
            eig2(np.eye(3))


class TestIsHurwitz:
    def test_simple_cases(self):
        assert is_hurwitz(-np.eye(2))
        assert not is_hurwitz(np.eye(2))
        assert not is_hurwitz(A_FWD)
        assert is_hurwitz(np.array([[-2.0]]))

    def test_marginal_is_not_hurwitz(self):
        # zero eigenvalue (det = 0) must not count as stable
        assert not is_hurwitz(np.array([[0.0, 1.0], [0.0, -1.0]]))

    def test_three_by_three(self):
        A = np.array([[-1.0, 0.5, 0.0], [0.0, -2.0, 1.0], [0.0, 0.0, -3.0]])
        assert is_hurwitz(A)
        A[2, 2] = 0.5
        assert not is_hurwitz(A)

    def test_size_limit(self):
        with pytest.raises(ValueError):
            is_hurwitz(-np.eye(5))


class TestSolveLyapunov:
    def test_diagonal_case(self):
        P = solve_lyapunov(-np.eye(2), 2.0 * np.eye(2))
        assert np.abs(P - np.eye(2)).max() <= 1e-14

    def test_hand_solved_system(self):
        # three unknowns (p11, p12, p22) solved by hand for the
        # companion matrix [[0, 1], [-2, -3]] against Q = I
        P = solve_lyapunov(np.array([[0.0, 1.0], [-2.0, -3.0]]), np.eye(2))
        expected = np.array([[1.25, 0.25], [0.25, 0.25]])
        assert np.abs(P - expected).max() <= 1e-12

    def test_random_stable_systems(self):
        rng = np.random.default_rng(7)
        for _ in range(100):
            A = random_stable(rng)
            G = rng.standard_normal((2, 2))
            Q = G @ G.T + 0.1 * np.eye(2)
            P = solve_lyapunov(A, Q)
            assert np.abs(P - P.T).max() <= SYM_TOL
            assert np.abs(A.T @ P + P @ A + Q).max() <= LYAP_RES
            # positive-definiteness via sampled quadratic forms
            for _ in range(5):
                x = rng.standard_normal(2)
                if np.abs(x).max() > 1e-6:
                    assert x @ P @ x > 0.0

    def test_matches_scipy_in_three_dimensions(self):
        rng = np.random.default_rng(99)
        A = random_stable(rng, n=3)
        G = rng.standard_normal((3, 3))
        Q = G @ G.T + 0.5 * np.eye(3)
        P = solve_lyapunov(A, Q)
        P_ref = scipy.linalg.solve_lyapunov(A.T, -Q)
        assert np.abs(P - P_ref).max() <= 1e-9

    def test_rejects_unstable_a(self):
        with pytest.raises(NotHurwitz):
            solve_lyapunov(np.eye(2), np.eye(2))

    def test_rejects_asymmetric_q(self):
        with pytest.raises(ValueError):
            solve_lyapunov(-np.eye(2), np.array([[1.0, 0.5], [0.0, 1.0]]))


class TestSolveCare:
    def test_double_integrator(self):
        # classic closed form: K = [1, sqrt(3)], P = [[sqrt(3), 1], [1, sqrt(3)]]
        A = np.array([[0.0, 1.0], [0.0, 0.0]])
        B = np.array([[0.0], [1.0]])
        P = solve_care(A, B, np.eye(2), np.array([[1.0]]))
        K = (B.T @ P)[0]
        assert abs(K[0] - 1.0) <= 1e-6
        assert abs(K[1] - np.sqrt(3.0)) <= 1e-6
        res = A.T @ P + P @ A - P @ B @ B.T @ P + np.eye(2)
        assert np.abs(res).max() <= CARE_RES
        assert is_hurwitz(A - B @ (B.T @ P))

    def test_zero_input_matrix_rejected(self):
        with pytest.raises(NoStabilizingSolution):
            solve_care(-np.eye(2), np.zeros((2, 1)), np.eye(2), np.array([[1.0]]))

    def test_matches_scipy_on_flight_model(self):
        B0 = B_FWD.copy()
        B0[0, 0] = 0.0
        Qw = np.diag([1.0, 0.01])
        Rw = np.array([[1.0]])
        P = solve_care(A_FWD, B0, Qw, Rw)
        P_ref = scipy.linalg.solve_continuous_are(A_FWD, B0, Qw, Rw)
        assert np.abs(P - P_ref).max() <= 1e-10

    def test_default_design_poles_left_of_minus_two(self):
        B0 = B_FWD.copy()
        B0[0, 0] = 0.0
        P = solve_care(A_FWD, B0, np.diag([1.0, 0.01]), np.array([[1.0]]))
        K = B0.T @ P
        roots = eig2(A_FWD - B0 @ K)
        assert all(r.real <= -2.0 for r in roots)

    def test_random_stabilizable_systems(self):
        rng = np.random.default_rng(31)
        for _ in range(20):
            A = rng.standard_normal((2, 2)) * 2.0
            B = rng.standard_normal((2, 1))
            if np.abs(B).max() < 0.1:
                continue
            P = solve_care(A, B, np.eye(2), np.array([[1.0]]))
            P_ref = scipy.linalg.solve_continuous_are(A, B, np.eye(2), np.array([[1.0]]))
            scale = max(1.0, np.abs(P_ref).max())
            assert np.abs(P - P_ref).max() <= 1e-8 * scale


class TestRk4Step:
    def test_zero_field_is_identity(self):
        s = np.array([1.0, -2.0, 3.0])
        out = rk4_step(lambda t, x: np.zeros(3), 0.0, s, 0.5)
        assert np.array_equal(out, s)

    def test_scalar_decay_truncated_series(self):
        # 1 - 0.1 + 0.005 - 1/6000 + 1/240000 = 0.90483750 exactly
        out = rk4_step(lambda t, x: -x, 0.0, 1.0, 0.1)
        assert out == pytest.approx(0.9048375, abs=1e-12)

    def test_empirical_order_at_least_3_9(self):
        lam = -1.3
        errors = []
        for h in (0.1, 0.05, 0.025):
            out = rk4_step(lambda t, x: lam * x, 0.0, 1.0, h)
            errors.append(abs(out - np.exp(lam * h)))
        orders = [np.log2(errors[i] / errors[i + 1]) for i in range(2)]
        assert min(orders) >= 3.9

    def test_rejects_nonpositive_step(self):
        with pytest.raises(ValueError):
            rk4_step(lambda t, x: x, 0.0, 1.0, 0.0)
