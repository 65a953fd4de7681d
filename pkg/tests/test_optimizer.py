"""Optimizer behavior on analytic toy objectives.

The rate objective gets its own tests; here the expected optima are known
in closed form (constant, 1-D circle, separable cosines, linear trace),
so convergence targets need no numerical oracle.
"""

import numpy as np
import pytest

from unisym.manifold import (
    GeodesicFrame,
    UsPoint,
    as_matrix,
    u_random,
    us_random,
)
from unisym.optimizer import (
    IterationTrace,
    Objective,
    OptimizerConfig,
    optimize_u_armijo,
    optimize_us,
    phase_sweep,
)


class ConstantObjective(Objective):
    def eval(self, point):
        return 3.0

    def euclid_grad(self, point):
        n = as_matrix(point).shape[0]
        return np.zeros((n, n), dtype=complex)


class CircleObjective(Objective):
    """f(U) = Re(U) on the 1x1 manifold (the unit circle); max at U = 1."""

    def eval(self, point):
        return float(np.real(as_matrix(point)[0, 0]))

    def euclid_grad(self, point):
        return np.array([[1.0 + 0j]])


class WrongGradientObjective(CircleObjective):
    def euclid_grad(self, point):
        return np.array([[2.0 + 0j]])


class SeparableCosine(Objective):
    """sum_m cos(theta_m - a_m), with phases read off the diagonal."""

    def __init__(self, a):
        self.a = np.asarray(a, dtype=float)

    def eval(self, point):
        th = np.angle(np.diag(as_matrix(point)))
        return float(np.sum(np.cos(th - self.a)))

    def euclid_grad(self, point):
        raise NotImplementedError("sweep-only stub")


class LinearTrace(Objective):
    """f(U) = Re tr(A^H U) for a fixed symmetric A; gradient is A."""

    def __init__(self, A):
        self.A = A

    def eval(self, point):
        return float(np.real(np.trace(self.A.conj().T @ as_matrix(point))))

    def euclid_grad(self, point):
        return self.A


class TestOptimizeUs:
    def test_constant_objective_single_iteration(self):
        P0 = us_random(4, seed=0)
        P, tr = optimize_us(ConstantObjective(), P0)
        assert tr.status == "converged"
        assert tr.iterations == 1
        assert np.array_equal(P.U, P0.U)

    def test_circle_converges_to_one(self):
        for seed in range(5):
            P0 = us_random(1, seed=seed)
            P, tr = optimize_us(CircleObjective(), P0)
            assert tr.status == "converged"
            assert abs(P.U[0, 0] - 1.0) < 1e-3
            assert tr.is_monotone()
            assert tr.final_grad_norm < 1e-4

    def test_linear_trace_ascends(self):
        rng = np.random.default_rng(23)
        B = (rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))) / np.sqrt(2)
        A = B + B.T
        obj = LinearTrace(A)
        P0 = us_random(4, seed=7)
        P, tr = optimize_us(obj, P0, OptimizerConfig(epsilon=1e-6, max_iters=50))
        assert tr.is_monotone()
        assert tr.status == "converged"
        assert tr.final_value > tr.values[0]
        assert all(r.residual <= 1e-8 for r in tr.records)

    def test_max_iters_status(self):
        P0 = us_random(1, seed=3)
        P, tr = optimize_us(CircleObjective(), P0, OptimizerConfig(max_iters=1))
        assert tr.status in ("max_iters", "converged")
        assert tr.iterations == 1

    def test_gradient_audit_flags_bad_gradient(self):
        P0 = us_random(1, seed=5)
        cfg = OptimizerConfig(check_gradient=True)
        with pytest.raises(ValueError, match="inconsistent"):
            optimize_us(WrongGradientObjective(), P0, cfg)

    def test_gradient_audit_accepts_good_gradient(self):
        P0 = us_random(1, seed=5)
        cfg = OptimizerConfig(check_gradient=True)
        P, tr = optimize_us(CircleObjective(), P0, cfg)
        assert tr.status == "converged"

    def test_off_manifold_start_rejected(self):
        bad = UsPoint(U=2 * np.eye(3, dtype=complex), Q=np.eye(3, dtype=complex))
        with pytest.raises(ValueError, match="manifold"):
            optimize_us(ConstantObjective(), bad)


class TestPhaseSweep:
    def test_constant_returns_theta0(self):
        Fr = GeodesicFrame(QR=np.eye(3, dtype=complex), theta=np.zeros(3))
        theta0 = np.array([0.3, -0.7, 0.1])
        out = phase_sweep(ConstantObjective(), Fr, theta0, OptimizerConfig())
        assert np.array_equal(out, theta0)

    def test_separable_cosine_recovers_targets(self):
        a = np.array([0.5, -1.2, 2.0, 0.3])
        obj = SeparableCosine(a)
        Fr = GeodesicFrame(QR=np.eye(4, dtype=complex), theta=np.zeros(4))
        out = phase_sweep(obj, Fr, np.zeros(4), OptimizerConfig())
        np.testing.assert_allclose(out, a, atol=0.02)
        assert 4.0 - float(np.sum(np.cos(out - a))) < 1e-6

    def test_length_mismatch(self):
        Fr = GeodesicFrame(QR=np.eye(3, dtype=complex), theta=np.zeros(3))
        with pytest.raises(ValueError):
            phase_sweep(ConstantObjective(), Fr, np.zeros(2), OptimizerConfig())


class TestOptimizeUArmijo:
    def test_zero_gradient_single_iteration(self):
        P0 = u_random(4, seed=11)
        P, tr = optimize_u_armijo(ConstantObjective(), P0)
        assert tr.status == "converged"
        assert tr.iterations == 1
        np.testing.assert_allclose(P.U, P0.U, atol=1e-14)

    def test_circle_converges_to_one(self):
        for seed in range(4):
            P0 = u_random(1, seed=seed)
            P, tr = optimize_u_armijo(CircleObjective(), P0,
                                      OptimizerConfig(epsilon=1e-8, max_iters=200))
            assert tr.is_monotone()
            assert abs(P.U[0, 0] - 1.0) < 1e-3
            assert all(r.residual <= 1e-8 for r in tr.records)

    def test_non_unitary_start_rejected(self):
        from unisym.manifold import UPoint
        with pytest.raises(ValueError, match="unitary"):
            optimize_u_armijo(ConstantObjective(), UPoint(U=2 * np.eye(2, dtype=complex)))


class TestConfig:
    def test_validation(self):
        with pytest.raises(ValueError):
            OptimizerConfig(epsilon=0.0)
        with pytest.raises(ValueError):
            OptimizerConfig(max_iters=0)
        with pytest.raises(ValueError):
            OptimizerConfig(sweeps_per_iter=0)
        with pytest.raises(ValueError):
            OptimizerConfig(fallback_grid=4)

    def test_trace_monotone_helper(self):
        tr = IterationTrace()
        from unisym.optimizer import IterationRecord
        for k, v in enumerate([1.0, 2.0, 2.0, 3.0]):
            tr.records.append(IterationRecord(k, v, 0.0, 0.0, 0.0, 0, 0.0))
        assert tr.is_monotone()
        tr.records.append(IterationRecord(4, 2.5, 0.0, 0.0, 0.0, 0, 0.0))
        assert not tr.is_monotone()
