import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sphconv.errors import ConvergenceError, DomainError, SingularPointError
from sphconv.kernel import (
    DEFAULT_ORACLE_QUADRATURE,
    KernelParams,
    QuadratureConfig,
    gauss_jacobi_rule,
    phi_alpha,
    weak_l2_bound,
    xi_alpha,
    xi_hat_quadrature,
)

# frozen from a 50-digit evaluation of the closed-form transform
ORACLE_GOLDEN = [
    (0.6, 1.0, 0.1082222474041353772215539),
    (0.75, 1.0, 1.050614447278415714450405),
    (0.75, 2.0, -2.523825810520705601544514),
    (0.9, 5.0, 3.661678696660964460007147),
    (0.8, 10.0, -2.115544568305648565338782),
]


class TestKernelParams:
    def test_validation(self):
        with pytest.raises(DomainError):
            KernelParams(-0.5, 1)
        with pytest.raises(DomainError):
            KernelParams(0.0, 1)
        with pytest.raises(DomainError):
            KernelParams(0.5, 4)
        with pytest.raises(DomainError):
            KernelParams(0.5, 0)

    def test_guard_violation(self):
        assert KernelParams(1.0, 1).guard_violation() is not None  # gamma pole
        assert KernelParams(1.5, 1).guard_violation() is not None  # cot pole
        assert KernelParams(0.5, 2).guard_violation() is None  # 0.5 not a pole of gamma
        assert KernelParams(0.75, 1).guard_violation() is None
        assert KernelParams(1.3, 2).guard_violation() is None


class TestRadialKernels:
    def test_examples(self):
        p5 = KernelParams(0.5, 1)
        assert xi_alpha(p5, math.sqrt(2.0)) == pytest.approx(1.0, rel=1e-12)
        assert xi_alpha(p5, math.sqrt(5.0)) == pytest.approx(0.5, rel=1e-12)
        assert xi_alpha(KernelParams(0.7, 1), 0.5) == 0.0
        assert phi_alpha(p5, 0.0) == pytest.approx(1.0, rel=1e-12)
        assert phi_alpha(p5, math.sqrt(0.75)) == pytest.approx(2.0, rel=1e-12)
        assert phi_alpha(KernelParams(0.3, 1), 2.0) == 0.0

    def test_singular_point(self):
        with pytest.raises(SingularPointError):
            xi_alpha(KernelParams(0.5, 1), 1.0)
        with pytest.raises(SingularPointError):
            phi_alpha(KernelParams(0.5, 1), 1.0)
        with pytest.raises(DomainError):
            xi_alpha(KernelParams(0.5, 1), -0.5)

    @given(st.floats(min_value=0.0, max_value=10.0), st.floats(min_value=0.05, max_value=3.0))
    def test_support_dichotomy(self, r, alpha):
        if abs(r - 1.0) < 1e-9:
            return
        params = KernelParams(alpha, 1)
        xi = xi_alpha(params, r)
        phi = phi_alpha(params, r)
        assert xi * phi == 0.0
        assert not (xi != 0.0 and phi != 0.0)

    def test_monotone_decreasing_outside(self):
        params = KernelParams(0.8, 1)
        r = np.linspace(1.001, 50.0, 4001)
        vals = xi_alpha(params, r)
        assert np.all(np.diff(vals) < 0.0)


class TestWeakL2:
    def test_single_lambda(self):
        assert weak_l2_bound([1.0]) == pytest.approx(2.0 * (math.sqrt(2.0) - 1.0), rel=1e-12)

    def test_approaches_one_from_below(self):
        vals = [weak_l2_bound([lam]) for lam in (10.0, 100.0, 1000.0, 1e6)]
        assert all(v < 1.0 for v in vals)
        assert vals == sorted(vals)

    def test_sup_bounded_by_one(self):
        grid = np.logspace(-1, 3, 5000)
        assert weak_l2_bound(grid) <= 1.0

    def test_rejects_bad_grid(self):
        with pytest.raises(DomainError):
            weak_l2_bound([])
        with pytest.raises(DomainError):
            weak_l2_bound([0.0, 1.0])


class TestGaussJacobiRule:
    def test_weight_sums(self):
        for order in (1, 4, 16):
            _, w = gauss_jacobi_rule(0.5, order)
            assert w.sum() == pytest.approx(2.0, rel=1e-13)

    def test_legendre_degeneration(self):
        nodes, weights = gauss_jacobi_rule(0.0, 1)
        assert nodes[0] == pytest.approx(0.5, abs=1e-14)
        assert weights[0] == pytest.approx(1.0, rel=1e-14)

    def test_monomial_moments(self):
        nodes, weights = gauss_jacobi_rule(0.5, 8)
        for k in range(16):
            got = float(np.sum(weights * nodes**k))
            assert got == pytest.approx(1.0 / (k + 0.5), rel=1e-12)

    def test_invalid_inputs(self):
        with pytest.raises(DomainError):
            gauss_jacobi_rule(1.0, 8)
        with pytest.raises(DomainError):
            gauss_jacobi_rule(0.5, 0)


class TestXiHatQuadrature:
    @pytest.mark.parametrize("alpha,s,expected", ORACLE_GOLDEN)
    def test_golden_values(self, alpha, s, expected):
        got = xi_hat_quadrature(KernelParams(alpha, 1), s, DEFAULT_ORACLE_QUADRATURE)
        assert abs(got - expected) <= 1e-8

    def test_domain_errors(self):
        cfg = DEFAULT_ORACLE_QUADRATURE
        with pytest.raises(DomainError):
            xi_hat_quadrature(KernelParams(0.75, 2), 1.0, cfg)
        with pytest.raises(DomainError):
            xi_hat_quadrature(KernelParams(0.4, 1), 1.0, cfg)
        with pytest.raises(DomainError):
            xi_hat_quadrature(KernelParams(1.2, 1), 1.0, cfg)
        with pytest.raises(DomainError):
            xi_hat_quadrature(KernelParams(0.75, 1), 0.0, cfg)

    def test_stability_under_refinement(self):
        # halving the tail tolerance and doubling the panels moves the value
        # by less than the previously promised error estimate
        for alpha in (0.6, 0.75, 0.9):
            for s in (1.0, 5.0, 20.0):
                params = KernelParams(alpha, 1)
                base_cfg = QuadratureConfig(48, 64, 20.0, 1e-8)
                fine_cfg = QuadratureConfig(48, 128, 20.0, 5e-9)
                base = xi_hat_quadrature(params, s, base_cfg)
                fine = xi_hat_quadrature(params, s, fine_cfg)
                assert abs(base - fine) < base_cfg.tail_tol

    def test_envelope_decay_rate(self):
        # peak magnitudes fall like s^(alpha - 1) for n = 1 (alpha = 0.8:
        # slope -0.2); sampled at the oscillation maxima to dodge the zeros
        params = KernelParams(0.8, 1)
        cfg = DEFAULT_ORACLE_QUADRATURE
        peaks = []
        scan = np.arange(10.0, 200.0, math.pi / 8.0)
        from sphconv.multiplier import m_reference

        vals = np.abs(m_reference(params, scan))
        for i in range(1, len(scan) - 1):
            if vals[i] > vals[i - 1] and vals[i] > vals[i + 1]:
                peaks.append(scan[i])
        sampled = [(s, abs(xi_hat_quadrature(params, s, cfg))) for s in peaks[::2]]
        logs = np.log([s for s, _ in sampled])
        logv = np.log([v for _, v in sampled])
        slope = np.polyfit(logs, logv, 1)[0]
        assert slope == pytest.approx(-0.2, abs=0.05)

    def test_config_validation(self):
        with pytest.raises(DomainError):
            QuadratureConfig(jacobi_order=0)
        with pytest.raises(DomainError):
            QuadratureConfig(truncation_radius=1.5)
        with pytest.raises(DomainError):
            QuadratureConfig(tail_tol=0.5)
        with pytest.raises(DomainError):
            QuadratureConfig(tail_tol=0.0)

    def test_tail_cap_raises(self, monkeypatch):
        import sphconv.kernel as kernel_mod

        monkeypatch.setattr(kernel_mod, "_TAIL_MAX_SEGMENTS", 13)
        cfg = QuadratureConfig(8, 8, 20.0, 1e-9)
        with pytest.raises(ConvergenceError):
            xi_hat_quadrature(KernelParams(0.55, 1), 0.5, cfg)
