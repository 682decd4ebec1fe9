import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sphconv.errors import (
    DegenerateFitError,
    DomainError,
    InsufficientDataError,
    PoleError,
)
from sphconv.kernel import DEFAULT_ORACLE_QUADRATURE, KernelParams, xi_hat_quadrature
from sphconv.multiplier import (
    MultiplierSample,
    RegionQuery,
    _m_paper_misparsed,
    decay_exponent_predicted,
    decay_slope_fit,
    hl_admissible,
    m_paper,
    m_reference,
    peak_samples,
    region_main,
    region_one_dim,
    region_strichartz,
)

# frozen from the 50-digit closed-form evaluation (same source as the
# quadrature-oracle goldens, which the oracle reproduces to ~1e-10)
M_REFERENCE_GOLDEN = [
    (0.6, 1.0, 0.1082222474041353772215539),
    (0.75, 1.0, 1.050614447278415714450405),
    (0.75, 2.0, -2.523825810520705601544514),
    (0.9, 5.0, 3.661678696660964460007147),
    (0.8, 10.0, -2.115544568305648565338782),
]

M_REFERENCE_DC = [
    (0.75, 7.416298709205487673735401),
    (0.6, 11.90579821620370965319782),
    (0.9, 11.90579821620370965319782),
]


def q(p, qq, alpha=0.9, n=1):
    return RegionQuery(p=p, q=qq, params=KernelParams(alpha, n))


class TestMReference:
    @pytest.mark.parametrize("alpha,s,expected", M_REFERENCE_GOLDEN)
    def test_golden_values(self, alpha, s, expected):
        got = m_reference(KernelParams(alpha, 1), s)
        assert got == pytest.approx(expected, rel=1e-10)

    @pytest.mark.parametrize("alpha,expected", M_REFERENCE_DC)
    def test_dc_limit(self, alpha, expected):
        got = m_reference(KernelParams(alpha, 1), 0.0)
        assert got == pytest.approx(expected, rel=1e-12)

    def test_evenness(self):
        params = KernelParams(0.75, 1)
        assert m_reference(params, -3.0) == m_reference(params, 3.0)

    def test_continuity_at_zero(self):
        # approach rate is the cusp order s^(2 alpha - 1), not smooth
        params = KernelParams(0.8, 1)
        v0 = m_reference(params, 0.0)
        gap_coarse = abs(m_reference(params, 1e-4) - v0)
        gap_fine = abs(m_reference(params, 1e-6) - v0)
        assert m_reference(params, 1e-10) == pytest.approx(v0, rel=1e-5)
        assert gap_fine == pytest.approx(gap_coarse * 10.0 ** (-2 * 0.6), rel=1e-2)

    def test_poles_and_domain(self):
        with pytest.raises(DomainError):
            m_reference(KernelParams(0.75, 2), 1.0)
        with pytest.raises(PoleError):
            m_reference(KernelParams(0.5, 1), 1.0)  # alpha - 1/2 integer
        with pytest.raises(PoleError):
            m_reference(KernelParams(1.0, 1), 1.0)  # gamma pole

    def test_matches_oracle_with_unit_ratio(self):
        for alpha in (0.6, 0.75, 0.9):
            params = KernelParams(alpha, 1)
            for s in (0.5, 1.0, 2.0, 5.0):
                oracle = xi_hat_quadrature(params, s, DEFAULT_ORACLE_QUADRATURE)
                assert oracle / m_reference(params, s) == pytest.approx(1.0, abs=1e-6)

    def test_array_input(self):
        params = KernelParams(0.75, 1)
        s = np.array([0.0, 0.5, 1.0, 20.0, 150.0])
        vals = m_reference(params, s)
        assert vals.shape == s.shape
        assert vals[2] == m_reference(params, 1.0)


class TestMPaper:
    def test_real_and_even(self):
        params = KernelParams(0.75, 1)
        v = m_paper(params, 2.5)
        assert isinstance(v, float) and math.isfinite(v)
        assert m_paper(params, -2.5) == v

    def test_finite_limit_at_zero(self):
        # alpha > n/2: finite limit, reached at the cusp rate s^(2 alpha - n)
        params = KernelParams(0.75, 1)
        v0 = m_paper(params, 0.0)
        assert math.isfinite(v0)
        assert m_paper(params, 1e-12) == pytest.approx(v0, rel=1e-5)

    def test_no_zero_limit_below_half_dimension(self):
        with pytest.raises(DomainError):
            m_paper(KernelParams(0.4, 1), 0.0)

    def test_identically_zero_at_endpoint_order(self):
        # alpha = (n+1)/2 with n = 2 passes the pole guard but the cot
        # factor vanishes, wiping out the whole form
        params = KernelParams(1.5, 2)
        s = np.linspace(0.5, 40.0, 101)
        assert np.max(np.abs(m_paper(params, s))) <= 1e-14

    def test_guard_poles(self):
        with pytest.raises(PoleError):
            m_paper(KernelParams(1.0, 1), 1.0)  # alpha positive integer
        with pytest.raises(PoleError):
            m_paper(KernelParams(0.5, 1), 1.0)  # n/2 - alpha integer

    def test_ratio_to_oracle_is_not_constant(self):
        params = KernelParams(0.75, 1)
        r = [
            xi_hat_quadrature(params, s, DEFAULT_ORACLE_QUADRATURE) / m_paper(params, s)
            for s in (0.5, 5.0)
        ]
        assert abs(r[0] - r[1]) > 0.1 * abs(r[1])

    def test_misparsed_prefactor_drifts_even_more(self):
        params = KernelParams(0.75, 1)
        r = [
            xi_hat_quadrature(params, s, DEFAULT_ORACLE_QUADRATURE)
            / _m_paper_misparsed(params, s)
            for s in (0.5, 5.0)
        ]
        assert abs(r[0] - r[1]) > 0.1 * abs(r[1])


class TestDecayMachinery:
    def test_predicted_exponents(self):
        assert decay_exponent_predicted(KernelParams(1.0, 1)) == pytest.approx(0.5)
        assert decay_exponent_predicted(KernelParams(2.0, 3)) == pytest.approx(0.5)
        assert decay_exponent_predicted(KernelParams(1.5, 2)) == pytest.approx(0.5)

    def test_exact_power_law(self):
        s = np.logspace(0.0, 3.0, 40)
        samples = [MultiplierSample(float(sv), float(3.0 * sv**-0.5)) for sv in s]
        fit = decay_slope_fit(samples)
        assert fit.exponent == pytest.approx(-0.5, abs=1e-6)
        assert fit.constant == pytest.approx(3.0, rel=1e-6)

    def test_constant_samples(self):
        s = np.logspace(0.0, 2.5, 30)
        fit = decay_slope_fit([MultiplierSample(float(sv), 2.0) for sv in s])
        assert fit.exponent == pytest.approx(0.0, abs=1e-6)

    def test_insufficient_data(self):
        s = np.logspace(0.0, 3.0, 10)
        with pytest.raises(InsufficientDataError):
            decay_slope_fit([MultiplierSample(float(sv), 1.0) for sv in s])
        s = np.linspace(1.0, 9.0, 30)  # one decade only
        with pytest.raises(InsufficientDataError):
            decay_slope_fit([MultiplierSample(float(sv), 1.0) for sv in s])

    def test_degenerate_fit(self):
        s = np.logspace(0.0, 3.0, 30)
        with pytest.raises(DegenerateFitError):
            decay_slope_fit([MultiplierSample(float(sv), 1e-15) for sv in s])

    @pytest.mark.parametrize(
        "n,alpha,true_slope",
        [(1, 0.8, -0.2), (1, 0.9, -0.1), (2, 1.3, -0.2), (3, 1.8, -0.2)],
    )
    def test_peak_fit_recovers_actual_decay(self, n, alpha, true_slope):
        # the implemented closed forms decay like s^(alpha - (n+1)/2); the
        # tabulated exponent from decay_exponent_predicted matches this only
        # at alpha = n/2 + 1/3 (see the acceptance suite for the comparison)
        params = KernelParams(alpha, n)
        fn = (lambda s: m_reference(params, s)) if n == 1 else (lambda s: m_paper(params, s))
        fit = decay_slope_fit(peak_samples(fn, 10.0, 1000.0))
        assert fit.exponent == pytest.approx(true_slope, abs=0.05)

    def test_peak_samples_are_local_maxima(self):
        params = KernelParams(0.75, 1)
        samples = peak_samples(lambda s: m_reference(params, s), 10.0, 200.0)
        assert len(samples) >= 20
        for m in samples[:10]:
            eps = 1e-4
            center = abs(m_reference(params, m.s))
            assert center >= abs(m_reference(params, m.s - eps)) - 1e-12
            assert center >= abs(m_reference(params, m.s + eps)) - 1e-12


class TestRegionPredicates:
    def test_hl_examples(self):
        assert hl_admissible(0.5, q(4.0 / 3.0, 4.0)) is True
        assert hl_admissible(0.3, q(2.0, 2.0)) is False
        assert hl_admissible(0.5, q(1.0, 4.0)) is False  # p = 1 excluded
        with pytest.raises(DomainError):
            hl_admissible(1.5, q(4.0 / 3.0, 4.0, n=1))
        with pytest.raises(DomainError):
            hl_admissible(0.0, q(4.0 / 3.0, 4.0))

    def test_region_main_examples(self):
        assert region_main(q(4.0 / 3.0, 4.0, alpha=1.0)) is True  # boundary equality
        assert region_main(q(2.0, 2.0, alpha=1.3, n=2)) is True
        with pytest.raises(DomainError):
            region_main(q(2.0, 2.0, alpha=0.7))

    def test_region_strichartz_examples(self):
        assert region_strichartz(q(2.0, 2.0, alpha=1.0)) is True
        assert region_strichartz(q(4.0 / 3.0, 4.0, alpha=2.0, n=3)) is False
        with pytest.raises(DomainError):
            region_strichartz(q(2.0, 2.0, alpha=-0.1))

    def test_region_one_dim_examples(self):
        assert region_one_dim(q(4.0 / 3.0, 4.0, alpha=0.5)) is True  # sharp pair
        assert region_one_dim(q(2.0, 2.0, alpha=1.0)) is True
        assert region_one_dim(q(1.2, 3.0, alpha=0.5)) is True  # dual segment
        assert region_one_dim(q(1.9, 5.0, alpha=0.5)) is False
        with pytest.raises(DomainError):
            region_one_dim(q(2.0, 2.0, alpha=1.2))
        with pytest.raises(DomainError):
            region_one_dim(q(2.0, 2.0, alpha=0.9, n=2))

    def test_query_validation(self):
        with pytest.raises(DomainError):
            RegionQuery(p=0.5, q=2.0, params=KernelParams(0.9, 1))
        with pytest.raises(DomainError):
            RegionQuery(p=2.0, q=float("inf"), params=KernelParams(0.9, 1))

    @given(
        st.floats(min_value=0.7501, max_value=1.0),
        st.floats(min_value=1.01, max_value=2.0),
        st.floats(min_value=2.0, max_value=40.0),
    )
    def test_main_region_nests_in_admissible_family(self, alpha, p, qq):
        # any accepted cell with a positive index gap is admissible at the
        # exponent a = n (1/p - 1/q) <= 2 alpha - 3/2
        query = q(p, qq, alpha=alpha)
        try:
            accepted = region_main(query)
        except DomainError:
            return
        gap = 1.0 / p - 1.0 / qq
        if not accepted or gap <= 1e-9:
            return
        assert gap <= 2.0 * alpha - 1.5 + 1e-12
        assert hl_admissible(gap, query) is True

    @given(st.floats(min_value=0.5, max_value=1.0), st.floats(min_value=0.0, max_value=1.0))
    def test_segment_duality(self, alpha, frac):
        # if (p, q) sits on the first segment then (q', p') sits on the dual
        # one whenever it lands inside the dual p-interval
        p_lo = 2.0 / (2.0 - alpha)
        p = p_lo + frac * (2.0 - p_lo)
        rq = alpha - 1.0 / p
        if rq <= 1e-9:
            return
        qq = 1.0 / rq
        if not region_one_dim(q(p, qq, alpha=alpha)):
            return
        p_dual = qq / (qq - 1.0)
        q_dual = p / (p - 1.0)
        if not (1.0 / (1.5 - alpha) - 1e-12 <= p_dual <= 2.0 / (2.0 - alpha) + 1e-12):
            return
        assert region_one_dim(q(p_dual, q_dual, alpha=alpha)) is True

    def test_sweep_monotone_in_q(self):
        params = KernelParams(0.9, 1)
        p = 1.5
        verdicts = [
            region_main(RegionQuery(p=p, q=qq, params=params)) for qq in (2.0, 2.5, 3.0, 4.0)
        ]
        # region is a <= constraint on 1/p - 1/q: once it fails it stays failed
        assert verdicts == sorted(verdicts, reverse=True)
