import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats
from sklearn.base import clone

from privspec.privacy import (
    NO_PRIVACY,
    LaplacePrivatizer,
    PrivacyParams,
    TruncationPolicy,
    laplace_inverse_cdf,
    laplace_sample,
    privatize,
    truncate,
    verify_privacy_ratio,
)

finite_floats = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False)


class TestPrivacyParams:
    def test_rejects_bad_alpha(self):
        for alpha in (0.0, -1.0, math.nan):
            with pytest.raises(ValueError, match="alpha"):
                PrivacyParams(alpha, 4.0)

    def test_rejects_bad_tau(self):
        for tau in (0.0, -2.0, math.inf, math.nan):
            with pytest.raises(ValueError, match="tau"):
                PrivacyParams(2.5, tau)

    def test_noise_scale_and_variance(self):
        p = PrivacyParams(2.5, 4.0)
        assert p.noise_scale == pytest.approx(3.2, abs=1e-15)
        assert p.variance_offset == pytest.approx(20.48, abs=1e-12)
        assert PrivacyParams(5.0, 4.0).variance_offset == pytest.approx(5.12, abs=1e-12)

    def test_penalty_factor(self):
        assert PrivacyParams(2.5, 4.0).penalty_factor == pytest.approx(6.5536, abs=1e-12)
        # tau^4/alpha^4 = 256/625 < 1 clamps to 1
        assert PrivacyParams(5.0, 4.0).penalty_factor == 1.0

    def test_no_privacy_sentinel(self):
        p = PrivacyParams(NO_PRIVACY, 4.0)
        assert not p.is_private
        assert p.noise_scale == 0.0
        assert p.variance_offset == 0.0
        assert p.penalty_factor == 1.0


class TestTruncationPolicy:
    def test_fixed_threshold(self):
        policy = TruncationPolicy.fixed(4.0)
        assert policy.threshold(10) == 4.0
        assert policy.threshold(10**6) == 4.0

    def test_theoretical_threshold(self):
        policy = TruncationPolicy.theoretical(2.0)
        assert policy.threshold(1000) == pytest.approx(
            math.sqrt(56.0 * 2.0 * math.log(1000)), abs=1e-12
        )

    def test_theoretical_needs_length_at_least_two(self):
        with pytest.raises(ValueError, match="n"):
            TruncationPolicy.theoretical(1.0).threshold(1)

    def test_invalid_combinations(self):
        with pytest.raises(ValueError):
            TruncationPolicy(mode="fixed", tau=4.0, nu=1.0)
        with pytest.raises(ValueError):
            TruncationPolicy(mode="theoretical", tau=4.0)
        with pytest.raises(ValueError, match="mode"):
            TruncationPolicy(mode="clip", tau=4.0)
        with pytest.raises(ValueError, match="nu"):
            TruncationPolicy.theoretical(-1.0)


class TestTruncate:
    def test_clamps_to_threshold(self):
        np.testing.assert_array_equal(
            truncate(np.array([-5.0, 0.0, 5.0]), 4.0), np.array([-4.0, 0.0, 4.0])
        )

    def test_identity_inside_range(self):
        x = np.array([-3.9, 0.2, 3.9])
        np.testing.assert_array_equal(truncate(x, 4.0), x)

    def test_boundary(self):
        np.testing.assert_array_equal(
            truncate(np.array([4.0001, -4.0001]), 4.0), np.array([4.0, -4.0])
        )

    def test_rejects_nonpositive_tau(self):
        with pytest.raises(ValueError, match="tau"):
            truncate(np.array([1.0]), 0.0)

    @given(
        st.lists(finite_floats, min_size=1, max_size=30),
        st.floats(min_value=1e-3, max_value=1e3),
    )
    def test_idempotent(self, values, tau):
        once = truncate(np.array(values), tau)
        np.testing.assert_array_equal(truncate(once, tau), once)
        assert np.all(np.abs(once) <= tau)


class TestLaplaceSampling:
    def test_inverse_cdf_closed_form(self):
        assert laplace_inverse_cdf(0.0, 1.0) == 0.0
        # oracle: -ln(1 - 2*0.25) = ln 2
        assert laplace_inverse_cdf(0.25, 1.0) == pytest.approx(math.log(2.0), abs=1e-15)
        assert laplace_inverse_cdf(-0.25, 1.0) == pytest.approx(-math.log(2.0), abs=1e-15)
        assert laplace_inverse_cdf(0.25, 3.0) == pytest.approx(3.0 * math.log(2.0), abs=1e-14)

    def test_inverse_cdf_rejects_out_of_range(self):
        with pytest.raises(ValueError, match="u"):
            laplace_inverse_cdf(0.5, 1.0)
        with pytest.raises(ValueError, match="scale"):
            laplace_inverse_cdf(0.25, 0.0)

    def test_sample_moments(self):
        b = 1.6
        draws = laplace_sample(b, np.random.default_rng(11), size=10**6)
        # CLT bound: 4 standard errors of the mean, sd = b*sqrt(2)
        assert abs(draws.mean()) < 4.0 * b * math.sqrt(2.0) / 1e3
        assert draws.var() == pytest.approx(2.0 * b * b, rel=0.02)

    def test_sample_determinism_and_scalar(self):
        a = laplace_sample(2.0, np.random.default_rng(3), size=5)
        b = laplace_sample(2.0, np.random.default_rng(3), size=5)
        np.testing.assert_array_equal(a, b)
        single = laplace_sample(2.0, np.random.default_rng(3))
        assert isinstance(single, float)
        assert single == a[0]

    def test_absolute_value_is_exponential(self):
        # |Laplace(b)| has the exponential distribution with scale b
        b = 3.2
        draws = np.abs(laplace_sample(b, np.random.default_rng(19), size=10**5))
        result = stats.kstest(draws, "expon", args=(0.0, b))
        # 1% critical value of the Kolmogorov statistic for large samples
        assert result.statistic < 1.628 / math.sqrt(draws.size)


class TestPrivatize:
    def test_no_privacy_is_identity_and_consumes_no_randomness(self):
        x = np.array([-9.0, 0.5, 9.0])
        rng = np.random.default_rng(9)
        out = privatize(x, PrivacyParams(NO_PRIVACY, 4.0), rng)
        np.testing.assert_array_equal(out, x)
        assert out is not x
        assert rng.random() == np.random.default_rng(9).random()

    def test_noise_variance(self):
        params = PrivacyParams(5.0, 4.0)
        x = np.zeros(10**5)
        z = privatize(x, params, np.random.default_rng(21))
        # truncate(0) = 0, so z is pure noise with variance 2 b^2 = 5.12
        assert z.var() == pytest.approx(5.12, rel=0.03)

    def test_truncates_before_noising(self):
        params = PrivacyParams(1000000.0, 4.0)
        x = np.array([100.0, -100.0])
        z = privatize(x, params, np.random.default_rng(2))
        # at huge alpha the noise is tiny, exposing the clamped values
        np.testing.assert_allclose(z, [4.0, -4.0], atol=1e-3)

    def test_deterministic_given_seed(self):
        x = np.linspace(-6, 6, 50)
        params = PrivacyParams(2.5, 4.0)
        a = privatize(x, params, np.random.default_rng(33))
        b = privatize(x, params, np.random.default_rng(33))
        np.testing.assert_array_equal(a, b)


class TestVerifyPrivacyRatio:
    def test_identical_inputs(self):
        assert verify_privacy_ratio(PrivacyParams(2.5, 4.0), 1.3, 1.3) == 1.0

    def test_maximal_pair_reaches_bound_exactly(self):
        params = PrivacyParams(2.5, 4.0)
        assert verify_privacy_ratio(params, 4.0, -4.0) == math.exp(2.5)
        # clamping makes far-out pairs equivalent to the extreme pair
        assert verify_privacy_ratio(params, 100.0, -100.0) == math.exp(2.5)

    def test_hand_value(self):
        assert verify_privacy_ratio(PrivacyParams(2.5, 4.0), 1.0, 3.0) == pytest.approx(
            math.exp(0.625), abs=1e-12
        )

    def test_rejects_no_privacy(self):
        with pytest.raises(ValueError, match="NO_PRIVACY"):
            verify_privacy_ratio(PrivacyParams(NO_PRIVACY, 4.0), 0.0, 1.0)

    def test_grid_maximization_matches_analytic(self):
        # independent route: evaluate both conditional densities on a z-grid
        params = PrivacyParams(2.5, 4.0)
        b = params.noise_scale
        z = np.linspace(-(4.0 + 30.0 * b), 4.0 + 30.0 * b, 200001)
        for x, xp in [(1.0, 3.0), (-5.0, 5.0), (0.0, 0.7), (4.2, -0.1)]:
            xt = np.clip(x, -4.0, 4.0)
            xpt = np.clip(xp, -4.0, 4.0)
            num = np.exp(-np.abs(z - xt) / b)
            den = np.exp(-np.abs(z - xpt) / b)
            grid_max = np.max(num / den)
            assert abs(grid_max - verify_privacy_ratio(params, x, xp)) < 1e-6

    @given(finite_floats, finite_floats,
           st.floats(min_value=0.1, max_value=10.0),
           st.floats(min_value=0.1, max_value=10.0))
    def test_bounded_by_exp_alpha(self, x, xp, alpha, tau):
        ratio = verify_privacy_ratio(PrivacyParams(alpha, tau), x, xp)
        assert ratio <= math.exp(alpha) * (1.0 + 1e-12)


class TestLaplacePrivatizer:
    def test_transform_matches_function(self):
        x = np.linspace(-8, 8, 64)
        out = LaplacePrivatizer(alpha=2.5, tau=4.0, random_state=7).fit(x).transform(x)
        expected = privatize(x, PrivacyParams(2.5, 4.0), np.random.default_rng(7))
        np.testing.assert_array_equal(out, expected)

    def test_transform_is_pure(self):
        x = np.linspace(-8, 8, 64)
        privatizer = LaplacePrivatizer(alpha=5.0, tau=4.0, random_state=1).fit(x)
        np.testing.assert_array_equal(privatizer.transform(x), privatizer.transform(x))

    def test_clone_and_params_roundtrip(self):
        privatizer = LaplacePrivatizer(alpha=2.5, tau=1.0, random_state=5)
        cloned = clone(privatizer)
        assert cloned.get_params() == privatizer.get_params()

    def test_invalid_params_raise_on_fit(self):
        with pytest.raises(ValueError, match="alpha"):
            LaplacePrivatizer(alpha=-1.0, tau=4.0).fit(np.zeros(4))
