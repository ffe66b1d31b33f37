import math

import numpy as np
import pytest
from scipy import special, stats as sps

from bigboss.errors import (
    DegenerateHistogram,
    EmptySample,
    InsufficientPoints,
    NonPositiveSample,
    NonPositiveThreshold,
    WindowTooLarge,
)
from bigboss.generator import GenConfig, run_sample
from bigboss.stats import (
    Histogram,
    LogNormalFit,
    RegressionFit,
    build_histogram,
    fit_lognormal_lsq,
    fit_lognormal_mle,
    fitting_histogram,
    kolmogorov_sf,
    ks_test,
    log_regression,
    lognormal_cdf,
    lognormal_pdf,
    lognormal_probability_le,
    moving_average_predict,
    normal_cdf,
    predict_p_le_1,
    smoothing_residual_sd,
    summarize_sample,
)
from conftest import load_table


@pytest.fixture(scope="module")
def published():
    return load_table("published_fits.csv")


class TestDistribution:
    def test_normal_cdf(self):
        for z in (-8, -1.5, 0, 0.3, 6):
            assert abs(normal_cdf(z) - sps.norm.cdf(z)) <= 1e-15

    def test_pdf_cdf_match_scipy(self):
        x = np.linspace(0.01, 5, 50)
        ref = sps.lognorm(s=0.3, scale=math.exp(-0.2))
        np.testing.assert_allclose(lognormal_pdf(x, -0.2, 0.3), ref.pdf(x), rtol=1e-12)
        np.testing.assert_allclose(lognormal_cdf(x, -0.2, 0.3), ref.cdf(x), rtol=1e-12)

    def test_probability_le(self):
        assert lognormal_probability_le(0.0, 1.0) == 0.5
        assert abs(lognormal_probability_le(0.095919, 0.22983) - 0.33821) <= 1e-3
        assert abs(lognormal_probability_le(0.0, 1.0, math.e) - sps.norm.cdf(1)) <= 1e-15
        with pytest.raises(NonPositiveThreshold):
            lognormal_probability_le(0.0, 1.0, 0.0)
        with pytest.raises(ValueError):
            lognormal_probability_le(0.0, 0.0)

    def test_derived_fields(self):
        f = LogNormalFit(0.3, 0.4, "lsq")
        d = sps.lognorm(s=0.4, scale=math.exp(0.3))
        assert abs(f.mean_hat - d.mean()) <= 1e-12
        assert abs(f.var_hat - d.var()) <= 1e-12
        assert abs(f.p_le_1 - d.cdf(1.0)) <= 1e-12

    def test_published_moment_identities(self, published):
        for row in published:
            f = LogNormalFit(row["mu_hat"], row["sigma_hat"], "lsq")
            assert abs(f.mean_hat - row["E"]) <= 1e-3
            assert abs(f.var_hat - row["V"]) <= 1e-3
            assert abs(f.p_le_1 - row["P_le_1"]) <= 1e-3


class TestHistogram:
    def test_example(self):
        h = build_histogram([1, 2, 3, 4], bins=3)
        np.testing.assert_allclose(h.edges, [1, 2, 3, 4])
        assert h.counts.tolist() == [1, 1, 2] and h.overflow == 0 and h.m == 4
        np.testing.assert_allclose(h.centers, [1.5, 2.5, 3.5])
        np.testing.assert_allclose(h.densities, [0.25, 0.25, 0.5])

    def test_densities_integrate_to_one(self):
        x = np.random.default_rng(0).lognormal(0, 0.5, 1000)
        h = build_histogram(x, 30)
        assert abs(np.sum(h.densities * h.widths) - 1) <= 1e-12

    def test_constant_sample(self):
        h = build_histogram([2.0] * 5, bins=4)
        assert h.counts.tolist() == [0, 0, 0, 5]
        assert np.all(h.widths == 1) and h.edges[-2] == 2.0

    def test_upper_cap_counts_overflow(self):
        h = build_histogram([1, 2, 3, 100], bins=2, upper=3)
        assert h.counts.sum() == 3 and h.overflow == 1 and h.m == 4
        # densities are relative to the whole sample
        assert abs(np.sum(h.densities * h.widths) - 0.75) <= 1e-12

    def test_fitting_histogram_caps_tail(self):
        x = np.concatenate([np.linspace(1, 2, 995), np.full(5, 1000.0)])
        h = fitting_histogram(x, 10)
        assert h.edges[-1] <= 2.0 + 1e-12 and h.overflow > 0

    def test_errors(self):
        with pytest.raises(EmptySample):
            build_histogram([])
        with pytest.raises(NonPositiveSample):
            build_histogram([1.0, 0.0])
        with pytest.raises(ValueError):
            build_histogram([1.0, 2.0], bins=0)


class TestFit:
    def test_recovers_exact_density(self):
        mu, sigma = 0.1, 0.23
        edges = np.linspace(0.3, 3.0, 51)
        centers = (edges[:-1] + edges[1:]) / 2
        m = 10**12
        counts = np.round(lognormal_pdf(centers, mu, sigma) * m * np.diff(edges)).astype(np.int64)
        h = Histogram(edges, counts, m - int(counts.sum()))
        f = fit_lognormal_lsq(h)
        assert abs(f.mu_hat - mu) <= 1e-3 and abs(f.sigma_hat - sigma) <= 1e-3
        assert f.sse < 1e-12 and f.method == "lsq"

    @pytest.mark.parametrize("mu,sigma", [(-0.6, 0.12), (0.0, 0.25), (0.2, 0.2)])
    def test_recovers_from_sample(self, mu, sigma):
        x = np.random.default_rng(7).lognormal(mu, sigma, 200_000)
        f = fit_lognormal_lsq(fitting_histogram(x))
        assert abs(f.mu_hat - mu) <= 0.01 and abs(f.sigma_hat - sigma) <= 0.01

    def test_degenerate(self):
        with pytest.raises(DegenerateHistogram):
            fit_lognormal_lsq(build_histogram([1.0, 1.0, 2.0], bins=5))

    def test_mle(self):
        x = np.random.default_rng(1).lognormal(0.5, 0.3, 10_000)
        f = fit_lognormal_mle(x)
        assert abs(f.mu_hat - np.log(x).mean()) <= 1e-12 and f.method == "mle"

    def test_three_player_study(self):
        run = run_sample(GenConfig(n=3, mu_scale=1000, rng_seed=0), 5000)
        row = summarize_sample(3, run.rhos)
        assert -0.70 <= row.fit.mu_hat <= -0.58
        assert 0.08 <= row.fit.sigma_hat <= 0.16
        assert row.empirical_frac == run.empirical_fraction_le_1


class TestKs:
    def test_kolmogorov_sf_matches_scipy(self):
        for lam in np.concatenate([np.linspace(0.05, 3, 60), [0.999, 1.0, 1.001]]):
            assert abs(kolmogorov_sf(lam) - special.kolmogorov(lam)) <= 1e-10
        assert kolmogorov_sf(0.0) == 1.0

    def test_statistic_matches_scipy(self):
        rng = np.random.default_rng(2)
        for _ in range(20):
            x = rng.lognormal(0.1, 0.4, 300)
            ours = ks_test(x, 0.0, 0.5)
            ref = sps.kstest(x, sps.lognorm(s=0.5, scale=1.0).cdf)
            assert abs(ours.d_stat - ref.statistic) <= 1e-12
            assert ours.m == 300

    def test_self_consistency(self):
        rng = np.random.default_rng(3)
        accepted = sum(ks_test(rng.lognormal(0.2, 0.3, 500), 0.2, 0.3).p_value > 0.05 for _ in range(100))
        assert accepted >= 90

    def test_point_mass(self):
        r = ks_test([1.0] * 200, 0.0, 0.3)
        assert abs(r.d_stat - 0.5) <= 1e-12 and r.p_value < 1e-10

    def test_permutation_invariant(self):
        x = np.random.default_rng(4).lognormal(0, 0.3, 100)
        assert ks_test(x, 0, 0.3) == ks_test(x[::-1], 0, 0.3)

    def test_p_decreasing_in_d(self):
        lams = np.linspace(0.1, 3, 100)
        p = [kolmogorov_sf(lam) for lam in lams]
        assert all(a >= b for a, b in zip(p, p[1:]))

    @pytest.mark.slow
    def test_fitted_vs_observed_fraction(self, published):
        # the published fits themselves have gaps of 0.089 and 0.116 at n=3 and n=4,
        # so the 0.08 bound applies from n=5; below that we track those gaps
        published = {int(r["n"]): r["P_le_1"] - r["empirical_frac"] for r in published}
        for n in range(3, 9):
            row = summarize_sample(n, run_sample(GenConfig(n=n, mu_scale=1000, rng_seed=0), 2000).rhos)
            gap = abs(row.fit.p_le_1 - row.empirical_frac)
            if n >= 5:
                assert gap < 0.08
            else:
                assert abs(gap - published[n]) < 0.03

    @pytest.mark.slow
    def test_ten_players(self):
        run = run_sample(GenConfig(n=10, mu_scale=1000, rng_seed=0), 500)
        row = summarize_sample(10, run.rhos)
        assert row.ks.p_value > 0.01


class TestRegression:
    def test_published_fits(self, published):
        reg = log_regression((int(r["n"]), r["mu_hat"]) for r in published)
        assert abs(reg.slope - 0.67) <= 0.01
        assert abs(reg.intercept + 1.313) <= 0.01
        assert abs(reg.r_squared - 0.9845) <= 0.002

    def test_exact_line(self):
        pts = [(n, 2 * math.log(n) - 1) for n in range(3, 9)]
        reg = log_regression(pts)
        assert abs(reg.slope - 2) <= 1e-12 and abs(reg.intercept + 1) <= 1e-12
        assert reg.r_squared == 1.0

    def test_residuals_sum_to_zero(self, published):
        pts = [(int(r["n"]), r["mu_hat"]) for r in published]
        reg = log_regression(pts)
        assert abs(sum(y - reg(n) for n, y in pts)) <= 1e-12

    def test_matches_scipy(self, published):
        pts = [(int(r["n"]), r["mu_hat"]) for r in published]
        ref = sps.linregress(np.log([p[0] for p in pts]), [p[1] for p in pts])
        reg = log_regression(pts)
        assert abs(reg.slope - ref.slope) <= 1e-12
        assert abs(reg.r_squared - ref.rvalue**2) <= 1e-12

    def test_insufficient(self):
        with pytest.raises(InsufficientPoints):
            log_regression([(3, 0.1), (4, 0.2)])
        with pytest.raises(InsufficientPoints):
            log_regression([(3, 0.1), (3, 0.2), (4, 0.3)])


class TestSmoothing:
    def test_example(self):
        smoothed, pred = moving_average_predict([1, 2, 3, 4, 5], 3)
        np.testing.assert_allclose(smoothed, [2, 3, 4])
        assert pred == 4.0

    def test_published_sigma_smoothing(self, published):
        _, pred = moving_average_predict([r["sigma_hat"] for r in published], 3)
        assert abs(pred - 0.21517) <= 1e-5

    def test_window_errors(self):
        with pytest.raises(WindowTooLarge):
            moving_average_predict([1.0, 2.0], 3)
        with pytest.raises(ValueError):
            moving_average_predict([1.0, 2.0], 0)

    def test_residual_sd(self):
        assert smoothing_residual_sd([1, 1, 1, 1]) == 0.0
        # residuals of value minus trailing mean are 1, 1, 1
        assert smoothing_residual_sd([1, 2, 3, 4, 5]) <= 1e-15
        assert smoothing_residual_sd([0, 0, 3, 0, 0], window=3) > 0


class TestPrediction:
    def test_published_predictions(self, published):
        reg = log_regression((int(r["n"]), r["mu_hat"]) for r in published)
        _, sigma = moving_average_predict([r["sigma_hat"] for r in published], 3)
        for row in load_table("published_predictions.csv"):
            n = int(row["n"])
            assert abs(predict_p_le_1(n, reg, sigma) - row["P_le_1"]) <= 1e-3
            # the published mu column follows the coefficients rounded to 0.67 and -1.313;
            # the unrounded fit sits just over 1e-3 below it
            assert 1.0e-3 < row["mu_hat"] - reg(n) < 1.1e-3
            rounded = RegressionFit(0.67, -1.313, reg.r_squared)
            assert abs(rounded(n) - row["mu_hat"]) <= 1e-5
            assert abs(predict_p_le_1(n, rounded, 0.21517) - row["P_le_1"]) <= 1e-5

    def test_published_coefficients(self):
        reg = RegressionFit(0.67, -1.313, 1.0)
        assert abs(reg(12) - 0.35189) <= 1e-4
        assert abs(predict_p_le_1(12, reg, 0.21517) - 0.05098) <= 1e-4
        assert abs(reg(15) - 0.50139) <= 1e-4
        assert abs(predict_p_le_1(15, reg, 0.21517) - 0.00990) <= 1e-4
        assert predict_p_le_1(7, RegressionFit(0.0, 0.0, 1.0), 0.3) == 0.5

    def test_sigma_must_be_positive(self, published):
        reg = log_regression((int(r["n"]), r["mu_hat"]) for r in published)
        with pytest.raises(ValueError):
            predict_p_le_1(12, reg, 0.0)
