#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "spn/errors.hpp"
#include "spn/stats.hpp"

using namespace spn;

namespace {

BalancedTable table_from(const std::vector<std::vector<double>>& rows) {
    BalancedTable t(rows.size(), rows.front().size());
    for (std::size_t s = 0; s < rows.size(); ++s)
        for (std::size_t c = 0; c < rows[s].size(); ++c) t(s, c) = rows[s][c];
    return t;
}

std::vector<std::vector<double>> random_rows(std::size_t n, std::size_t J, std::mt19937_64& rng) {
    std::normal_distribution<double> z(0.0, 1.0);
    std::vector<std::vector<double>> y(n, std::vector<double>(J));
    for (auto& row : y)
        for (double& v : row) v = z(rng);
    return y;
}

// Simpson rule on the F(d1, d2) density over [0, f]; an even d1 keeps the
// integrand a smooth polynomial-times-power near the origin.
double f_tail_by_quadrature(double f, double d1, double d2) {
    const double log_beta = std::lgamma(d1 / 2) + std::lgamma(d2 / 2) - std::lgamma((d1 + d2) / 2);
    auto pdf = [&](double x) {
        if (x <= 0.0) return d1 == 2.0 ? 1.0 : 0.0;
        const double log_num = 0.5 * (d1 * std::log(d1 * x) + d2 * std::log(d2) - (d1 + d2) * std::log(d1 * x + d2));
        return std::exp(log_num - log_beta) / x;
    };
    const int steps = 200000;
    const double h = f / steps;
    double acc = pdf(0.0) + pdf(f);
    for (int k = 1; k < steps; ++k) acc += (k % 2 ? 4.0 : 2.0) * pdf(k * h);
    return 1.0 - acc * h / 3.0;
}

}  // namespace

TEST(FisherZ, KnownValuesAndSymmetry) {
    EXPECT_EQ(fisher_z(0.0), 0.0);
    EXPECT_NEAR(fisher_z(0.5), 0.5 * std::log(3.0), 1e-15);
    EXPECT_NEAR(fisher_z(0.5), 0.5493, 1e-4);
    for (double r : {0.01, 0.3, 0.77, 0.999})
        EXPECT_EQ(fisher_z(-r), -fisher_z(r));
}

TEST(FisherZ, DomainErrors) {
    EXPECT_THROW(fisher_z(1.0), DomainError);
    EXPECT_THROW(fisher_z(-1.0), DomainError);
    EXPECT_THROW(fisher_z(std::nan("")), DomainError);
}

TEST(FisherZ, MonotoneAndInvertible) {
    double previous = -std::numeric_limits<double>::infinity();
    for (int k = -999; k <= 999; ++k) {
        const double r = k / 1000.0;
        const double z = fisher_z(r);
        EXPECT_GT(z, previous);
        previous = z;
        EXPECT_NEAR(inverse_fisher_z(z), r, 1e-12);
    }
}

TEST(GrandMeanZTest, EqualMeansGiveZeroStatistic) {
    const std::vector<double> v{0.3, 0.1, 0.2};
    const TestResult r = grand_mean_z_test(v, 0.2, 0.5);
    EXPECT_NEAR(r.statistic, 0.0, 1e-15);
    EXPECT_NEAR(r.p_value, 1.0, 1e-15);
}

TEST(GrandMeanZTest, KnownStatistic) {
    const std::vector<double> v{1, 1, 1, 1};
    const TestResult r = grand_mean_z_test(v, 0.0, 1.0);
    EXPECT_DOUBLE_EQ(r.statistic, 2.0);
    // 2 * (1 - Phi(2)) from a 30-digit reference.
    EXPECT_NEAR(r.p_value, 0.0455002638963584144, 1e-12);
    EXPECT_EQ(r.effect_sign, Sign::positive);
    EXPECT_EQ(grand_mean_z_test(v, 2.0, 1.0).effect_sign, Sign::negative);
}

TEST(GrandMeanZTest, LargerSampleShrinksP) {
    const std::vector<double> small{0.4, 0.6, 0.5, 0.5};
    std::vector<double> large = small;
    large.insert(large.end(), small.begin(), small.end());
    EXPECT_LT(grand_mean_z_test(large, 0.3, 0.4).p_value, grand_mean_z_test(small, 0.3, 0.4).p_value);
}

TEST(GrandMeanZTest, Errors) {
    const std::vector<double> v{1, 2};
    EXPECT_THROW(grand_mean_z_test(v, 0.0, 0.0), DomainError);
    EXPECT_THROW(grand_mean_z_test(std::vector<double>{1.0}, 0.0, 1.0), DomainError);
}

TEST(FDistribution, ClosedFormForTwoNumeratorDof) {
    for (double d2 : {4.0, 8.0, 57.0})
        for (double f : {0.1, 1.0, 3.5, 12.0})
            EXPECT_NEAR(f_upper_tail(f, 2.0, d2), std::pow(1.0 + 2.0 * f / d2, -d2 / 2.0), 1e-12);
}

TEST(FDistribution, MatchesQuadrature) {
    for (auto [d1, d2] : {std::pair{4.0, 57.0}, std::pair{4.0, 12.0}, std::pair{6.0, 30.0}})
        for (double f : {0.5, 2.0, 4.0}) EXPECT_NEAR(f_upper_tail(f, d1, d2), f_tail_by_quadrature(f, d1, d2), 1e-9);
}

TEST(RepeatedMeasures, IdenticalColumnsGiveNoEffect) {
    const EdgeModelFit fit = repeated_measures_fit(table_from({{0.3, 0.3, 0.3}, {0.1, 0.1, 0.1}, {0.7, 0.7, 0.7}}));
    EXPECT_EQ(fit.f_statistic, 0.0);
    EXPECT_EQ(fit.p_value, 1.0);
    EXPECT_EQ(fit.trend_sign, Sign::zero);
}

TEST(RepeatedMeasures, ZeroResidualIsDegenerate) {
    const EdgeModelFit fit = repeated_measures_fit(table_from({{0, 1}, {0, 1}, {0, 1}}));
    EXPECT_TRUE(fit.degenerate);
    EXPECT_TRUE(std::isinf(fit.f_statistic));
    EXPECT_EQ(fit.p_value, 0.0);
    EXPECT_EQ(fit.trend_sign, Sign::positive);
    EXPECT_EQ(fit.residual_variance, 0.0);
}

TEST(RepeatedMeasures, EstimatesAndDegreesOfFreedom) {
    const EdgeModelFit fit = repeated_measures_fit(table_from({{1, 2, 4}, {2, 2, 5}, {0, 1, 3}, {1, 3, 4}}));
    ASSERT_EQ(fit.fixed_effects.size(), 3u);
    EXPECT_DOUBLE_EQ(fit.fixed_effects[0], 1.0);
    EXPECT_DOUBLE_EQ(fit.fixed_effects[1], 2.0);
    EXPECT_DOUBLE_EQ(fit.fixed_effects[2], 4.0);
    // Subject means 7/3, 3, 4/3, 8/3 around the grand mean 7/3.
    EXPECT_NEAR(fit.subject_intercepts[0], 0.0, 1e-15);
    EXPECT_NEAR(fit.subject_intercepts[1], 2.0 / 3.0, 1e-15);
    EXPECT_NEAR(fit.subject_intercepts[2], -1.0, 1e-15);
    EXPECT_NEAR(fit.subject_intercepts[3], 1.0 / 3.0, 1e-15);
    EXPECT_EQ(fit.dof.first, 2.0);
    EXPECT_EQ(fit.dof.second, 6.0);
    EXPECT_EQ(fit.trend_sign, Sign::positive);
    EXPECT_GE(fit.residual_variance, 0.0);
}

TEST(RepeatedMeasures, MatchesSumsOfSquaresOracle) {
    std::mt19937_64 rng(201);
    for (int rep = 0; rep < 100; ++rep) {
        const auto y = random_rows(5, 3, rng);
        const double expected = oracle::repeated_measures(y).f;
        EXPECT_NEAR(repeated_measures_fit(table_from(y)).f_statistic, expected, 1e-10 * std::max(1.0, expected));
    }
}

TEST(RepeatedMeasures, SubjectShiftInvariance) {
    std::mt19937_64 rng(202);
    std::uniform_real_distribution<double> shift(-3.0, 3.0);
    for (int rep = 0; rep < 50; ++rep) {
        auto y = random_rows(6, 4, rng);
        const double before = repeated_measures_fit(table_from(y)).f_statistic;
        for (auto& row : y) {
            const double c = shift(rng);
            for (double& v : row) v += c;
        }
        EXPECT_NEAR(repeated_measures_fit(table_from(y)).f_statistic, before, 1e-10 * std::max(1.0, before));
    }
}

TEST(RepeatedMeasures, ReversalFlipsTrendOnly) {
    std::mt19937_64 rng(203);
    for (int rep = 0; rep < 50; ++rep) {
        auto y = random_rows(5, 2 + static_cast<std::size_t>(rep % 4), rng);
        const EdgeModelFit forward = repeated_measures_fit(table_from(y));
        for (auto& row : y) std::reverse(row.begin(), row.end());
        const EdgeModelFit backward = repeated_measures_fit(table_from(y));
        EXPECT_NEAR(backward.f_statistic, forward.f_statistic, 1e-10 * std::max(1.0, forward.f_statistic));
        EXPECT_EQ(static_cast<int>(backward.trend_sign), -static_cast<int>(forward.trend_sign));
    }
}

TEST(RepeatedMeasures, LinearContrastIsExactlyAntisymmetric) {
    const std::vector<double> beta{0.1, 0.7, 0.2, 0.4, 0.3};
    const std::vector<double> rev(beta.rbegin(), beta.rend());
    EXPECT_EQ(linear_trend_contrast(beta), -linear_trend_contrast(rev));
    const std::vector<double> flat(4, 0.1);
    EXPECT_EQ(linear_trend_contrast(flat), 0.0);
}

TEST(RepeatedMeasures, MissingCellIsUnsupported) {
    BalancedTable t = table_from({{1, 2}, {3, 4}, {5, 6}});
    t(1, 1) = std::nan("");
    EXPECT_THROW(repeated_measures_fit(t), UnsupportedDesignError);
    EXPECT_THROW(repeated_measures_fit(table_from({{1, 2}})), DomainError);
}

TEST(BhFdr, StepUpExample) {
    const std::vector<double> p{0.005, 0.013, 0.02, 0.8};
    const FdrDecision d = bh_fdr(p, 0.05);
    EXPECT_EQ(d.rejected, (std::vector<bool>{true, true, true, false}));
    EXPECT_EQ(d.threshold_index, 3u);
}

TEST(BhFdr, AllOnesAndAllZeros) {
    EXPECT_EQ(bh_fdr(std::vector<double>(7, 1.0), 0.05).rejected_count(), 0u);
    EXPECT_EQ(bh_fdr(std::vector<double>(7, 0.0), 0.05).rejected_count(), 7u);
    EXPECT_TRUE(bh_fdr(std::vector<double>{}, 0.05).rejected.empty());
}

TEST(BhFdr, TiedPValuesShareTheDecision) {
    // Ranks 2 and 3 tie at 0.03; rank 3 passes (0.03 <= 3 * 0.05 / 4), so both go.
    const std::vector<double> p{0.03, 0.001, 0.03, 0.9};
    EXPECT_EQ(bh_fdr(p, 0.05).rejected, (std::vector<bool>{true, true, true, false}));
}

TEST(BhFdr, InvalidInput) {
    EXPECT_THROW(bh_fdr(std::vector<double>{0.2, 1.2}, 0.05), ValidationError);
    EXPECT_THROW(bh_fdr(std::vector<double>{0.2}, 0.0), ValidationError);
    EXPECT_THROW(bh_fdr(std::vector<double>{0.2}, 1.0), ValidationError);
}

TEST(BhFdr, MatchesOracleSupersetOfBonferroniAndMonotone) {
    std::mt19937_64 rng(204);
    std::uniform_int_distribution<std::size_t> size(1, 50);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int rep = 0; rep < 500; ++rep) {
        const std::size_t m = size(rng);
        std::vector<double> p(m);
        for (double& v : p) {
            const double x = u(rng);
            // Mix of tiny, coarse (tie-prone) and continuous values.
            v = rep % 3 == 0 ? std::round(x * 20.0) / 400.0 : (rep % 3 == 1 ? x * x * x * 0.1 : x);
        }
        const FdrDecision d = bh_fdr(p, 0.05);
        ASSERT_EQ(d.rejected, oracle::bh_rejections(p, 0.05));
        for (std::size_t h = 0; h < m; ++h)
            if (p[h] <= 0.05 / static_cast<double>(m)) EXPECT_TRUE(d.rejected[h]);
        const FdrDecision wider = bh_fdr(p, 0.1);
        for (std::size_t h = 0; h < m; ++h)
            if (d.rejected[h]) EXPECT_TRUE(wider.rejected[h]);
    }
}

TEST(Uncorrected, ComparesEachPValue) {
    const std::vector<double> p{0.005, 0.013, 0.02, 0.8};
    EXPECT_EQ(uncorrected(p, 0.015).rejected, (std::vector<bool>{true, true, false, false}));
}
