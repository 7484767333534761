#include "spn/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include <boost/math/distributions/fisher_f.hpp>

#include "spn/errors.hpp"
#include "spn/kernels.hpp"

namespace spn {
namespace {

void check_probabilities(std::span<const double> p) {
    for (double v : p)
        if (!(v >= 0.0 && v <= 1.0)) throw ValidationError("p-value outside [0, 1]: " + std::to_string(v));
}

void check_rate(double rate) {
    if (!(rate > 0.0 && rate < 1.0)) throw ValidationError("base rate must lie in (0, 1)");
}

}  // namespace

Sign sign_of(double x) noexcept {
    if (x > 0.0) return Sign::positive;
    if (x < 0.0) return Sign::negative;
    return Sign::zero;
}

std::size_t FdrDecision::rejected_count() const {
    return static_cast<std::size_t>(std::count(rejected.begin(), rejected.end(), true));
}

BalancedTable::BalancedTable(std::size_t subjects, std::size_t conditions)
    : n_(subjects), j_(conditions), values_(subjects * conditions, 0.0) {}

BalancedTable::BalancedTable(std::size_t subjects, std::size_t conditions, std::vector<double> values)
    : n_(subjects), j_(conditions), values_(std::move(values)) {
    if (values_.size() != n_ * j_) throw ValidationError("table size does not match subjects x conditions");
}

double fisher_z(double r) {
    if (!(std::abs(r) < 1.0)) throw DomainError("Fisher transform needs |r| < 1, got " + std::to_string(r));
    return std::atanh(r);
}

double inverse_fisher_z(double z) { return std::tanh(z); }

double normal_two_sided_p(double z) {
    return std::min(1.0, std::erfc(std::abs(z) / std::sqrt(2.0)));
}

double f_upper_tail(double f, double d1, double d2) {
    if (!(d1 > 0.0 && d2 > 0.0)) throw DomainError("F distribution needs positive degrees of freedom");
    if (std::isnan(f)) throw DomainError("F statistic is NaN");
    if (f <= 0.0) return 1.0;
    if (std::isinf(f)) return 0.0;
    const boost::math::fisher_f_distribution<double> dist(d1, d2);
    return boost::math::cdf(boost::math::complement(dist, f));
}

TestResult grand_mean_z_test(std::span<const double> values, double grand_mean, double grand_sd) {
    if (values.size() < 2) throw DomainError("z-test needs at least two observations");
    if (!(grand_sd > 0.0)) throw DomainError("grand standard deviation must be positive");
    const double n = static_cast<double>(values.size());
    const double diff = kernels::sum(values) / n - grand_mean;
    TestResult out;
    out.statistic = diff / (grand_sd / std::sqrt(n));
    out.p_value = normal_two_sided_p(out.statistic);
    out.effect_sign = sign_of(diff);
    out.dof = {n - 1.0, 0.0};
    return out;
}

double linear_trend_contrast(std::span<const double> beta) {
    const std::size_t J = beta.size();
    const double mid = 0.5 * static_cast<double>(J - 1);
    double c = 0.0;
    for (std::size_t j = 0; j < J / 2; ++j) c += (static_cast<double>(j) - mid) * (beta[j] - beta[J - 1 - j]);
    return c;
}

EdgeModelFit repeated_measures_fit(const BalancedTable& t) {
    const std::size_t n = t.subjects();
    const std::size_t J = t.conditions();
    if (n < 2 || J < 2) throw DomainError("repeated-measures fit needs at least 2 subjects and 2 conditions");
    for (double v : t.values())
        if (!std::isfinite(v)) throw UnsupportedDesignError("missing or non-finite cell in a repeated-measures table");

    std::vector<double> subject_mean(n);
    for (std::size_t s = 0; s < n; ++s) {
        double acc = 0.0;
        for (std::size_t c = 0; c < J; ++c) acc += t(s, c);
        subject_mean[s] = acc / static_cast<double>(J);
    }
    std::vector<double> condition_mean(J);
    for (std::size_t c = 0; c < J; ++c) {
        double acc = 0.0;
        for (std::size_t s = 0; s < n; ++s) acc += t(s, c);
        condition_mean[c] = acc / static_cast<double>(n);
    }
    const double grand = kernels::sum(t.values()) / static_cast<double>(n * J);

    const bool flat_conditions =
        std::all_of(condition_mean.begin(), condition_mean.end(), [&](double b) { return b == condition_mean[0]; });
    const double ss_condition =
        flat_conditions ? 0.0 : static_cast<double>(n) * kernels::sum_squared_deviation(condition_mean, grand);
    const double ss_total = kernels::sum_squared_deviation(t.values(), grand);
    double ss_residual = 0.0;
    for (std::size_t s = 0; s < n; ++s)
        for (std::size_t c = 0; c < J; ++c) {
            const double r = t(s, c) - subject_mean[s] - condition_mean[c] + grand;
            ss_residual += r * r;
        }

    EdgeModelFit fit;
    fit.fixed_effects = condition_mean;
    fit.subject_intercepts.resize(n);
    for (std::size_t s = 0; s < n; ++s) fit.subject_intercepts[s] = subject_mean[s] - grand;
    const double df_condition = static_cast<double>(J - 1);
    const double df_residual = static_cast<double>((n - 1) * (J - 1));
    fit.dof = {df_condition, df_residual};

    // Residuals below rounding noise of the total are treated as exact zeros.
    if (ss_residual <= 1e-13 * ss_total || ss_total == 0.0) {
        fit.degenerate = true;
        fit.residual_variance = 0.0;
        const bool differs = ss_condition > 1e-13 * ss_total && ss_condition > 0.0;
        fit.f_statistic = differs ? std::numeric_limits<double>::infinity() : 0.0;
        fit.p_value = differs ? 0.0 : 1.0;
    } else {
        fit.residual_variance = ss_residual / df_residual;
        fit.f_statistic = (ss_condition / df_condition) / fit.residual_variance;
        fit.p_value = f_upper_tail(fit.f_statistic, df_condition, df_residual);
    }
    fit.trend_sign = fit.f_statistic > 0.0 ? sign_of(linear_trend_contrast(condition_mean)) : Sign::zero;
    return fit;
}

FdrDecision bh_fdr(std::span<const double> p_values, double base_rate) {
    check_rate(base_rate);
    check_probabilities(p_values);
    const std::size_t m = p_values.size();
    FdrDecision out;
    out.base_rate = base_rate;
    out.rejected.assign(m, false);
    if (m == 0) return out;

    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return p_values[a] < p_values[b]; });

    std::size_t k = 0;
    for (std::size_t rank = m; rank >= 1; --rank) {
        if (p_values[order[rank - 1]] <= static_cast<double>(rank) * base_rate / static_cast<double>(m)) {
            k = rank;
            break;
        }
    }
    out.threshold_index = k;
    if (k == 0) return out;
    const double cutoff = p_values[order[k - 1]];
    for (std::size_t h = 0; h < m; ++h) out.rejected[h] = p_values[h] <= cutoff;
    return out;
}

FdrDecision uncorrected(std::span<const double> p_values, double alpha) {
    check_rate(alpha);
    check_probabilities(p_values);
    FdrDecision out;
    out.base_rate = alpha;
    out.rejected.resize(p_values.size());
    for (std::size_t h = 0; h < p_values.size(); ++h) out.rejected[h] = p_values[h] <= alpha;
    out.threshold_index = out.rejected_count();
    return out;
}

}  // namespace spn
