#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace spn {

enum class Sign : int { negative = -1, zero = 0, positive = 1 };

Sign sign_of(double x) noexcept;

/// Outcome of a single hypothesis test.
struct TestResult {
    double statistic = 0.0;
    double p_value = 1.0;
    Sign effect_sign = Sign::zero;
    std::pair<double, double> dof{0.0, 0.0};
};

/// Random-intercept repeated-measures fit of one edge (or node).
///
/// The per-subject model y_ij = beta_j + b_i + e_ij is fitted in closed form
/// for a balanced n x J table: beta_j are the condition means, b_i the subject
/// means centered on the grand mean. The F statistic tests equality of the
/// beta_j against the subject-by-condition residual stratum.
struct EdgeModelFit {
    std::vector<double> fixed_effects;
    std::vector<double> subject_intercepts;
    double residual_variance = 0.0;
    double f_statistic = 0.0;
    double p_value = 1.0;
    Sign trend_sign = Sign::zero;
    std::pair<double, double> dof{0.0, 0.0};
    /// Residual sum of squares is zero; F is reported as +inf (p = 0) when
    /// the conditions differ and as 0 (p = 1) when they do not.
    bool degenerate = false;
};

struct FdrDecision {
    std::vector<bool> rejected;
    /// Rank (1-based) of the largest p-value passing the step-up rule, 0 if none.
    std::size_t threshold_index = 0;
    double base_rate = 0.05;

    std::size_t rejected_count() const;
};

/// Balanced subjects x conditions table, row-major (row = subject).
class BalancedTable {
public:
    BalancedTable(std::size_t subjects, std::size_t conditions);
    BalancedTable(std::size_t subjects, std::size_t conditions, std::vector<double> values);

    std::size_t subjects() const noexcept { return n_; }
    std::size_t conditions() const noexcept { return j_; }
    double operator()(std::size_t s, std::size_t c) const { return values_[s * j_ + c]; }
    double& operator()(std::size_t s, std::size_t c) { return values_[s * j_ + c]; }
    std::span<const double> values() const noexcept { return values_; }

private:
    std::size_t n_;
    std::size_t j_;
    std::vector<double> values_;
};

/// Fisher z-transform atanh(r). Throws DomainError for |r| >= 1.
double fisher_z(double r);
double inverse_fisher_z(double z);

/// Two-sided standard normal tail probability P(|Z| >= |z|).
double normal_two_sided_p(double z);

/// Upper tail P(F >= f) of the F(d1, d2) distribution.
double f_upper_tail(double f, double d1, double d2);

/// z-test of mean(values) against a pooled grand mean and SD.
TestResult grand_mean_z_test(std::span<const double> values, double grand_mean, double grand_sd);

/// Throws UnsupportedDesignError on non-finite cells (missing data) and
/// DomainError when n < 2 or J < 2.
EdgeModelFit repeated_measures_fit(const BalancedTable& table);

/// Linear contrast sum_j (j - (J-1)/2) * beta_j, evaluated pairwise so that
/// equal coefficients give exactly zero and reversal exactly negates it.
double linear_trend_contrast(std::span<const double> coefficients);

/// Benjamini-Hochberg step-up procedure. An empty input gives an empty decision.
FdrDecision bh_fdr(std::span<const double> p_values, double base_rate);

/// Per-hypothesis p <= alpha, no multiplicity correction.
FdrDecision uncorrected(std::span<const double> p_values, double alpha);

}  // namespace spn
