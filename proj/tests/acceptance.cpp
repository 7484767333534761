// Acceptance suite: one line per criterion, non-zero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "spn/density.hpp"
#include "spn/graph.hpp"
#include "spn/modularity.hpp"
#include "spn/spn_builder.hpp"
#include "spn/stats.hpp"

using namespace spn;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

// Collects failures without stopping, so the detail names the first one.
struct Checker {
    bool ok = true;
    std::string first_failure;
    std::size_t checks = 0;

    void expect(bool cond, const std::string& what) {
        ++checks;
        if (!cond && ok) {
            ok = false;
            first_failure = what;
        }
    }
};

std::string fmt(const char* format, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, format, args...);
    return buf;
}

const MetricFn kEfficiency = metric_function(Metric::global_efficiency);

// 1. Monotone invariance of density-integrated global efficiency.
Outcome monotone_invariance() {
    constexpr double kTol = 1e-12;
    std::mt19937_64 rng(1001);
    std::uniform_int_distribution<std::size_t> size(5, 30);
    std::uniform_real_distribution<double> weight(0.01, 1.0);
    const std::vector<std::pair<const char*, std::function<double(double)>>> maps{
        {"2w", [](double w) { return 2.0 * w; }},
        {"w^3", [](double w) { return w * w * w; }},
        {"exp(w)", [](double w) { return std::exp(w); }},
        {"-w", [](double w) { return -w; }},
    };
    Checker c;
    double worst = 0.0;
    for (int rep = 0; rep < 200; ++rep) {
        const std::size_t n = size(rng);
        const WeightedGraph g(oracle::random_weights(n, 0.5, rng, [&](auto& r) { return weight(r); }));
        if (g.edges().empty()) continue;
        for (const auto& [name, h] : maps) {
            const MonotoneInvarianceReport r = check_monotone_invariance(g, h, kEfficiency);
            worst = std::max(worst, r.max_value_difference);
            c.expect(r.edge_sets_identical(), fmt("graph %d, h=%s: per-k edge sets differ", rep, name));
            c.expect(r.max_value_difference <= kTol, fmt("graph %d, h=%s: values differ by %g", rep, name, r.max_value_difference));
        }
    }
    return {c.ok, c.ok ? fmt("%zu checks, max |diff| %g (tol 1e-12)", c.checks, worst) : c.first_failure};
}

// 2. Spread condition: weighted efficiency equals weighted density.
Outcome spread_condition() {
    constexpr double kTol = 1e-12;
    std::mt19937_64 rng(1002);
    std::uniform_int_distribution<std::size_t> size(3, 30);
    std::uniform_real_distribution<double> top(0.1, 1.0);
    Checker c;
    double worst = 0.0;
    for (int rep = 0; rep < 200; ++rep) {
        const std::size_t n = size(rng);
        const double w_max = top(rng);
        std::uniform_real_distribution<double> weight(0.5 * w_max, w_max);
        const WeightedGraph g(oracle::random_weights(n, 1.0, rng, [&](auto& r) { return weight(r); }));
        const double diff = std::abs(weighted_efficiency(g) - weighted_density(g));
        worst = std::max(worst, diff);
        c.expect(spread_condition_holds(g), fmt("graph %d: spread condition unexpectedly false", rep));
        c.expect(diff <= kTol, fmt("graph %d: |E_w - D_w| = %g", rep, diff));
    }
    double smallest_gap = INFINITY;
    for (int rep = 0; rep < 50; ++rep) {
        const std::size_t n = size(rng);
        std::uniform_real_distribution<double> weight(0.5, 1.0);
        SquareMatrix m = oracle::random_weights(n, 1.0, rng, [&](auto& r) { return weight(r); });
        // A weak direct tie between two nodes that share a strong neighbour:
        // the two-hop route is shorter than the edge itself.
        std::uniform_int_distribution<std::size_t> pick(0, n - 1);
        const std::size_t a = pick(rng);
        std::size_t b = pick(rng);
        while (b == a) b = pick(rng);
        m(a, b) = m(b, a) = 0.05;
        const WeightedGraph g(m);
        const double gap = std::abs(weighted_efficiency(g) - weighted_density(g));
        smallest_gap = std::min(smallest_gap, gap);
        c.expect(!spread_condition_holds(g), fmt("violation %d: spread condition reported as holding", rep));
        c.expect(gap > kTol, fmt("violation %d: equality still holds (gap %g)", rep, gap));
    }
    return {c.ok, c.ok ? fmt("max |diff| %g on 200 graphs; min gap %g on 50 violations", worst, smallest_gap) : c.first_failure};
}

std::string row_means(const SweepResult& s) {
    std::ostringstream out;
    for (std::size_t t = 0; t < s.rows.size(); ++t) out << (t ? " " : "") << s.rows[t].parameter << ":" << s.rows[t].mean_modules;
    return out.str();
}

// 3. Module count rises with rewiring at fixed edge count.
Outcome randomness_trend() {
    constexpr std::size_t kNodes = 112;
    constexpr std::size_t kEdges = 600;
    std::vector<std::size_t> grid;
    for (std::size_t r = 0; r <= 500; r += 50) grid.push_back(r);
    const SweepResult s = randomness_sweep(kNodes, kEdges, grid, 100, 2024);
    std::vector<double> x;
    std::vector<double> y;
    for (const SweepRow& row : s.rows) {
        x.push_back(static_cast<double>(row.parameter));
        y.push_back(row.mean_modules);
    }
    const double rho = oracle::spearman(x, y);
    return {rho > 0.8, fmt("N_E=%zu, rho=%.4f (need > 0.8); means %s", kEdges, rho, row_means(s).c_str())};
}

// 4. Module count falls as edges are added, for both generators.
Outcome edges_trend() {
    const std::vector<std::size_t> grid{100, 600, 1100, 1600, 2100};
    std::string detail;
    bool pass = true;
    for (Topology t : {Topology::lattice, Topology::random}) {
        const SweepResult s = edges_sweep(112, grid, t, 100, 2024);
        bool strict = true;
        for (std::size_t k = 1; k < s.rows.size(); ++k) strict &= s.rows[k].mean_modules < s.rows[k - 1].mean_modules;
        pass &= strict;
        detail += fmt("%s%s %s [%s]", detail.empty() ? "" : "; ", std::string(to_string(t)).c_str(),
                      strict ? "strictly decreasing" : "NOT strictly decreasing", row_means(s).c_str());
    }
    return {pass, detail};
}

// 5. Efficiencies and modularity against exhaustive oracles.
Outcome oracle_equivalence() {
    constexpr double kTol = 1e-12;
    std::mt19937_64 rng(1005);
    std::uniform_int_distribution<std::size_t> size(2, 10);
    std::uniform_real_distribution<double> density(0.1, 0.9);
    std::uniform_real_distribution<double> weight(0.05, 1.0);
    Checker c;
    std::size_t bounded = 0;
    for (int rep = 0; rep < 100; ++rep) {
        const std::size_t n = size(rng);
        const double p = density(rng);
        const BinaryGraph b = oracle::random_binary(n, p, rng);
        const double e = global_efficiency(b);
        const double e_ref = oracle::efficiency(oracle::hop_distances(b));
        c.expect(std::abs(e - e_ref) <= kTol, fmt("graph %d: binary efficiency %.17g vs %.17g", rep, e, e_ref));

        const WeightedGraph w(oracle::random_weights(n, p, rng, [&](auto& r) { return weight(r); }));
        const double ew = weighted_efficiency(w);
        const double ew_ref = oracle::efficiency(oracle::reciprocal_distances(w.weights()));
        c.expect(std::abs(ew - ew_ref) <= kTol, fmt("graph %d: weighted efficiency %.17g vs %.17g", rep, ew, ew_ref));

        if (b.edge_count() == 0) continue;
        const Partition part = greedy_modularity(b);
        const double q_ref = oracle::modularity(b, part.assignment);
        c.expect(std::abs(part.q - q_ref) <= kTol, fmt("graph %d: Q %.17g vs recomputed %.17g", rep, part.q, q_ref));
        if (n <= 8) {
            ++bounded;
            const double q_max = oracle::max_modularity(b);
            c.expect(part.q <= q_max + kTol, fmt("graph %d: greedy Q %.17g above exhaustive max %.17g", rep, part.q, q_max));
        }
    }
    return {c.ok, c.ok ? fmt("%zu checks passed; %zu graphs bounded by exhaustive Q", c.checks, bounded) : c.first_failure};
}

// 6. FDR, F statistic, plant-and-recover, and empty SPNs on noise.
Outcome inference() {
    Checker c;
    std::mt19937_64 rng(1006);

    std::uniform_int_distribution<std::size_t> m_dist(1, 50);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_real_distribution<double> alpha_dist(0.01, 0.2);
    for (int rep = 0; rep < 1000; ++rep) {
        const std::size_t m = m_dist(rng);
        std::vector<double> p(m);
        // Mix of small, uniform and coarsely rounded (tied) values.
        for (double& v : p) {
            v = u(rng);
            if (rep % 3 == 0) v *= 0.05;
            if (rep % 5 == 0) v = std::round(v * 20.0) / 20.0;
        }
        const double alpha = rep % 2 ? 0.05 : alpha_dist(rng);
        c.expect(bh_fdr(p, alpha).rejected == oracle::bh_rejections(p, alpha), fmt("p-vector %d: BH rejections differ", rep));
    }

    constexpr double kFTol = 1e-10;
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_int_distribution<std::size_t> n_dist(2, 25);
    std::uniform_int_distribution<std::size_t> j_dist(2, 6);
    double worst_f = 0.0;
    for (int rep = 0; rep < 100; ++rep) {
        const std::size_t n = n_dist(rng);
        const std::size_t J = j_dist(rng);
        std::vector<std::vector<double>> y(n, std::vector<double>(J));
        BalancedTable t(n, J);
        for (std::size_t s = 0; s < n; ++s) {
            const double subject = gauss(rng);
            for (std::size_t k = 0; k < J; ++k) t(s, k) = y[s][k] = subject + 0.3 * static_cast<double>(k) * (rep % 2) + gauss(rng);
        }
        const double f = repeated_measures_fit(t).f_statistic;
        const double f_ref = oracle::repeated_measures(y).f;
        worst_f = std::max(worst_f, std::abs(f - f_ref));
        c.expect(std::abs(f - f_ref) <= kFTol, fmt("table %d: F %.17g vs %.17g", rep, f, f_ref));
    }

    // Planted effects of Fisher-z size 1.0 with n = 20, J = 4.
    oracle::DatasetSpec spec;
    spec.subjects = 20;
    spec.conditions = 4;
    const double span = 1.0;
    const double step = span / static_cast<double>(spec.conditions - 1);
    std::size_t recovered = 0;
    std::size_t misrouted = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const StudyDataset d = oracle::synthetic_dataset(spec, seed, [&](std::size_t i, std::size_t j, std::size_t cond) {
            if (i == 0 && j == 1) return span;                                // strong in every condition
            if (i == 2 && j == 3) return step * static_cast<double>(cond);   // rising
            if (i == 4 && j == 5) return -step * static_cast<double>(cond);  // falling
            return 0.0;
        });
        for (std::size_t cond = 0; cond < spec.conditions; ++cond) {
            const SpnResult mean = mean_spn(d, cond);
            recovered += mean.network.has_edge(0, 1);
            c.expect(mean.network.has_edge(0, 1), fmt("seed %llu: mean SPN of condition %zu misses the planted edge",
                                                      static_cast<unsigned long long>(seed), cond));
        }
        const DifferentialSpn diff = differential_spn(d);
        recovered += diff.plus.network.has_edge(2, 3) + diff.minus.network.has_edge(4, 5);
        misrouted += diff.minus.network.has_edge(2, 3) + diff.plus.network.has_edge(4, 5);
        c.expect(diff.plus.network.has_edge(2, 3), fmt("seed %llu: rising edge missing from SPN+", static_cast<unsigned long long>(seed)));
        c.expect(diff.minus.network.has_edge(4, 5), fmt("seed %llu: falling edge missing from SPN-", static_cast<unsigned long long>(seed)));
    }
    c.expect(misrouted == 0, fmt("%zu planted edges routed to the wrong sign", misrouted));

    // Pure noise: every SPN must come out empty in at least 95 of 100 runs.
    // A mean SPN belongs to one condition, so each condition is its own SPN;
    // the rate at which all conditions are empty together is only reported.
    std::vector<std::size_t> empty_mean(spec.conditions, 0);
    std::size_t empty_all_means = 0;
    std::size_t empty_diff = 0;
    for (std::uint64_t seed = 5001; seed <= 5100; ++seed) {
        const StudyDataset d = oracle::synthetic_dataset(spec, seed);
        bool all_empty = true;
        for (std::size_t cond = 0; cond < spec.conditions; ++cond) {
            const bool empty = mean_spn(d, cond).network.edge_count() == 0;
            empty_mean[cond] += empty;
            all_empty &= empty;
        }
        empty_all_means += all_empty;
        const DifferentialSpn diff = differential_spn(d);
        empty_diff += diff.plus.network.edge_count() == 0 && diff.minus.network.edge_count() == 0 &&
                      diff.plus.unsigned_significant.empty();
    }
    std::string per_condition;
    for (std::size_t cond = 0; cond < spec.conditions; ++cond) {
        c.expect(empty_mean[cond] >= 95, fmt("mean SPN of condition %zu empty in only %zu/100 noise runs", cond, empty_mean[cond]));
        per_condition += fmt("%s%zu", cond ? "," : "", empty_mean[cond]);
    }
    c.expect(empty_diff >= 95, fmt("differential SPNs empty in only %zu/100 noise runs", empty_diff));

    const std::string summary =
        fmt("BH 1000/1000; max |F diff| %g; planted %zu recovered, %zu misrouted; noise empty /100: mean per condition %s "
            "(all at once %zu), diff %zu",
            worst_f, recovered, misrouted, per_condition.c_str(), empty_all_means, empty_diff);
    return {c.ok, c.ok ? summary : c.first_failure + " | " + summary};
}

// 7. Averaging then thresholding disagrees with thresholding then combining.
Outcome thresholding_witness() {
    // Pair (0,1): one strong subject lifts the mean above tau, majority drops it.
    // Pair (0,2): two moderate subjects carry the vote, the mean falls below tau.
    std::vector<SquareMatrix> m(3, SquareMatrix(3));
    const double r01[3] = {0.9, 0.3, 0.3};
    const double r02[3] = {0.45, 0.45, 0.0};
    for (std::size_t s = 0; s < 3; ++s) {
        m[s](0, 1) = m[s](1, 0) = r01[s];
        m[s](0, 2) = m[s](2, 0) = r02[s];
    }
    const double tau = 0.4;
    const BinaryGraph averaged = mean_then_threshold(m, tau);
    const BinaryGraph voted = threshold_then_majority(m, tau);
    const bool pass = averaged.has_edge(0, 1) && !voted.has_edge(0, 1) && !averaged.has_edge(0, 2) && voted.has_edge(0, 2);
    return {pass, fmt("tau=0.4: mean-then-threshold edges %zu, threshold-then-majority edges %zu, disjoint: %s",
                      averaged.edge_count(), voted.edge_count(), pass ? "yes" : "no")};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"1 monotone invariance of density-integrated efficiency", monotone_invariance},
        {"2 spread condition: weighted efficiency == weighted density", spread_condition},
        {"3 module count rises with rewiring (Spearman > 0.8)", randomness_trend},
        {"4 module count falls with edge count (both topologies)", edges_trend},
        {"5 oracle equivalence: efficiencies and modularity", oracle_equivalence},
        {"6 inference: BH, F, plant-and-recover, empty on noise", inference},
        {"7 mean-then-threshold vs threshold-then-combine witness", thresholding_witness},
    };
    int failed = 0;
    for (const auto& [name, run] : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("[%s] %s (%.1fs): %s\n", o.pass ? "PASS" : "FAIL", name, secs, o.detail.c_str());
        std::fflush(stdout);
        failed += !o.pass;
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
