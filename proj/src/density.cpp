#include "spn/density.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "spn/errors.hpp"
#include "spn/modularity.hpp"

namespace spn {
namespace {

std::vector<double> edge_weights(const WeightedGraph& g, std::span<const Edge> edges) {
    std::vector<double> w;
    w.reserve(edges.size());
    for (const Edge& e : edges) w.push_back(g.weight(e.i, e.j));
    return w;
}

std::vector<std::size_t> default_grid(std::size_t candidates) {
    std::vector<std::size_t> grid(candidates);
    std::iota(grid.begin(), grid.end(), std::size_t{1});
    return grid;
}

std::vector<Edge> sorted_prefix(std::span<const Edge> ranking, std::size_t k) {
    std::vector<Edge> prefix(ranking.begin(), ranking.begin() + static_cast<std::ptrdiff_t>(k));
    std::sort(prefix.begin(), prefix.end());
    return prefix;
}

/// Direction of h on the weights, or PreconditionViolation.
RankOrder monotone_direction(std::span<const double> w, std::span<const double> hw) {
    std::vector<std::size_t> order(w.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return w[a] < w[b]; });
    for (double v : hw)
        if (!std::isfinite(v)) throw PreconditionViolation("transformed weight is not finite");

    int direction = 0;
    for (std::size_t t = 1; t < order.size(); ++t) {
        const std::size_t lo = order[t - 1];
        const std::size_t hi = order[t];
        if (w[lo] == w[hi]) {
            if (hw[lo] != hw[hi]) throw PreconditionViolation("map sends equal weights to different values");
            continue;
        }
        const int step = hw[hi] > hw[lo] ? 1 : (hw[hi] < hw[lo] ? -1 : 0);
        if (step == 0 || (direction != 0 && step != direction)) {
            throw PreconditionViolation("map is not strictly monotone on the weights: w=" + std::to_string(w[lo]) +
                                        " -> " + std::to_string(hw[lo]) + ", w=" + std::to_string(w[hi]) + " -> " +
                                        std::to_string(hw[hi]));
        }
        direction = step;
    }
    return direction < 0 ? RankOrder::ascending : RankOrder::descending;
}

}  // namespace

std::string_view to_string(Metric metric) noexcept {
    switch (metric) {
        case Metric::global_efficiency: return "global_efficiency";
        case Metric::local_efficiency: return "local_efficiency";
        case Metric::modularity_count: return "modularity_count";
        case Metric::modularity_q: return "modularity_q";
    }
    return "unknown";
}

Metric parse_metric(std::string_view name) {
    for (Metric m : {Metric::global_efficiency, Metric::local_efficiency, Metric::modularity_count, Metric::modularity_q})
        if (to_string(m) == name) return m;
    throw ValidationError("unknown metric: " + std::string(name));
}

MetricFn metric_function(Metric metric) {
    switch (metric) {
        case Metric::global_efficiency: return [](const BinaryGraph& g) { return global_efficiency(g); };
        case Metric::local_efficiency: return [](const BinaryGraph& g) { return local_efficiency(g); };
        case Metric::modularity_count:
            return [](const BinaryGraph& g) { return static_cast<double>(greedy_modularity(g).module_count); };
        case Metric::modularity_q: return [](const BinaryGraph& g) { return greedy_modularity(g).q; };
    }
    throw ValidationError("unknown metric");
}

std::vector<Edge> ranked_edges(std::span<const Edge> edges, std::span<const double> scores, RankOrder order) {
    if (edges.size() != scores.size()) throw ValidationError("one score per edge is required");
    std::vector<std::size_t> idx(edges.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        if (scores[a] != scores[b]) return order == RankOrder::descending ? scores[a] > scores[b] : scores[a] < scores[b];
        return edges[a] < edges[b];
    });
    std::vector<Edge> out;
    out.reserve(edges.size());
    for (std::size_t k : idx) out.push_back(edges[k]);
    return out;
}

BinaryGraph density_threshold(const WeightedGraph& g, std::size_t k) {
    const std::size_t n = g.node_count();
    if (k > n * (n - 1) / 2) throw DomainError("density exceeds the number of node pairs");
    const std::vector<Edge> edges = g.edges();
    if (k > edges.size())
        throw DomainError("density " + std::to_string(k) + " exceeds the " + std::to_string(edges.size()) +
                          " positive weights");
    const std::vector<Edge> ranking = ranked_edges(edges, edge_weights(g, edges), RankOrder::descending);
    return BinaryGraph(g.nodes(), std::span<const Edge>(ranking).first(k));
}

DensityProfile density_integrated_metric(std::size_t node_count, std::span<const Edge> ranking,
                                         const MetricFn& metric, std::span<const std::size_t> grid,
                                         std::span<const double> mass) {
    const std::vector<std::size_t> fallback = grid.empty() ? default_grid(ranking.size()) : std::vector<std::size_t>{};
    if (grid.empty()) grid = fallback;
    if (grid.empty()) throw DomainError("density grid is empty");
    for (std::size_t k : grid)
        if (k > ranking.size()) throw DomainError("density " + std::to_string(k) + " exceeds the candidate edges");

    DensityProfile profile;
    profile.densities.assign(grid.begin(), grid.end());
    if (mass.empty()) {
        profile.weights.assign(grid.size(), 1.0 / static_cast<double>(grid.size()));
    } else {
        if (mass.size() != grid.size()) throw ValidationError("density mass must have one entry per grid point");
        double total = 0.0;
        for (double p : mass) {
            if (!(p >= 0.0)) throw ValidationError("density mass must be nonnegative");
            total += p;
        }
        if (std::abs(total - 1.0) > 1e-12) throw ValidationError("density mass must sum to 1");
        profile.weights.assign(mass.begin(), mass.end());
    }

    const std::vector<Node> nodes = default_nodes(node_count);
    profile.values.reserve(grid.size());
    for (std::size_t k : grid) profile.values.push_back(metric(BinaryGraph(nodes, ranking.first(k))));
    for (std::size_t t = 0; t < grid.size(); ++t) profile.integrated += profile.values[t] * profile.weights[t];
    return profile;
}

DensityProfile density_integrated_metric(const WeightedGraph& g, const MetricFn& metric,
                                         std::span<const std::size_t> grid, std::span<const double> mass) {
    const std::vector<Edge> edges = g.edges();
    const std::vector<Edge> ranking = ranked_edges(edges, edge_weights(g, edges), RankOrder::descending);
    return density_integrated_metric(g.node_count(), ranking, metric, grid, mass);
}

MonotoneInvarianceReport check_monotone_invariance(const WeightedGraph& g, const std::function<double(double)>& h,
                                                   const MetricFn& metric, std::span<const std::size_t> grid) {
    const std::vector<Edge> edges = g.edges();
    const std::vector<double> w = edge_weights(g, edges);
    std::vector<double> hw(w.size());
    std::transform(w.begin(), w.end(), hw.begin(), h);

    MonotoneInvarianceReport report;
    report.direction = monotone_direction(w, hw);

    const std::vector<Edge> original = ranked_edges(edges, w, RankOrder::descending);
    const std::vector<Edge> transformed = ranked_edges(edges, hw, report.direction);
    report.original = density_integrated_metric(g.node_count(), original, metric, grid);
    report.transformed = density_integrated_metric(g.node_count(), transformed, metric, grid);

    for (std::size_t t = 0; t < report.original.densities.size(); ++t) {
        const std::size_t k = report.original.densities[t];
        if (sorted_prefix(original, k) != sorted_prefix(transformed, k)) report.mismatched_densities.push_back(k);
        report.max_value_difference = std::max(report.max_value_difference,
                                               std::abs(report.original.values[t] - report.transformed.values[t]));
    }
    report.max_value_difference =
        std::max(report.max_value_difference, std::abs(report.original.integrated - report.transformed.integrated));
    return report;
}

bool verify_monotone_invariance(const WeightedGraph& g, const std::function<double(double)>& h,
                                const MetricFn& metric, std::span<const std::size_t> grid) {
    const MonotoneInvarianceReport r = check_monotone_invariance(g, h, metric, grid);
    return r.edge_sets_identical() && r.max_value_difference == 0.0;
}

}  // namespace spn
