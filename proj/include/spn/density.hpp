#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "spn/graph.hpp"

namespace spn {

enum class Metric { global_efficiency, local_efficiency, modularity_count, modularity_q };

std::string_view to_string(Metric metric) noexcept;
/// Throws ValidationError on an unknown name.
Metric parse_metric(std::string_view name);

using MetricFn = std::function<double(const BinaryGraph&)>;

MetricFn metric_function(Metric metric);

enum class RankOrder { descending, ascending };

/// Candidate edges sorted by score (largest first for descending), ties broken
/// by lexicographic (i, j). The first k entries are the k-edge selection.
std::vector<Edge> ranked_edges(std::span<const Edge> edges, std::span<const double> scores, RankOrder order);

/// The k largest-weight edges of g as an unweighted graph. Throws DomainError
/// when k exceeds the number of node pairs or of positive weights.
BinaryGraph density_threshold(const WeightedGraph& g, std::size_t k);

/// A metric along a grid of edge counts with its expectation under p(k).
struct DensityProfile {
    std::vector<std::size_t> densities;
    std::vector<double> values;
    std::vector<double> weights;
    double integrated = 0.0;
};

/// Evaluates `metric` on density_threshold(g, k) for every k of `grid`
/// (default 1..number of positive weights) and integrates against `mass`
/// (default uniform). `mass`, when given, must match the grid and sum to 1.
DensityProfile density_integrated_metric(const WeightedGraph& g, const MetricFn& metric,
                                         std::span<const std::size_t> grid = {}, std::span<const double> mass = {});

/// Same, from an explicit edge ranking on `node_count` nodes.
DensityProfile density_integrated_metric(std::size_t node_count, std::span<const Edge> ranking,
                                         const MetricFn& metric, std::span<const std::size_t> grid = {},
                                         std::span<const double> mass = {});

struct MonotoneInvarianceReport {
    RankOrder direction = RankOrder::descending;
    /// Grid points whose selected edge sets differ between g and h(g).
    std::vector<std::size_t> mismatched_densities;
    DensityProfile original;
    DensityProfile transformed;
    double max_value_difference = 0.0;

    bool edge_sets_identical() const { return mismatched_densities.empty(); }
};

/// Applies h to every positive weight of g, ranks h(g) in the direction that
/// h preserves (a decreasing h selects its smallest values), and compares the
/// per-k edge selections and profiles with those of g. The edge set of h(g)
/// is the edge set of g. Throws PreconditionViolation when h is not strictly
/// monotone on the weights of g.
MonotoneInvarianceReport check_monotone_invariance(const WeightedGraph& g, const std::function<double(double)>& h,
                                                   const MetricFn& metric, std::span<const std::size_t> grid = {});

/// True when every per-k edge selection and profile value agrees exactly.
bool verify_monotone_invariance(const WeightedGraph& g, const std::function<double(double)>& h,
                                const MetricFn& metric, std::span<const std::size_t> grid = {});

}  // namespace spn
