#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace spn {

/// Stereotaxic coordinates in millimeters. Carried through to exports, never
/// used in computation.
using Coord = std::array<double, 3>;

struct Node {
    std::string label;
    std::optional<Coord> coords;

    bool operator==(const Node&) const = default;
};

/// Labels "0", "1", ... for `n` nodes without coordinates.
std::vector<Node> default_nodes(std::size_t n);

/// Undirected node pair, always stored with i < j.
struct Edge {
    std::size_t i = 0;
    std::size_t j = 0;

    auto operator<=>(const Edge&) const = default;
};

/// Dense row-major square matrix of doubles.
class SquareMatrix {
public:
    SquareMatrix() = default;
    explicit SquareMatrix(std::size_t n, double fill = 0.0) : n_(n), data_(n * n, fill) {}
    SquareMatrix(std::size_t n, std::vector<double> data);

    std::size_t size() const noexcept { return n_; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }
    double& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }

    std::span<const double> row(std::size_t i) const { return {data_.data() + i * n_, n_}; }
    std::span<double> row(std::size_t i) { return {data_.data() + i * n_, n_}; }
    std::span<const double> values() const noexcept { return data_; }

    bool operator==(const SquareMatrix&) const = default;

private:
    std::size_t n_ = 0;
    std::vector<double> data_;
};

/// Absolute tolerance used when checking a matrix for symmetry.
inline constexpr double kSymmetryTolerance = 1e-9;

/// Throws ValidationError unless |a_ij - a_ji| <= kSymmetryTolerance everywhere,
/// then returns the matrix with each pair replaced by its average.
SquareMatrix symmetrized(const SquareMatrix& m);

/// Symmetric graph with nonnegative weights and a zero diagonal. A pair is an
/// edge iff its weight is positive.
class WeightedGraph {
public:
    /// Validates symmetry (then averages the two triangles), forces the
    /// diagonal to zero and rejects negative or non-finite weights.
    explicit WeightedGraph(SquareMatrix weights, std::vector<Node> nodes = {});

    std::size_t node_count() const noexcept { return weights_.size(); }
    const std::vector<Node>& nodes() const noexcept { return nodes_; }
    const SquareMatrix& weights() const noexcept { return weights_; }
    double weight(std::size_t i, std::size_t j) const { return weights_(i, j); }

    /// Pairs with positive weight, lexicographic.
    std::vector<Edge> edges() const;

private:
    SquareMatrix weights_;
    std::vector<Node> nodes_;
};

/// Simple undirected unweighted graph.
class BinaryGraph {
public:
    BinaryGraph() = default;
    /// Edges may be given in either orientation; duplicates and self-loops are
    /// rejected with ValidationError.
    BinaryGraph(std::vector<Node> nodes, std::span<const Edge> edges);
    BinaryGraph(std::size_t n, std::span<const Edge> edges) : BinaryGraph(default_nodes(n), edges) {}

    std::size_t node_count() const noexcept { return nodes_.size(); }
    std::size_t edge_count() const noexcept { return edge_count_; }
    const std::vector<Node>& nodes() const noexcept { return nodes_; }

    bool has_edge(std::size_t i, std::size_t j) const { return adjacency_[i * nodes_.size() + j] != 0; }
    std::span<const std::size_t> neighbors(std::size_t i) const { return neighbors_[i]; }
    std::size_t degree(std::size_t i) const { return neighbors_[i].size(); }

    /// Edges in lexicographic (i, j) order, i < j.
    std::vector<Edge> edges() const;

    /// 0/1 adjacency as a dense matrix.
    SquareMatrix adjacency_matrix() const;

    /// Same adjacency and labels; coordinates are ignored.
    bool same_edges(const BinaryGraph& other) const;

private:
    std::vector<Node> nodes_;
    std::vector<std::uint8_t> adjacency_;
    std::vector<std::vector<std::size_t>> neighbors_;
    std::size_t edge_count_ = 0;
};

inline constexpr double kUnreachable = std::numeric_limits<double>::infinity();

/// Shortest-path lengths; unreachable pairs hold kUnreachable.
class DistanceMatrix {
public:
    explicit DistanceMatrix(SquareMatrix dist) : dist_(std::move(dist)) {}

    std::size_t size() const noexcept { return dist_.size(); }
    double operator()(std::size_t i, std::size_t j) const { return dist_(i, j); }
    bool reachable(std::size_t i, std::size_t j) const { return dist_(i, j) != kUnreachable; }
    const SquareMatrix& matrix() const noexcept { return dist_; }

private:
    SquareMatrix dist_;
};

/// Keeps pair (i, j) iff matrix(i, j) > tau. The matrix must be symmetric
/// (within kSymmetryTolerance) and hollow.
BinaryGraph threshold(const SquareMatrix& matrix, double tau, std::vector<Node> nodes = {});

/// Hop counts by breadth-first search from every source.
DistanceMatrix shortest_paths_unweighted(const BinaryGraph& g);

/// Dijkstra with edge length 1/w_ij; zero-weight pairs are not edges.
DistanceMatrix shortest_paths_weighted(const WeightedGraph& g);

/// Mean of 1/d_ij over ordered pairs i != j (unreachable pairs add 0).
double efficiency_from_distances(const DistanceMatrix& d);

double global_efficiency(const BinaryGraph& g);

/// Mean over nodes of the global efficiency of each node's neighborhood
/// subgraph (node itself excluded). Nodes with fewer than two neighbors add 0.
double local_efficiency(const BinaryGraph& g);

double weighted_efficiency(const WeightedGraph& g);

/// Mean off-diagonal weight (weighted cost).
double weighted_density(const WeightedGraph& g);

/// min_{i<j} w_ij >= max_{i<j} w_ij / 2, taken over every node pair.
/// Throws DomainError when no weight is positive.
bool spread_condition_holds(const WeightedGraph& g);

/// Relabels node i as perm[i]. Used for invariance checks.
BinaryGraph permuted(const BinaryGraph& g, std::span<const std::size_t> perm);
WeightedGraph permuted(const WeightedGraph& g, std::span<const std::size_t> perm);

}  // namespace spn
