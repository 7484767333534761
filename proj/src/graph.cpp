#include "spn/graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>

#include "spn/errors.hpp"
#include "spn/kernels.hpp"

namespace spn {
namespace {

void check_node_table(const std::vector<Node>& nodes, std::size_t n) {
    if (nodes.size() != n) {
        std::ostringstream msg;
        msg << "node table has " << nodes.size() << " entries for a " << n << "-node graph";
        throw ValidationError(msg.str());
    }
}

void require_two_nodes(std::size_t n, const char* what) {
    if (n < 2) throw DomainError(std::string(what) + " needs at least two nodes");
}

}  // namespace

std::vector<Node> default_nodes(std::size_t n) {
    std::vector<Node> nodes(n);
    for (std::size_t i = 0; i < n; ++i) nodes[i].label = std::to_string(i);
    return nodes;
}

SquareMatrix::SquareMatrix(std::size_t n, std::vector<double> data) : n_(n), data_(std::move(data)) {
    if (data_.size() != n * n) throw ValidationError("matrix data does not have n*n entries");
}

SquareMatrix symmetrized(const SquareMatrix& m) {
    const std::size_t n = m.size();
    SquareMatrix out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out(i, i) = m(i, i);
        for (std::size_t j = i + 1; j < n; ++j) {
            const double a = m(i, j);
            const double b = m(j, i);
            if (!(std::abs(a - b) <= kSymmetryTolerance)) {
                std::ostringstream msg;
                msg << "matrix is not symmetric at (" << i << ", " << j << "): " << a << " vs " << b;
                throw ValidationError(msg.str());
            }
            const double avg = a == b ? a : 0.5 * (a + b);
            out(i, j) = avg;
            out(j, i) = avg;
        }
    }
    return out;
}

// WeightedGraph ----------------------------------------------------------------

WeightedGraph::WeightedGraph(SquareMatrix weights, std::vector<Node> nodes)
    : weights_(symmetrized(weights)), nodes_(nodes.empty() ? default_nodes(weights.size()) : std::move(nodes)) {
    const std::size_t n = weights_.size();
    check_node_table(nodes_, n);
    for (std::size_t i = 0; i < n; ++i) {
        weights_(i, i) = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double w = weights_(i, j);
            if (!std::isfinite(w) || w < 0.0) {
                std::ostringstream msg;
                msg << "weight at (" << i << ", " << j << ") must be finite and nonnegative, got " << w;
                throw ValidationError(msg.str());
            }
        }
    }
}

std::vector<Edge> WeightedGraph::edges() const {
    std::vector<Edge> out;
    const std::size_t n = node_count();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (weights_(i, j) > 0.0) out.push_back({i, j});
    return out;
}

// BinaryGraph ------------------------------------------------------------------

BinaryGraph::BinaryGraph(std::vector<Node> nodes, std::span<const Edge> edges)
    : nodes_(std::move(nodes)), adjacency_(nodes_.size() * nodes_.size(), 0), neighbors_(nodes_.size()) {
    const std::size_t n = nodes_.size();
    for (const Edge& e : edges) {
        if (e.i >= n || e.j >= n) throw ValidationError("edge endpoint out of range");
        if (e.i == e.j) throw ValidationError("self-loops are not allowed");
        std::uint8_t& slot = adjacency_[e.i * n + e.j];
        if (slot) throw ValidationError("duplicate edge");
        slot = 1;
        adjacency_[e.j * n + e.i] = 1;
        ++edge_count_;
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (adjacency_[i * n + j]) neighbors_[i].push_back(j);
}

std::vector<Edge> BinaryGraph::edges() const {
    std::vector<Edge> out;
    out.reserve(edge_count_);
    const std::size_t n = node_count();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j : neighbors_[i])
            if (j > i) out.push_back({i, j});
    return out;
}

SquareMatrix BinaryGraph::adjacency_matrix() const {
    const std::size_t n = node_count();
    SquareMatrix m(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j : neighbors_[i]) m(i, j) = 1.0;
    return m;
}

bool BinaryGraph::same_edges(const BinaryGraph& other) const {
    if (nodes_.size() != other.nodes_.size()) return false;
    for (std::size_t i = 0; i < nodes_.size(); ++i)
        if (nodes_[i].label != other.nodes_[i].label) return false;
    return adjacency_ == other.adjacency_;
}

// Thresholding and distances ---------------------------------------------------

BinaryGraph threshold(const SquareMatrix& matrix, double tau, std::vector<Node> nodes) {
    const SquareMatrix m = symmetrized(matrix);
    const std::size_t n = m.size();
    if (nodes.empty()) nodes = default_nodes(n);
    check_node_table(nodes, n);
    std::vector<Edge> kept;
    for (std::size_t i = 0; i < n; ++i) {
        if (m(i, i) != 0.0) throw ValidationError("matrix diagonal must be zero");
        for (std::size_t j = i + 1; j < n; ++j)
            if (m(i, j) > tau) kept.push_back({i, j});
    }
    return BinaryGraph(std::move(nodes), kept);
}

DistanceMatrix shortest_paths_unweighted(const BinaryGraph& g) {
    const std::size_t n = g.node_count();
    SquareMatrix dist(n, kUnreachable);
    std::vector<std::size_t> queue;
    queue.reserve(n);
    for (std::size_t s = 0; s < n; ++s) {
        auto row = dist.row(s);
        row[s] = 0.0;
        queue.assign(1, s);
        for (std::size_t head = 0; head < queue.size(); ++head) {
            const std::size_t u = queue[head];
            for (std::size_t v : g.neighbors(u)) {
                if (row[v] == kUnreachable) {
                    row[v] = row[u] + 1.0;
                    queue.push_back(v);
                }
            }
        }
    }
    return DistanceMatrix(std::move(dist));
}

DistanceMatrix shortest_paths_weighted(const WeightedGraph& g) {
    const std::size_t n = g.node_count();
    SquareMatrix length(n, kUnreachable);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (g.weight(i, j) > 0.0) length(i, j) = 1.0 / g.weight(i, j);

    // Dense Dijkstra: O(n^2) per source, which beats a heap on the nearly
    // complete graphs produced by correlation matrices. Relaxing settled
    // nodes is harmless with nonnegative lengths, so every row is relaxed
    // in full by the vector kernel.
    SquareMatrix dist(n, kUnreachable);
    std::vector<std::uint8_t> settled(n);
    for (std::size_t s = 0; s < n; ++s) {
        auto row = dist.row(s);
        row[s] = 0.0;
        std::fill(settled.begin(), settled.end(), 0);
        for (std::size_t round = 0; round < n; ++round) {
            std::size_t u = n;
            double best = kUnreachable;
            for (std::size_t v = 0; v < n; ++v) {
                if (!settled[v] && row[v] < best) {
                    best = row[v];
                    u = v;
                }
            }
            if (u == n) break;
            settled[u] = 1;
            kernels::relax_min_plus(row, best, length.row(u));
        }
    }
    // Path sums accumulate in a different order from each endpoint; keep the
    // value found from the lower-indexed source so the matrix is symmetric.
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) dist(j, i) = dist(i, j);
    return DistanceMatrix(std::move(dist));
}

double efficiency_from_distances(const DistanceMatrix& d) {
    const std::size_t n = d.size();
    require_two_nodes(n, "efficiency");
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = d.matrix().row(i);
        total += kernels::sum_reciprocal(row.first(i)) + kernels::sum_reciprocal(row.subspan(i + 1));
    }
    return total / (static_cast<double>(n) * static_cast<double>(n - 1));
}

double global_efficiency(const BinaryGraph& g) {
    require_two_nodes(g.node_count(), "global efficiency");
    return efficiency_from_distances(shortest_paths_unweighted(g));
}

double local_efficiency(const BinaryGraph& g) {
    const std::size_t n = g.node_count();
    require_two_nodes(n, "local efficiency");
    double total = 0.0;
    std::vector<std::size_t> index(n);
    for (std::size_t v = 0; v < n; ++v) {
        const auto nbrs = g.neighbors(v);
        if (nbrs.size() < 2) continue;
        std::fill(index.begin(), index.end(), n);
        for (std::size_t k = 0; k < nbrs.size(); ++k) index[nbrs[k]] = k;
        std::vector<Edge> sub;
        for (std::size_t a : nbrs)
            for (std::size_t b : g.neighbors(a))
                if (index[b] != n && a < b) sub.push_back({index[a], index[b]});
        total += global_efficiency(BinaryGraph(nbrs.size(), sub));
    }
    return total / static_cast<double>(n);
}

double weighted_efficiency(const WeightedGraph& g) {
    require_two_nodes(g.node_count(), "weighted efficiency");
    return efficiency_from_distances(shortest_paths_weighted(g));
}

double weighted_density(const WeightedGraph& g) {
    const std::size_t n = g.node_count();
    require_two_nodes(n, "weighted density");
    // Diagonal is zero, so the full sum is the off-diagonal sum.
    return kernels::sum(g.weights().values()) / (static_cast<double>(n) * static_cast<double>(n - 1));
}

bool spread_condition_holds(const WeightedGraph& g) {
    const std::size_t n = g.node_count();
    double lo = kUnreachable;
    double hi = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            lo = std::min(lo, g.weight(i, j));
            hi = std::max(hi, g.weight(i, j));
        }
    if (!(hi > 0.0)) throw DomainError("spread condition needs at least one positive weight");
    return lo >= 0.5 * hi;
}

BinaryGraph permuted(const BinaryGraph& g, std::span<const std::size_t> perm) {
    const std::size_t n = g.node_count();
    if (perm.size() != n) throw ValidationError("permutation size mismatch");
    std::vector<Node> nodes(n);
    for (std::size_t i = 0; i < n; ++i) nodes[perm[i]] = g.nodes()[i];
    std::vector<Edge> edges;
    for (const Edge& e : g.edges()) edges.push_back({perm[e.i], perm[e.j]});
    return BinaryGraph(std::move(nodes), edges);
}

WeightedGraph permuted(const WeightedGraph& g, std::span<const std::size_t> perm) {
    const std::size_t n = g.node_count();
    if (perm.size() != n) throw ValidationError("permutation size mismatch");
    std::vector<Node> nodes(n);
    SquareMatrix w(n);
    for (std::size_t i = 0; i < n; ++i) {
        nodes[perm[i]] = g.nodes()[i];
        for (std::size_t j = 0; j < n; ++j) w(perm[i], perm[j]) = g.weight(i, j);
    }
    return WeightedGraph(std::move(w), std::move(nodes));
}

}  // namespace spn
