#include "spn/modularity.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <string>

#include "spn/errors.hpp"
#include "spn/rng.hpp"

namespace spn {
namespace {

std::size_t max_edges(std::size_t n) { return n * (n - 1) / 2; }

void check_feasible(std::size_t n_nodes, std::size_t n_edges) {
    if (n_nodes < 3) throw DomainError("graph generators need at least 3 nodes");
    if (n_edges > max_edges(n_nodes)) {
        throw DomainError("cannot place " + std::to_string(n_edges) + " edges on " + std::to_string(n_nodes) +
                          " nodes");
    }
}

std::vector<Edge> all_pairs(std::size_t n) {
    std::vector<Edge> pairs;
    pairs.reserve(max_edges(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) pairs.push_back({i, j});
    return pairs;
}

Edge ordered(std::size_t a, std::size_t b) { return a < b ? Edge{a, b} : Edge{b, a}; }

/// Offset-d pairs ordered so that any prefix keeps degrees within one of each
/// other: the pairs form cycles under v -> v + d; a near-perfect matching of
/// every cycle comes first, then the edges closing odd cycles, then the rest.
std::vector<Edge> offset_round(std::size_t n, std::size_t d) {
    std::vector<Edge> round;
    if (2 * d == n) {
        for (std::size_t i = 0; i < d; ++i) round.push_back({i, i + d});
        return round;
    }
    std::vector<std::vector<std::size_t>> cycles;
    std::vector<bool> seen(n, false);
    for (std::size_t start = 0; start < n; ++start) {
        if (seen[start]) continue;
        std::vector<std::size_t> cycle;
        for (std::size_t v = start; !seen[v]; v = (v + d) % n) {
            seen[v] = true;
            cycle.push_back(v);
        }
        cycles.push_back(std::move(cycle));
    }
    // Edge at position p of a cycle joins cycle[p] and cycle[p + 1].
    auto edge_at = [](const std::vector<std::size_t>& c, std::size_t p) {
        return ordered(c[p], c[(p + 1) % c.size()]);
    };
    for (const auto& c : cycles)
        for (std::size_t p = 0; p + 1 < c.size(); p += 2) round.push_back(edge_at(c, p));
    for (const auto& c : cycles)
        if (c.size() % 2 == 1) round.push_back(edge_at(c, c.size() - 1));
    for (const auto& c : cycles) {
        const std::size_t end = c.size() % 2 == 0 ? c.size() : c.size() - 1;
        for (std::size_t p = 1; p < end; p += 2) round.push_back(edge_at(c, p));
    }
    return round;
}

double sample_sd(const std::vector<double>& x, double mean) {
    if (x.size() < 2) return 0.0;
    double acc = 0.0;
    for (double v : x) acc += (v - mean) * (v - mean);
    return std::sqrt(acc / static_cast<double>(x.size() - 1));
}

SweepRow summarize(std::size_t parameter, const std::vector<double>& counts) {
    SweepRow row;
    row.parameter = parameter;
    row.replicates = counts.size();
    row.mean_modules = std::accumulate(counts.begin(), counts.end(), 0.0) / static_cast<double>(counts.size());
    row.sd_modules = sample_sd(counts, row.mean_modules);
    return row;
}

void check_replicates(std::size_t replicates) {
    if (replicates == 0) throw DomainError("replicates must be at least 1");
}

void append_number(std::string& out, double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    out.append(buf, res.ptr);
}

}  // namespace

Partition greedy_modularity(const BinaryGraph& g) {
    const std::size_t n = g.node_count();
    const std::int64_t m = static_cast<std::int64_t>(g.edge_count());
    if (m == 0) throw DomainError("modularity is undefined on an edgeless graph");

    // Integer bookkeeping keeps gains exact: links(a, b) counts edges between
    // communities a != b (edges inside a on the diagonal), and the gain of
    // merging a and b is (2m * links(a, b) - deg(a) * deg(b)) / (2 m^2).
    std::vector<std::int64_t> links(n * n, 0);
    std::vector<std::int64_t> deg(n, 0);
    for (const Edge& e : g.edges()) {
        links[e.i * n + e.j] = 1;
        links[e.j * n + e.i] = 1;
    }
    for (std::size_t i = 0; i < n; ++i) deg[i] = static_cast<std::int64_t>(g.degree(i));

    std::vector<std::size_t> owner(n);
    std::iota(owner.begin(), owner.end(), std::size_t{0});
    std::vector<bool> active(n, true);

    for (;;) {
        std::int64_t best_gain = 0;
        std::size_t best_a = n;
        std::size_t best_b = n;
        for (std::size_t a = 0; a < n; ++a) {
            if (!active[a]) continue;
            for (std::size_t b = a + 1; b < n; ++b) {
                if (!active[b] || links[a * n + b] == 0) continue;
                const std::int64_t gain = 2 * m * links[a * n + b] - deg[a] * deg[b];
                if (gain > best_gain) {
                    best_gain = gain;
                    best_a = a;
                    best_b = b;
                }
            }
        }
        if (best_a == n) break;

        const std::size_t a = best_a;
        const std::size_t b = best_b;
        links[a * n + a] += links[b * n + b] + links[a * n + b];
        for (std::size_t c = 0; c < n; ++c) {
            if (!active[c] || c == a || c == b) continue;
            links[a * n + c] += links[b * n + c];
            links[c * n + a] = links[a * n + c];
        }
        deg[a] += deg[b];
        active[b] = false;
        for (std::size_t v = 0; v < n; ++v)
            if (owner[v] == b) owner[v] = a;
    }

    Partition out;
    out.assignment.resize(n);
    std::vector<std::size_t> relabel(n, n);
    for (std::size_t v = 0; v < n; ++v) {
        std::size_t& id = relabel[owner[v]];
        if (id == n) id = out.module_count++;
        out.assignment[v] = id;
    }
    const double md = static_cast<double>(m);
    double q = 0.0;
    for (std::size_t c = 0; c < n; ++c) {
        if (!active[c]) continue;
        const double share = static_cast<double>(deg[c]) / (2.0 * md);
        q += static_cast<double>(links[c * n + c]) / md - share * share;
    }
    out.q = q;
    return out;
}

BinaryGraph ring_lattice(std::size_t n_nodes, std::size_t n_edges) {
    check_feasible(n_nodes, n_edges);
    std::vector<Edge> edges;
    edges.reserve(n_edges);
    for (std::size_t d = 1; edges.size() < n_edges; ++d) {
        for (const Edge& e : offset_round(n_nodes, d)) {
            if (edges.size() == n_edges) break;
            edges.push_back(e);
        }
    }
    return BinaryGraph(n_nodes, edges);
}

BinaryGraph random_graph(std::size_t n_nodes, std::size_t n_edges, std::uint64_t seed) {
    check_feasible(n_nodes, n_edges);
    std::vector<Edge> pairs = all_pairs(n_nodes);
    Rng rng(seed);
    for (std::size_t t = 0; t < n_edges; ++t) {
        const std::size_t pick = t + static_cast<std::size_t>(rng.below(pairs.size() - t));
        std::swap(pairs[t], pairs[pick]);
    }
    pairs.resize(n_edges);
    return BinaryGraph(n_nodes, pairs);
}

BinaryGraph rewire(const BinaryGraph& g, std::size_t steps, std::uint64_t seed) {
    if (steps == 0) return g;
    const std::size_t n = g.node_count();
    std::vector<Edge> present = g.edges();
    std::vector<Edge> absent;
    absent.reserve(max_edges(n) - present.size());
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (!g.has_edge(i, j)) absent.push_back({i, j});
    if (present.empty() || absent.empty())
        throw DomainError("rewiring needs a graph that is neither empty nor complete");

    Rng rng(seed);
    for (std::size_t s = 0; s < steps; ++s) {
        const std::size_t out_idx = static_cast<std::size_t>(rng.below(present.size()));
        const std::size_t in_idx = static_cast<std::size_t>(rng.below(absent.size()));
        std::swap(present[out_idx], absent[in_idx]);
    }
    return BinaryGraph(g.nodes(), present);
}

std::string_view to_string(Topology t) noexcept {
    return t == Topology::lattice ? "lattice" : "random";
}

SweepResult randomness_sweep(std::size_t n_nodes, std::size_t n_edges, std::span<const std::size_t> rewiring_grid,
                             std::size_t replicates, std::uint64_t seed) {
    check_replicates(replicates);
    const BinaryGraph lattice = ring_lattice(n_nodes, n_edges);
    SweepResult out;
    out.seed = seed;
    out.topology = Topology::lattice;
    for (std::size_t point = 0; point < rewiring_grid.size(); ++point) {
        std::vector<double> counts(replicates);
        for (std::size_t r = 0; r < replicates; ++r) {
            const BinaryGraph g = rewire(lattice, rewiring_grid[point], derive_seed(seed, point, r));
            counts[r] = static_cast<double>(greedy_modularity(g).module_count);
        }
        out.rows.push_back(summarize(rewiring_grid[point], counts));
    }
    return out;
}

SweepResult edges_sweep(std::size_t n_nodes, std::span<const std::size_t> edge_grid, Topology topology,
                        std::size_t replicates, std::uint64_t seed) {
    check_replicates(replicates);
    SweepResult out;
    out.seed = seed;
    out.topology = topology;
    for (std::size_t point = 0; point < edge_grid.size(); ++point) {
        const std::size_t n_edges = edge_grid[point];
        std::vector<double> counts;
        if (topology == Topology::lattice) {
            counts.push_back(static_cast<double>(greedy_modularity(ring_lattice(n_nodes, n_edges)).module_count));
        } else {
            counts.resize(replicates);
            for (std::size_t r = 0; r < replicates; ++r) {
                const BinaryGraph g = random_graph(n_nodes, n_edges, derive_seed(seed, point, r));
                counts[r] = static_cast<double>(greedy_modularity(g).module_count);
            }
        }
        out.rows.push_back(summarize(n_edges, counts));
    }
    return out;
}

void write_sweep_csv(std::ostream& out, const SweepResult& sweep) {
    std::string text = "parameter,replicates,mean_modules,sd_modules\n";
    for (const SweepRow& row : sweep.rows) {
        text += std::to_string(row.parameter);
        text += ',';
        text += std::to_string(row.replicates);
        text += ',';
        append_number(text, row.mean_modules);
        text += ',';
        append_number(text, row.sd_modules);
        text += '\n';
    }
    out << text;
}

}  // namespace spn
