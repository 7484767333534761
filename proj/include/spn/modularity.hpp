#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "spn/graph.hpp"

namespace spn {

struct Partition {
    /// Module id per node, contiguous from 0 in order of first appearance.
    std::vector<std::size_t> assignment;
    std::size_t module_count = 0;
    /// Newman modularity of the assignment.
    double q = 0.0;
};

/// Greedy agglomerative modularity maximization (Clauset-Newman-Moore). Starts
/// from singletons and merges the connected pair with the largest gain while
/// the gain is positive; ties go to the smallest (community, community) pair.
/// Throws DomainError on an edgeless graph.
Partition greedy_modularity(const BinaryGraph& g);

/// Regular ring lattice: all offset-1 pairs (i, i+1 mod n), then offset 2, and
/// so on, stopping at exactly n_edges. A partial round is spread so that node
/// degrees differ by at most one.
BinaryGraph ring_lattice(std::size_t n_nodes, std::size_t n_edges);

/// n_edges distinct pairs drawn uniformly without replacement.
BinaryGraph random_graph(std::size_t n_nodes, std::size_t n_edges, std::uint64_t seed);

/// `steps` single-edge moves: remove a uniformly chosen edge and add a
/// uniformly chosen absent pair. Throws DomainError if steps > 0 and the graph
/// is empty or complete.
BinaryGraph rewire(const BinaryGraph& g, std::size_t steps, std::uint64_t seed);

enum class Topology { lattice, random };

std::string_view to_string(Topology t) noexcept;

struct SweepRow {
    std::size_t parameter = 0;
    std::size_t replicates = 0;
    double mean_modules = 0.0;
    double sd_modules = 0.0;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    std::uint64_t seed = 0;
    Topology topology = Topology::lattice;
};

/// Module count of rewired lattices as a function of the number of rewirings.
SweepResult randomness_sweep(std::size_t n_nodes, std::size_t n_edges, std::span<const std::size_t> rewiring_grid,
                             std::size_t replicates, std::uint64_t seed);

/// Module count as a function of edge count. Lattice rows are deterministic
/// and collapse to a single replicate.
SweepResult edges_sweep(std::size_t n_nodes, std::span<const std::size_t> edge_grid, Topology topology,
                        std::size_t replicates, std::uint64_t seed);

/// CSV with header parameter,replicates,mean_modules,sd_modules.
void write_sweep_csv(std::ostream& out, const SweepResult& sweep);

}  // namespace spn
